#include "shellfill/testdata.hpp"

#include <stdexcept>

namespace shellfill {
namespace testdata {

double weierstrass(double s, double x, int n_max) {
  if (s <= 0.0) throw std::invalid_argument("weierstrass: s > 0 required");
  if (n_max < 1) throw std::invalid_argument("weierstrass: n_max >= 1");
  double sum = 0.0;
  double pow2 = 2.0;  // 2^n
  for (int n = 1; n <= n_max; ++n) {
    sum += std::exp2(-s * n) * std::cos(pow2 * kPi * x);
    pow2 *= 2.0;
  }
  return sum;
}

double step_h(double s_prime, double x) {
  if (s_prime < 0.0) throw std::invalid_argument("step_h: s' >= 0 required");
  double v = 1.0;
  auto ramp = [&](double t) {
    // tanh(20 t)^{s'} with the 0^0 := 1 convention at the kink
    double base = std::tanh(20.0 * t);
    if (s_prime == 0.0) return 1.0;
    return std::pow(base, s_prime);
  };
  if (x <= 0.25) v -= ramp(0.25 - x);
  if (x >= 0.75) v -= ramp(x - 0.75);
  return v;
}

Vec2 smooth_guide(double x, double y) {
  return {4.0 * x * y / (1.0 + 2.0 * y * y), 1.0};
}

double exact_transport(double x, double y) {
  return x / (1.0 + 2.0 * y * y);
}

}  // namespace testdata
}  // namespace shellfill
