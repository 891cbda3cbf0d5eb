#include "shellfill/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace shellfill {
namespace theory {

namespace {
constexpr double kAngleTol = 1e-12;

double harmonic(int r) {
  double s = 0.0;
  for (int j = 1; j <= r; ++j) s += 1.0 / j;
  return s;
}

int norm2(const IVec2& v) { return v.x * v.x + v.y * v.y; }
}  // namespace

double critical_angle(int r) {
  if (r < 1) throw std::invalid_argument("critical_angle: r >= 1 required");
  return std::asin(1.0 / double(r));
}

AngularSpectrum angular_spectrum(const std::vector<IVec2>& A) {
  // group by primitive direction; all members sit below y = -1 so the
  // primitive vector with negative y is canonical
  std::map<IVec2, IVec2> shortest;  // primitive -> shortest member
  for (const auto& v : A) {
    if (v.y > -1)
      throw std::invalid_argument("angular_spectrum: set must lie below y=-1");
    int g = std::gcd(std::abs(v.x), std::abs(v.y));
    IVec2 prim{v.x / g, v.y / g};
    auto it = shortest.find(prim);
    if (it == shortest.end() || norm2(v) < norm2(it->second))
      shortest[prim] = v;
  }
  if (shortest.size() < 2)
    throw std::domain_error("angular_spectrum: collinear set (|Theta| < 2)");

  AngularSpectrum sp;
  std::vector<std::pair<double, IVec2>> items;
  for (const auto& [prim, rep] : shortest)
    items.push_back({theta_mod_pi({double(rep.x), double(rep.y)}), rep});
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [ang, rep] : items) {
    sp.angles.push_back(ang);
    sp.representatives.push_back(rep);
  }
  for (size_t i = 0; i + 1 < sp.representatives.size(); ++i) {
    const IVec2& a = sp.representatives[i];
    const IVec2& b = sp.representatives[i + 1];
    sp.transitions.push_back(
        theta_mod_pi({double(a.x + b.x), double(a.y + b.y)}));
  }
  return sp;
}

double ct_limit(double theta, const AngularSpectrum& spectrum) {
  if (theta < -kAngleTol || theta >= kPi)
    throw std::invalid_argument("ct_limit: theta must lie in [0, pi)");
  if (std::abs(theta) <= kAngleTol) return kPi / 2.0;
  const size_t n = spectrum.angles.size();
  // exact transition hits take the angle midpoint of the two representatives
  for (size_t i = 0; i + 1 < n; ++i)
    if (std::abs(theta - spectrum.transitions[i]) <= kAngleTol)
      return 0.5 * (spectrum.angles[i] + spectrum.angles[i + 1]);
  // otherwise the staircase plateau: theta_{i-1,i} < theta < theta_{i,i+1}
  for (size_t i = 0; i < n; ++i) {
    double lo = (i == 0) ? 0.0 : spectrum.transitions[i - 1];
    double hi = (i + 1 == n) ? kPi : spectrum.transitions[i];
    if (theta > lo && theta < hi) return spectrum.angles[i];
  }
  throw std::logic_error("ct_limit: staircase lookup failed");
}

double guidefill_jump(int r) {
  if (r < 2) throw std::invalid_argument("guidefill_jump: r >= 2 required");
  double num = 0.0, den = 0.0;
  for (int n = 1; n <= r - 1; ++n) {
    double s = std::sqrt(1.0 + double(n) * n);
    num += 1.0 / s;
    den += double(n) / s;
  }
  return std::atan(num / den);
}

double guidefill_limit(double theta, int r) {
  if (theta < -kAngleTol || theta >= kPi)
    throw std::invalid_argument("guidefill_limit: theta must lie in [0, pi)");
  if (std::abs(theta) <= kAngleTol) return kPi / 2.0;
  double tc = critical_angle(r);
  double dt = guidefill_jump(r);
  if (theta < tc - kAngleTol) return theta + dt;
  if (theta > kPi - tc + kAngleTol) return theta - dt;
  return theta;  // the well-behaved cone, endpoints inclusive
}

double sig_limit(double theta) {
  if (theta < -kAngleTol || theta >= kPi)
    throw std::invalid_argument("sig_limit: theta must lie in [0, pi)");
  if (std::abs(theta) <= kAngleTol) return kPi / 2.0;
  return theta;
}

SolverNorms solver_norms(double theta, int r, double omega) {
  if (theta <= 0.0 || theta >= kPi)
    throw std::domain_error("solver_norms: theta must lie strictly in (0, pi)");
  SolverNorms out;
  out.W = harmonic(r);
  double st = std::sin(theta);
  double ct = std::abs(std::cos(theta));
  out.w00 = (1.0 - st) * (1.0 - ct);
  double tc = critical_angle(r);
  if (theta <= tc + kAngleTol || theta >= kPi - tc - kAngleTol) {
    out.W_tilde = out.W - double(r) * st;
  } else {
    int jstar = int(std::floor(1.0 / st));
    jstar = std::min(jstar, r);
    out.W_tilde = harmonic(jstar) - double(jstar) * st;
  }
  if (omega <= 0.0) omega = 1.0 - out.w00 / out.W;  // omega*
  double ratio = (out.W_tilde - out.w00) / (out.W - out.w00);
  out.J_norm = std::abs(1.0 - omega) + omega * ratio;
  out.G_norm = (omega <= 1.0 + kAngleTol)
                   ? std::abs(1.0 - omega) / (1.0 - omega * ratio)
                   : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double omega_star(double theta, int r) {
  double st = std::sin(theta);
  double ct = std::abs(std::cos(theta));
  return 1.0 - (1.0 - st) * (1.0 - ct) / harmonic(r);
}

Vec2 marz_direction(double mu, double theta, int quadrature_n) {
  if (quadrature_n < 256)
    throw std::invalid_argument("marz_direction: quadrature_n >= 256 required");
  Vec2 gp = Vec2{std::cos(theta), std::sin(theta)}.perp();
  const int n = quadrature_n;
  const double dx = 2.0 / n, dy = 1.0 / n;
  double W = 0.0;
  Vec2 m{0, 0};
  for (int j = 0; j < n; ++j) {
    double y = -1.0 + (j + 0.5) * dy;
    for (int i = 0; i < n; ++i) {
      double x = -1.0 + (i + 0.5) * dx;
      double r2 = x * x + y * y;
      if (r2 > 1.0 || y >= 0.0) continue;
      double t = gp.x * x + gp.y * y;
      double w = std::exp(-0.5 * mu * mu * t * t) / std::sqrt(r2);
      W += w;
      m.x += w * x;
      m.y += w * y;
    }
  }
  return m / W;
}

double transport_solution(const std::function<double(double)>& boundary,
                          double theta_star, double x, double y,
                          bool periodic) {
  double s = std::sin(theta_star);
  if (s == 0.0)
    throw std::domain_error("transport_solution: theta_star in {0, pi}");
  double foot = x - (std::cos(theta_star) / s) * y;
  if (periodic) {
    foot = std::fmod(foot, 1.0);
    if (foot < 0) foot += 1.0;
  }
  return boundary(foot);
}

double transport_solution(const std::vector<double>& slice, double theta_star,
                          double x, double y, double spacing_h, bool periodic) {
  return transport_solution(
      [&](double t) {
        const int N = int(slice.size());
        double u = t / spacing_h - 1.0;  // sample i sits at (i+1)h
        double fl = std::floor(u);
        double f = u - fl;
        int i0 = int(fl), i1 = i0 + 1;
        if (periodic) {
          i0 = ((i0 % N) + N) % N;
          i1 = ((i1 % N) + N) % N;
        } else {
          i0 = std::clamp(i0, 0, N - 1);
          i1 = std::clamp(i1, 0, N - 1);
        }
        return (1.0 - f) * slice[i0] + f * slice[i1];
      },
      theta_star, x, y, periodic);
}

TransportModel transport_model(const EquivalentStencil& eq) {
  TransportModel m;
  double W = eq.total_weight();
  if (W <= 0.0) throw std::domain_error("transport_model: zero mass");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < eq.offsets.size(); ++i) {
    mx += eq.weights[i] * eq.offsets[i].x;
    my += eq.weights[i] * eq.offsets[i].y;
  }
  m.mu_x = mx / W;
  m.mu_y = my / W;
  m.g_star = {m.mu_x, m.mu_y};
  m.theta_star = theta_mod_pi(m.g_star);
  double var = 0.0;  // mean of (mu_x W_1 - mu_y V_1) is identically zero
  for (size_t i = 0; i < eq.offsets.size(); ++i) {
    double t = m.mu_x * eq.offsets[i].y - m.mu_y * eq.offsets[i].x;
    var += (eq.weights[i] / W) * t * t;
  }
  m.gamma_sq = var;
  return m;
}

double blur_sigma(const TransportModel& model, double y, double h) {
  if (model.mu_y >= 0.0)
    throw std::domain_error("blur_sigma: mu_y < 0 required");
  if (y < 0.0) throw std::invalid_argument("blur_sigma: y >= 0 required");
  double a = std::abs(model.mu_y);
  return std::sqrt(model.gamma_sq * y * h / (a * a * a));
}

std::vector<double> predicted_profile(const std::vector<double>& slice,
                                      double sigma, double theta_star,
                                      double spacing_h,
                                      const std::vector<double>& eval_x) {
  (void)theta_star;  // the callers fold Pi into eval_x
  const int N = int(slice.size());
  const double h = spacing_h;
  const double period = N * h;
  std::vector<double> out(eval_x.size(), 0.0);
  for (size_t k = 0; k < eval_x.size(); ++k) {
    double foot = std::fmod(eval_x[k], period);
    if (foot < 0) foot += period;
    if (sigma == 0.0) {
      // cell ((i-1)h, ih] carries sample u0(ih); identity on samples
      int i = int(std::ceil(foot / h - 1e-12));
      i = ((i - 1) % N + N) % N;
      out[k] = slice[i];
      continue;
    }
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    auto cdf = [&](double t) { return 0.5 * std::erfc(-t * inv); };
    // wrap enough kernel images that the truncated tails are < 1e-16
    int S = int(std::ceil((8.0 * sigma) / period)) + 1;
    double acc = 0.0;
    for (int s = -S; s <= S; ++s) {
      double x = foot + s * period;
      for (int i = 0; i < N; ++i) {
        double a = x - i * h;        // t = (i-1)h edge, 0-based
        double b = x - (i + 1) * h;  // t = ih edge
        acc += (cdf(a) - cdf(b)) * slice[i];
      }
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace theory
}  // namespace shellfill
