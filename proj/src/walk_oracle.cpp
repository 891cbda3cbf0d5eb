#include "shellfill/walk_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <random>
#include <stdexcept>
#include <vector>

namespace shellfill {
namespace walk {

namespace {

struct Step {
  IVec2 d;
  double p;
};

// Normalized step distribution; origin weight becomes a (0,0) step.
std::vector<Step> step_distribution(const EquivalentStencil& eq,
                                    WalkMode mode) {
  double W = eq.total_weight();
  if (W <= 0.0) throw std::domain_error("stopped_density: zero stencil mass");
  std::vector<Step> steps;
  double drift_y = 0.0;
  if (eq.origin_weight > 0.0) {
    if (mode == WalkMode::direct)
      throw std::invalid_argument(
          "stopped_density: direct mode cannot carry origin mass");
    steps.push_back({{0, 0}, eq.origin_weight / W});
  }
  for (size_t i = 0; i < eq.offsets.size(); ++i) {
    const IVec2& d = eq.offsets[i];
    if (mode == WalkMode::direct && d.y > -1)
      throw std::invalid_argument(
          "stopped_density: direct mode requires every step to descend");
    if (mode == WalkMode::semi_implicit && d.y > 0)
      throw std::invalid_argument(
          "stopped_density: steps may not ascend");
    steps.push_back({d, eq.weights[i] / W});
    drift_y += (eq.weights[i] / W) * d.y;
  }
  if (drift_y >= 0.0)
    throw std::domain_error("stopped_density: drift mu_y < 0 required");
  return steps;
}

int wrap(int x, int period) {
  if (period <= 0) return x;
  x %= period;
  return x < 0 ? x + period : x;
}

// Kahan-compensated add into a map slot.
struct RowMass {
  std::map<int, double> m;  // x -> mass
  void add(int x, double v) { m[x] += v; }
};

}  // namespace

WalkDensity stopped_density(IVec2 start, const EquivalentStencil& eq,
                            WalkMode mode, double tol, int x_period) {
  auto steps = step_distribution(eq, mode);
  WalkDensity out;
  out.start = start;
  if (start.y <= 0) {  // already in the data region
    out.masses[{wrap(start.x, x_period), start.y}] = 1.0;
    return out;
  }

  // mass per interior row, processed from the top down; every step moves
  // down by >= 1 (direct) or >= 0 (semi-implicit)
  std::map<int, RowMass> interior;  // y -> row masses, y >= 1
  interior[start.y].add(wrap(start.x, x_period), 1.0);

  auto deposit = [&](int x, int y, double v) {
    x = wrap(x, x_period);
    if (y <= 0)
      out.masses[{x, y}] += v;
    else
      interior[y].add(x, v);
  };

  while (!interior.empty()) {
    auto it = interior.rbegin();  // highest remaining row
    int y = it->first;
    RowMass row = std::move(it->second);
    interior.erase(std::prev(interior.end()));

    if (mode == WalkMode::direct) {
      for (const auto& [x, v] : row.m)
        for (const auto& s : steps) deposit(x + s.d.x, y + s.d.y, v * s.p);
      continue;
    }

    // semi-implicit: split the step set into stay-row and descend parts and
    // push the stay-row mass around until the residual is negligible
    double row_total = 0.0;
    for (const auto& [x, v] : row.m) row_total += v;
    double floor_mass = tol * std::max(row_total, 1e-300);
    std::map<int, double> cur = std::move(row.m);
    while (true) {
      std::map<int, double> next;
      double remaining = 0.0;
      for (const auto& [x, v] : cur) {
        for (const auto& s : steps) {
          if (s.d.y == 0) {
            next[wrap(x + s.d.x, x_period)] += v * s.p;
          } else {
            deposit(x + s.d.x, y + s.d.y, v * s.p);
          }
        }
      }
      for (const auto& [x, v] : next) remaining += v;
      cur = std::move(next);
      if (remaining < floor_mass || remaining == 0.0) {
        out.residual_interior_mass += remaining;
        break;
      }
    }
  }

  // fold round-off defects back so expected_color averages stay convex
  // combinations; defects beyond 1e-12 are renormalized with a warning and
  // anything larger points at a bug upstream
  double total = out.total_stopped() + out.residual_interior_mass;
  if (std::abs(total - 1.0) > 1e-6)
    throw std::runtime_error("stopped_density: mass defect exceeds 1e-6");
  if (std::abs(total - 1.0) > 1e-12)
    std::fprintf(stderr,
                 "stopped_density: mass defect %.3g, renormalizing\n",
                 total - 1.0);
  for (auto& [p, m] : out.masses) m /= total;
  return out;
}

void expected_color(const WalkDensity& density,
                    const std::function<void(IVec2, double*)>& boundary,
                    int channels, double* out) {
  if (density.residual_interior_mass > 1e-10)
    throw std::runtime_error("expected_color: residual interior mass too large");
  std::vector<double> acc(channels, 0.0), val(channels, 0.0);
  for (const auto& [p, m] : density.masses) {
    boundary(p, val.data());
    for (int c = 0; c < channels; ++c) acc[c] += m * val[c];
  }
  for (int c = 0; c < channels; ++c) out[c] = acc[c];
}

WalkDensity monte_carlo(IVec2 start, const EquivalentStencil& eq, long samples,
                        uint64_t seed, int x_period) {
  if (samples < 1) throw std::invalid_argument("monte_carlo: samples >= 1");
  bool has_row0 = eq.origin_weight > 0.0;
  for (const auto& d : eq.offsets) has_row0 = has_row0 || d.y == 0;
  auto steps = step_distribution(
      eq, has_row0 ? WalkMode::semi_implicit : WalkMode::direct);
  std::vector<double> cdf(steps.size());
  double acc = 0.0;
  for (size_t i = 0; i < steps.size(); ++i) cdf[i] = (acc += steps[i].p);
  cdf.back() = 1.0;

  WalkDensity out;
  out.start = start;
  const long chunk = 65536;
  double inv = 1.0 / double(samples);
  for (long c0 = 0; c0 < samples; c0 += chunk) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * uint64_t(c0 / chunk));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    long n = std::min(chunk, samples - c0);
    for (long s = 0; s < n; ++s) {
      IVec2 pos = start;
      while (pos.y > 0) {
        double u = uni(rng);
        size_t k = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        pos.x += steps[k].d.x;
        pos.y += steps[k].d.y;
        pos.x = wrap(pos.x, x_period);
      }
      out.masses[pos] += inv;
    }
  }
  return out;
}

std::string dump_csv(const WalkDensity& density) {
  std::string out = "dx,dy,mass\n";
  for (const auto& [pos, m] : density.masses) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", pos.x - density.start.x,
                  pos.y - density.start.y, m);
    out += buf;
  }
  return out;
}

double total_variation(const WalkDensity& a, const WalkDensity& b) {
  double tv = 0.0;
  auto ia = a.masses.begin();
  auto ib = b.masses.begin();
  while (ia != a.masses.end() || ib != b.masses.end()) {
    if (ib == b.masses.end() || (ia != a.masses.end() && ia->first < ib->first)) {
      tv += ia->second;
      ++ia;
    } else if (ia == a.masses.end() || ib->first < ia->first) {
      tv += ib->second;
      ++ib;
    } else {
      tv += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * tv;
}

}  // namespace walk
}  // namespace shellfill
