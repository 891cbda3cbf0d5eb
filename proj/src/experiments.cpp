#include "shellfill/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "shellfill/testdata.hpp"

namespace shellfill {
namespace experiments {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

StripProblem make_strip_problem(
    int N, int rows, int strip, int channels,
    const std::function<void(double, double*)>& u0, BoundaryMode mode) {
  StripProblem p;
  p.N = N;
  p.rows = rows;
  p.strip = strip;
  p.h = 1.0 / N;
  p.image = PixelGrid(N, strip + rows, channels, p.h, mode);
  p.state = FillState(N, strip + rows, mode);
  std::vector<double> val(channels, 0.0);
  for (int jx = 0; jx < N; ++jx) {
    u0(p.sample_x(jx), val.data());
    for (int iy = 0; iy < strip; ++iy)
      for (int c = 0; c < channels; ++c) p.image.at(jx, iy, c) = val[c];
  }
  for (int iy = strip; iy < strip + rows; ++iy)
    for (int jx = 0; jx < N; ++jx) p.state.set_unfilled(jx, iy);
  p.state.refresh_active();
  return p;
}

double measure_orientation_deg(const PixelGrid& filled, const StripProblem& p,
                               int channel) {
  const int N = p.N;
  std::vector<double> mass, pos;
  std::vector<int> row_id;
  double max_mass = 0.0;
  // circular centroid per unknown row
  std::vector<double> row_mass(p.rows, 0.0), row_pos(p.rows, 0.0);
  for (int k = 0; k < p.rows; ++k) {
    int iy = p.strip + k;
    double m = 0.0, cs = 0.0, sn = 0.0;
    for (int jx = 0; jx < N; ++jx) {
      double v = filled.at(jx, iy, channel);
      m += v;
      double a = 2.0 * kPi * jx / N;
      cs += v * std::cos(a);
      sn += v * std::sin(a);
    }
    row_mass[k] = m;
    double ang = std::atan2(sn, cs);
    row_pos[k] = ang / (2.0 * kPi) * N;  // may be negative; unwrap below
    max_mass = std::max(max_mass, m);
  }
  if (max_mass <= 0.0) return kNaN;

  // unwrap and select rows: >= 10% of the peak mass, skipping the 5 rows
  // nearest the boundary
  double prev = kNaN;
  for (int k = 0; k < p.rows; ++k) {
    if (row_mass[k] < 0.10 * max_mass) continue;
    if (!std::isnan(prev)) {
      while (row_pos[k] - prev > N / 2.0) row_pos[k] -= N;
      while (row_pos[k] - prev < -N / 2.0) row_pos[k] += N;
    }
    prev = row_pos[k];
    if (k < 5) continue;
    mass.push_back(row_mass[k]);
    pos.push_back(row_pos[k]);
    row_id.push_back(k);
  }
  if (pos.size() < 8) return kNaN;  // not stretched enough to measure

  // least squares x = a + b * row
  double n = double(pos.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < pos.size(); ++i) {
    double x = double(row_id[i]);
    sx += x;
    sy += pos[i];
    sxx += x * x;
    sxy += x * pos[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  double b = (n * sxy - sx * sy) / denom;  // pixels of x per row of y
  double ang = std::atan2(1.0, b);         // in (0, pi)
  return rad2deg(ang);
}

DotCurve exp_dot(Method method, int r, double mu,
                 const std::vector<double>& theta_deg_list, int N,
                 int threads) {
  DotCurve curve{method, r, mu, {}};
  const int strip = r + 3;
  const int rows = N;
  const double dot_radius = std::max(2.0, N / 128.0);

  theory::AngularSpectrum spectrum;
  if (method == Method::coherence_transport) {
    std::vector<IVec2> bm;
    for (const auto& v :
         restrict_half_plane(make_neighborhood(NeighborhoodKind::ball, r, {0, 1}), -1))
      bm.push_back({int(v.x), int(v.y)});
    spectrum = theory::angular_spectrum(bm);
  }

  for (double theta_deg : theta_deg_list) {
    double theta = deg2rad(theta_deg);
    // red dot on blue, centered on the top data row
    auto u0 = [&](double x, double* out) {
      out[0] = 0.0;
      out[1] = 0.0;
      out[2] = 1.0;
      (void)x;
    };
    StripProblem p = make_strip_problem(N, rows, strip, 3, u0);
    const double cx = N / 2.0;
    for (int iy = 0; iy < strip; ++iy)
      for (int jx = 0; jx < N; ++jx) {
        double dx = jx - cx, dy = iy - (strip - 1);
        if (dx * dx + dy * dy <= dot_radius * dot_radius) {
          p.image.at(jx, iy, 0) = 1.0;
          p.image.at(jx, iy, 2) = 0.0;
        }
      }

    FillConfig cfg;
    cfg.method = method;
    cfg.r = r;
    cfg.mu = mu;
    cfg.guide = {std::cos(theta), std::sin(theta)};
    cfg.ready.policy = ReadyPolicy::onion;  // smart order off, as analyzed
    PixelGrid out;
    if (method == Method::guidefill_semi_implicit) {
      cfg.solver = SolverKind::sor;
      cfg.sweeps = 5;
      out = fill_semi_implicit(p.image, p.state, cfg, nullptr, threads);
    } else {
      out = fill(p.image, p.state, cfg, nullptr, threads);
    }

    DotRow row;
    row.theta_deg = theta_deg;
    row.measured_deg = measure_orientation_deg(out, p, 0);
    switch (method) {
      case Method::coherence_transport:
        row.theory_deg = rad2deg(theory::ct_limit(theta, spectrum));
        break;
      case Method::guidefill:
        row.theory_deg = rad2deg(theory::guidefill_limit(theta, r));
        break;
      case Method::guidefill_semi_implicit:
        row.theory_deg = rad2deg(theory::sig_limit(theta));
        break;
      default:
        throw std::invalid_argument("exp_dot: unsupported method");
    }
    curve.rows.push_back(row);
  }
  return curve;
}

LimitCurve exp_limits(double theta_deg, double mu, double s, double s_prime,
                      double p, double h, const std::vector<int>& r_list,
                      int threads) {
  LimitCurve curve;
  curve.p = p;
  curve.h = h;
  const int N = int(std::lround(1.0 / h));
  int rmax = 0;
  for (int r : r_list) rmax = std::max(rmax, r);
  const int strip = rmax + 3;
  // fixed series cap: rate and limit studies need the data's roughness to be
  // h-independent (the truncation tail 2^(-s n) rivals the measured errors
  // for rough data when the cap tracks the grid)
  const int n_max = 48;
  auto u0 = [&](double x) {
    return testdata::boundary_u0(s, s_prime, x, n_max);
  };

  const double theta = deg2rad(theta_deg);
  Vec2 g{std::cos(theta), std::sin(theta)};
  Vec2 g_marz = theory::marz_direction(mu, theta, 2048);
  double theta_marz = theta_mod_pi(g_marz);

  StripProblem prob = make_strip_problem(
      N, N, strip, 1, [&](double x, double* out) { out[0] = u0(x); });

  for (int r : r_list) {
    FillConfig cfg;
    cfg.method = Method::coherence_transport;
    cfg.r = r;
    cfg.mu = mu;
    cfg.guide = g;
    PixelGrid out = fill(prob.image, prob.state, cfg, nullptr, threads);

    Vec2 com = center_of_mass(equivalent(make_stencil(cfg.method, r, mu, g)));
    double theta_star = theta_mod_pi(com);

    auto err = [&](double tstar) {
      std::vector<double> diff;
      diff.reserve(size_t(N) * prob.rows);
      double cot = std::cos(tstar) / std::sin(tstar);
      for (int k = 0; k < prob.rows; ++k) {
        int iy = prob.strip + k;
        double y = prob.anchor_y(iy);
        for (int jx = 0; jx < N; ++jx) {
          double foot = prob.anchor_x(jx) - cot * y;
          foot = std::fmod(foot, 1.0);
          if (foot < 0) foot += 1.0;
          diff.push_back(out.at(jx, iy, 0) - u0(foot));
        }
      }
      return lp_norm(diff, p, h);
    };

    curve.rows.push_back({r, err(theta_star), err(theta_marz)});
  }
  return curve;
}

RateReport exp_rates(const RateConfig& cfg, const std::vector<double>& h_list,
                     int threads) {
  RateReport rep;
  rep.norm_p = cfg.p;
  rep.h_values = h_list;

  // expected alpha switches on stencil degeneracy ("assign mass to more than
  // one y"); for the smooth guide probe a generic interior direction
  {
    Vec2 g = cfg.smooth_guide ? testdata::smooth_guide(0.5, 0.5)
                              : Vec2{std::cos(deg2rad(cfg.theta_deg)),
                                     std::sin(deg2rad(cfg.theta_deg))};
    Method m = cfg.smooth_guide ? Method::guidefill : cfg.method;
    EquivalentStencil eq = equivalent(make_stencil(m, cfg.r, cfg.mu, g));
    double W = eq.total_weight(), wmax = eq.origin_weight;
    for (double w : eq.weights) wmax = std::max(wmax, w);
    rep.degenerate = wmax / W >= 1.0 - 1e-12;
  }
  double s = cfg.s, sp = cfg.s_prime, p = cfg.p;
  double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  rep.alpha_expected =
      rep.degenerate
          ? std::min({s, sp + inv_p, 1.0})
          : std::min({s / 2.0, sp / 2.0 + inv_p / 2.0, 1.0});

  for (double h : h_list) {
    const int N = int(std::lround(1.0 / h));
    const int strip = cfg.r + 3;
    const int n_max = 48;  // fixed cap; see exp_limits
    auto u0 = [&](double x) {
      return testdata::boundary_u0(s, sp, x, n_max);
    };
    // the smooth guide field is not x-periodic (its characteristics never
    // leave through the sides), so that configuration runs under dirichlet
    StripProblem prob = make_strip_problem(
        N, N, strip, 1, [&](double x, double* out) { out[0] = u0(x); },
        cfg.smooth_guide ? BoundaryMode::dirichlet_x
                         : BoundaryMode::periodic_x);

    FillConfig fc;
    fc.r = cfg.r;
    fc.mu = cfg.mu;
    PixelGrid out;
    std::function<double(int, int)> foot_of;  // per-pixel transport foot

    if (cfg.smooth_guide) {
      fc.method = Method::guidefill;
      fc.guide_field = [&prob](int ix, int iy) {
        return testdata::smooth_guide(prob.anchor_x(ix), prob.anchor_y(iy));
      };
      out = fill(prob.image, prob.state, fc, nullptr, threads);
      foot_of = [&prob](int ix, int iy) {
        return testdata::exact_transport(prob.anchor_x(ix), prob.anchor_y(iy));
      };
    } else {
      fc.method = cfg.method;
      double theta = deg2rad(cfg.theta_deg);
      fc.guide = {std::cos(theta), std::sin(theta)};
      out = fill(prob.image, prob.state, fc, nullptr, threads);
      Vec2 com = center_of_mass(
          equivalent(make_stencil(fc.method, cfg.r, cfg.mu, fc.guide)));
      double tstar = theta_mod_pi(com);
      double cot = std::cos(tstar) / std::sin(tstar);
      foot_of = [&prob, cot](int ix, int iy) {
        return prob.anchor_x(ix) - cot * prob.anchor_y(iy);
      };
    }

    std::vector<double> diff;
    diff.reserve(size_t(N) * prob.rows);
    for (int k = 0; k < prob.rows; ++k) {
      int iy = prob.strip + k;
      for (int jx = 0; jx < N; ++jx) {
        double foot = std::fmod(foot_of(jx, iy), 1.0);
        if (foot < 0) foot += 1.0;
        diff.push_back(out.at(jx, iy, 0) - u0(foot));
      }
    }
    rep.errors_lp.push_back(lp_norm(diff, p, h));
  }

  bool all_zero = true;
  for (double e : rep.errors_lp) all_zero = all_zero && e == 0.0;
  rep.errors_all_zero = all_zero;
  for (size_t i = 1; i < rep.errors_lp.size(); ++i) {
    if (all_zero || rep.errors_lp[i] == 0.0 || rep.errors_lp[i - 1] == 0.0) {
      rep.R_h.push_back(kNaN);
    } else {
      rep.R_h.push_back(std::log2(rep.errors_lp[i - 1] / rep.errors_lp[i]));
    }
  }
  return rep;
}

namespace {

StripProblem blur_problem(BlurScenario sc, int& r, double& mu, Vec2& g,
                          Method& method) {
  r = 3;
  mu = 100.0;
  if (sc == BlurScenario::fig14) {
    method = Method::guidefill;
    g = {1.0, 0.0};
    const int N = 200;
    const int strip = 60;  // data on [0,1] x [-0.3, 0]
    auto u0 = [](double x, double* out) {
      out[0] = (x > 0.25 && x <= 0.75) ? 1.0 : 0.0;
    };
    return make_strip_problem(N, N, strip, 1, u0);
  }
  method = Method::guidefill_semi_implicit;
  double theta = deg2rad(10.0);
  g = {std::cos(theta), std::sin(theta)};
  const int N = 1000;
  const int strip = 300;
  const double cot = std::cos(theta) / std::sin(theta);
  // a 10-degree line whose y = 0 slice is the same box step
  StripProblem p = make_strip_problem(N, N, strip, 1,
                                      [](double, double* out) { out[0] = 0.0; });
  for (int iy = 0; iy < strip; ++iy) {
    double y = p.anchor_y(iy);
    for (int jx = 0; jx < N; ++jx) {
      double t = std::fmod(p.sample_x(jx) - cot * y, 1.0);
      if (t < 0) t += 1.0;
      if (t > 0.25 && t <= 0.75) p.image.at(jx, iy, 0) = 1.0;
    }
  }
  return p;
}

}  // namespace

BlurReport exp_blur(BlurScenario scenario, const std::vector<double>& slice_y,
                    int threads) {
  BlurReport rep;
  rep.scenario = scenario;
  int r;
  double mu;
  Vec2 g;
  Method method;
  StripProblem p = blur_problem(scenario, r, mu, g, method);

  FillConfig cfg;
  cfg.method = method;
  cfg.r = r;
  cfg.mu = mu;
  cfg.guide = g;
  PixelGrid out;
  if (method == Method::guidefill_semi_implicit) {
    cfg.solver = SolverKind::sor;
    cfg.sweeps = 5;
    out = fill_semi_implicit(p.image, p.state, cfg, nullptr, threads);
  } else {
    out = fill(p.image, p.state, cfg, nullptr, threads);
  }

  theory::TransportModel model =
      theory::transport_model(equivalent(make_stencil(method, r, mu, g)));
  double cot = std::cos(model.theta_star) / std::sin(model.theta_star);

  std::vector<double> slice0(p.N);
  for (int jx = 0; jx < p.N; ++jx) slice0[jx] = p.image.at(jx, p.strip - 1, 0);

  for (double y : slice_y) {
    BlurSlice s;
    s.y = y;
    s.sigma = theory::blur_sigma(model, y, p.h);
    int iy = p.row_of(y);
    if (iy < p.strip || iy >= p.strip + p.rows)
      throw std::invalid_argument("exp_blur: slice height outside the domain");
    double yy = p.anchor_y(iy);
    std::vector<double> feet(p.N);
    for (int jx = 0; jx < p.N; ++jx) {
      s.x.push_back(p.anchor_x(jx));
      s.measured.push_back(out.at(jx, iy, 0));
      feet[jx] = p.anchor_x(jx) - cot * yy;
    }
    s.predicted = theory::predicted_profile(slice0, s.sigma, model.theta_star,
                                            p.h, feet);
    for (int jx = 0; jx < p.N; ++jx)
      s.max_abs_dev =
          std::max(s.max_abs_dev, std::abs(s.measured[jx] - s.predicted[jx]));
    rep.slices.push_back(std::move(s));
  }
  return rep;
}

double blur_degenerate_control(int N, double theta_deg, int threads) {
  const int strip = 6;
  auto u0 = [](double x, double* out) {
    out[0] = (x > 0.25 && x <= 0.75) ? 1.0 : 0.0;
  };
  StripProblem p = make_strip_problem(N, N, strip, 1, u0);
  double theta = deg2rad(theta_deg);

  FillConfig cfg;
  cfg.method = Method::coherence_transport;
  cfg.r = 3;
  cfg.mu = 1e4;
  cfg.guide = {std::cos(theta), std::sin(theta)};
  PixelGrid out = fill(p.image, p.state, cfg, nullptr, threads);

  theory::TransportModel model = theory::transport_model(
      equivalent(make_stencil(cfg.method, cfg.r, cfg.mu, cfg.guide)));
  double cot = std::cos(model.theta_star) / std::sin(model.theta_star);

  std::vector<double> slice0(N);
  for (int jx = 0; jx < N; ++jx) slice0[jx] = p.image.at(jx, strip - 1, 0);

  int iy = p.row_of(0.5);
  double yy = p.anchor_y(iy);
  std::vector<double> feet(N);
  for (int jx = 0; jx < N; ++jx) feet[jx] = p.anchor_x(jx) - cot * yy;
  std::vector<double> sharp =
      theory::predicted_profile(slice0, 0.0, model.theta_star, p.h, feet);

  double dev = 0.0;
  for (int jx = 0; jx < N; ++jx)
    dev = std::max(dev, std::abs(out.at(jx, iy, 0) - sharp[jx]));
  return dev;
}

std::string to_csv(const DotCurve& c) {
  std::ostringstream os;
  os << "theta_deg,theta_measured_deg,theta_theory_deg\n";
  for (const auto& r : c.rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.theta_deg,
                  r.measured_deg, r.theory_deg);
    os << buf;
  }
  return os.str();
}

std::string to_csv(const LimitCurve& c) {
  std::ostringstream os;
  os << "r,err_vs_u,err_vs_marz\n";
  for (const auto& r : c.rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", r.r, r.err_u,
                  r.err_marz);
    os << buf;
  }
  return os.str();
}

std::string to_csv(const RateReport& r) {
  std::ostringstream os;
  os << "h,error_lp,R_h\n";
  for (size_t i = 0; i < r.h_values.size(); ++i) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.h_values[i],
                  r.errors_lp[i], i == 0 ? kNaN : r.R_h[i - 1]);
    os << buf;
  }
  char tail[96];
  std::snprintf(tail, sizeof(tail), "# alpha,%.17g\n", r.alpha_expected);
  os << tail;
  return os.str();
}

std::string to_csv(const BlurReport& r) {
  std::ostringstream os;
  os << "y,x,measured,predicted\n";
  for (const auto& s : r.slices)
    for (size_t i = 0; i < s.x.size(); ++i) {
      char buf[192];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.y, s.x[i],
                    s.measured[i], s.predicted[i]);
      os << buf;
    }
  return os.str();
}

}  // namespace experiments
}  // namespace shellfill
