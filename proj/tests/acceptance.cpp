// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Run via ctest or directly: ./acceptance
//
// Two sub-checks (criterion 8's first configuration, criterion 9's r=3
// clause) are deliberately strict against reference measurements this
// implementation does not reproduce; comments at those checks explain why.
// Everything else is expected green.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "shellfill/direct_fill.hpp"
#include "shellfill/experiments.hpp"
#include "shellfill/ghost.hpp"
#include "shellfill/implicit_fill.hpp"
#include "shellfill/parallel.hpp"
#include "shellfill/theory.hpp"
#include "shellfill/walk_oracle.hpp"

using namespace shellfill;
using namespace shellfill::experiments;

namespace {

struct Criterion {
  int id;
  bool ok = true;
  std::string detail;
  explicit Criterion(int n) : id(n) {}
  void check(bool pass, const std::string& what) {
    if (!pass && detail.empty()) detail = what;
    ok = ok && pass;
  }
  ~Criterion() {
    std::printf("[criterion %2d] %s%s%s\n", id, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
  }
};

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

StripProblem sine_strip(int N, int rows, int strip,
                        BoundaryMode mode = BoundaryMode::periodic_x) {
  return make_strip_problem(
      N, rows, strip, 1,
      [](double x, double* out) { out[0] = 0.5 + 0.5 * std::sin(2 * kPi * x); },
      mode);
}

}  // namespace

TEST_SUITE("acceptance") {

// -- 1. equivalent-weights laws on 1000 randomized ghost stencils ----------
TEST_CASE("criterion 1: equivalent-weight laws") {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c(1);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ang(0.0, kPi);
  std::uniform_real_distribution<double> mu(2.0, 120.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int r = 2 + int(rng() % 5);
    double th = ang(rng);
    Vec2 g{std::cos(th), std::sin(th)};
    Method m = (rng() & 1) ? Method::guidefill : Method::guidefill_semi_implicit;
    int level = m == Method::guidefill ? -1 : 0;
    Stencil s;
    try {
      s = make_stencil(m, r, mu(rng), g);
    } catch (const std::domain_error&) {
      --trial;  // empty restricted set (r and angle too shallow); redraw
      continue;
    }
    EquivalentStencil eq = equivalent(s);

    double mass_in = s.total_weight(), mass_out = eq.total_weight();
    c.check(std::abs(mass_in - mass_out) <= 1e-12 * mass_in, "mass");

    Vec2 m1{0, 0}, m2{0, 0};
    for (size_t i = 0; i < s.size(); ++i) m1 = m1 + s.weights[i] * s.offsets[i];
    for (size_t i = 0; i < eq.offsets.size(); ++i) {
      m2.x += eq.weights[i] * eq.offsets[i].x;
      m2.y += eq.weights[i] * eq.offsets[i].y;
    }
    c.check(std::abs(m1.x - m2.x) <= 1e-12 * (1 + std::abs(m1.x)) &&
                std::abs(m1.y - m2.y) <= 1e-12 * (1 + std::abs(m1.y)),
            "first moment");

    bool nonneg = eq.origin_weight >= 0.0;
    for (double w : eq.weights) nonneg = nonneg && w >= 0.0;
    c.check(nonneg, "non-negativity");

    // support within the dilated half ball and the r+2 ball
    std::set<IVec2> bar;
    for (int mm = -r; mm <= (level == 0 ? 0 : -1); ++mm)
      for (int nn = -r; nn <= r; ++nn) {
        int q = nn * nn + mm * mm;
        if (q == 0 || q > r * r) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            if (mm + dy <= level) bar.insert({nn + dx, mm + dy});
      }
    bool supp = true;
    auto in_bar = [&](IVec2 v) {
      return bar.count(v) == 1 &&
             v.x * v.x + v.y * v.y <= (r + 2) * (r + 2) && v.y <= level;
    };
    for (const auto& off : eq.offsets) supp = supp && in_bar(off);
    if (eq.origin_weight > 0.0) supp = supp && level == 0;
    c.check(supp, "universal support");
  }
  double secs = now_seconds(t0);
  c.check(secs < 10.0, "runtime " + std::to_string(secs) + "s");
  CHECK(c.ok);
}

// -- 2. oracle equivalence on the 64x64 symmetric problem -------------------
TEST_CASE("criterion 2: stopped-walk oracle equivalence") {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c(2);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int N = 64;
  StripProblem p = make_strip_problem(
      N, N, 6, 1, [&](double, double* out) { out[0] = uni(rng); });

  FillConfig direct_cfg;
  direct_cfg.method = Method::guidefill;
  direct_cfg.r = 3;
  direct_cfg.mu = 20.0;
  direct_cfg.guide = {std::cos(deg2rad(67)), std::sin(deg2rad(67))};
  PixelGrid direct_out = fill(p.image, p.state, direct_cfg);

  FillConfig si_cfg = direct_cfg;
  si_cfg.method = Method::guidefill_semi_implicit;
  si_cfg.guide = {std::cos(deg2rad(30)), std::sin(deg2rad(30))};
  si_cfg.solver = SolverKind::sor;
  si_cfg.sweeps = 300;
  si_cfg.solve_tol = 1e-14;
  PixelGrid si_out = fill_semi_implicit(p.image, p.state, si_cfg);

  EquivalentStencil eq_d = equivalent(
      make_stencil(direct_cfg.method, 3, direct_cfg.mu, direct_cfg.guide));
  EquivalentStencil eq_s =
      equivalent(make_stencil(si_cfg.method, 3, si_cfg.mu, si_cfg.guide));
  auto boundary = [&](IVec2 pos, double* v) {
    v[0] = p.image.at(pos.x, pos.y + p.strip - 1, 0);
  };

  std::vector<double> worst_d(N * N, 0.0), worst_s(N * N, 0.0);
  parallel_for(size_t(N) * N, [&](size_t idx) {
    int jx = int(idx % N), k = int(idx / N) + 1;
    double v;
    auto dd =
        walk::stopped_density({jx, k}, eq_d, walk::WalkMode::direct, 1e-14, N);
    walk::expected_color(dd, boundary, 1, &v);
    worst_d[idx] = std::abs(v - direct_out.at(jx, p.strip + k - 1, 0));
    auto ds = walk::stopped_density({jx, k}, eq_s,
                                    walk::WalkMode::semi_implicit, 1e-14, N);
    walk::expected_color(ds, boundary, 1, &v);
    worst_s[idx] = std::abs(v - si_out.at(jx, p.strip + k - 1, 0));
  });
  double wd = 0, ws = 0;
  for (int i = 0; i < N * N; ++i) {
    wd = std::max(wd, worst_d[i]);
    ws = std::max(ws, worst_s[i]);
  }
  c.check(wd <= 1e-10, "direct gap " + std::to_string(wd));
  c.check(ws <= 1e-10, "semi-implicit gap " + std::to_string(ws));
  double secs = now_seconds(t0);
  c.check(secs < 60.0, "runtime " + std::to_string(secs) + "s");
  CHECK(c.ok);
}

// -- 3. FillBoundary loop == damped Jacobi / SOR with omega* ----------------
TEST_CASE("criterion 3: solver equivalence on the 2-degree fixture") {
  Criterion c(3);
  StripProblem p = sine_strip(512, 8, 6, BoundaryMode::dirichlet_x);
  FillConfig cfg;
  cfg.method = Method::guidefill_semi_implicit;
  cfg.r = 3;
  cfg.mu = 1e4;
  cfg.guide = {std::cos(deg2rad(2)), std::sin(deg2rad(2))};
  std::vector<IVec2> shell = p.state.active_pixels();
  ShellSystem sys = assemble(shell, p.state, p.image, cfg);
  const int n = int(sys.unknowns.size());

  std::vector<std::vector<double>> u(1, std::vector<double>(n, 0.0));
  PixelGrid work = p.image;
  for (int it = 0; it < 12; ++it) {
    auto jac = damped_jacobi(sys, u, -1.0, {1, 0.0});
    auto ghost = ghost_sweep(shell, p.state, work, cfg, false,
                             SweepOrder::left_to_right);
    double gap = 0.0;
    for (int i = 0; i < n; ++i)
      gap = std::max(gap, std::abs(jac.u[0][i] - ghost[0][i]));
    c.check(gap <= 1e-12, "jacobi iterate " + std::to_string(it));
    u = jac.u;
  }

  u.assign(1, std::vector<double>(n, 0.0));
  work = p.image;
  for (int it = 0; it < 8; ++it) {
    auto ref = sor(sys, u, -1.0, SweepOrder::left_to_right, {1, 0.0});
    auto ghost = ghost_sweep(shell, p.state, work, cfg, true,
                             SweepOrder::left_to_right);
    double gap = 0.0;
    for (int i = 0; i < n; ++i)
      gap = std::max(gap, std::abs(ref.u[0][i] - ghost[0][i]));
    c.check(gap <= 1e-12, "sor sweep " + std::to_string(it));
    u = ref.u;
  }
  CHECK(c.ok);
}

// -- 4. measured solver rates vs the closed-form norms ----------------------
TEST_CASE("criterion 4: solver-rate bounds over the angle sweep") {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c(4);
  double max_g_theory = 0.0;
  for (int deg = 1; deg <= 179; ++deg) {
    double th = deg2rad(deg);
    StripProblem p = sine_strip(512, 8, 6, BoundaryMode::dirichlet_x);
    FillConfig cfg;
    cfg.method = Method::guidefill_semi_implicit;
    cfg.r = 3;
    cfg.mu = 1e4;
    cfg.guide = {std::cos(th), std::sin(th)};
    ShellSystem sys = assemble(p.state.active_pixels(), p.state, p.image, cfg);
    const int n = int(sys.unknowns.size());
    std::vector<std::vector<double>> u0(1, std::vector<double>(n, 0.0));
    SweepOrder order = std::cos(th) >= 0 ? SweepOrder::left_to_right
                                         : SweepOrder::right_to_left;
    auto exact = sor(sys, u0, 1.0, order, {400, 1e-15});
    theory::SolverNorms nb = theory::solver_norms(th, 3, -1.0);
    max_g_theory = std::max(max_g_theory, nb.G_norm);

    auto jac = damped_jacobi(sys, u0, -1.0, {25, 0.0}, &exact.u);
    double rj = measure_rate(significant_prefix(jac.error_history));
    c.check(rj <= nb.J_norm + 1e-6,
            "jacobi at " + std::to_string(deg) + " deg");
    auto s = sor(sys, u0, -1.0, order, {6, 0.0}, &exact.u);
    double rs = measure_rate(significant_prefix(s.error_history));
    c.check(rs <= nb.G_norm + 1e-6, "sor at " + std::to_string(deg) + " deg");
  }
  c.check(max_g_theory <= 0.06,
          "max ||G_omega*|| = " + std::to_string(max_g_theory));
  double secs = now_seconds(t0);
  c.check(secs < 300.0, "runtime " + std::to_string(secs) + "s");
  CHECK(c.ok);
}

// -- 5. the r=3 angular spectrum against Example 1 ---------------------------
TEST_CASE("criterion 5: angular spectrum closed forms") {
  Criterion c(5);
  std::vector<IVec2> bm;
  for (const auto& v : restrict_half_plane(
           make_neighborhood(NeighborhoodKind::ball, 3, {0, 1}), -1))
    bm.push_back({int(v.x), int(v.y)});
  theory::AngularSpectrum sp = theory::angular_spectrum(bm);
  const std::vector<double> angles{
      std::atan(0.5),           kPi / 4,       std::atan(2.0), kPi / 2,
      kPi / 2 + std::atan(0.5), 3 * kPi / 4,   kPi / 2 + std::atan(2.0)};
  c.check(sp.angles.size() == angles.size(), "angle count");
  for (size_t i = 0; i < angles.size() && i < sp.angles.size(); ++i)
    c.check(std::abs(sp.angles[i] - angles[i]) <= 1e-12, "angle value");
  const std::vector<double> trans{std::atan(2.0 / 3.0), std::atan(1.5),
                                  std::atan(3.0)};
  for (size_t i = 0; i < trans.size(); ++i)
    c.check(std::abs(sp.transitions[i] - trans[i]) <= 1e-12, "transition");
  CHECK(c.ok);
}

// -- 6. kinking curves from the dot experiment -------------------------------
TEST_CASE("criterion 6: dot-experiment kinking curves") {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c(6);
  std::vector<double> thetas;
  for (double t = 5; t <= 175; t += 5) thetas.push_back(t);

  for (int r : {3, 5}) {
    // transition angles of b-_r (plus their mirror images)
    std::vector<IVec2> bm;
    for (const auto& v : restrict_half_plane(
             make_neighborhood(NeighborhoodKind::ball, r, {0, 1}), -1))
      bm.push_back({int(v.x), int(v.y)});
    theory::AngularSpectrum sp = theory::angular_spectrum(bm);

    DotCurve ct = exp_dot(Method::coherence_transport, r, 40.0, thetas, 512);
    for (const auto& row : ct.rows) {
      double dist = 180.0;
      for (double tr : sp.transitions)
        dist = std::min(dist, std::abs(row.theta_deg - rad2deg(tr)));
      if (dist <= 3.0) continue;
      c.check(!std::isnan(row.measured_deg) &&
                  std::abs(row.measured_deg - row.theory_deg) <= 2.0,
              "ct r=" + std::to_string(r) + " theta " +
                  std::to_string(row.theta_deg));
    }

    DotCurve gf = exp_dot(Method::guidefill, r, 40.0, thetas, 512);
    double tc = rad2deg(theory::critical_angle(r));
    for (const auto& row : gf.rows) {
      if (row.theta_deg < tc + 2.0 || row.theta_deg > 180.0 - tc - 2.0)
        continue;
      c.check(!std::isnan(row.measured_deg) &&
                  std::abs(row.measured_deg - row.theta_deg) <= 1.0,
              "guidefill r=" + std::to_string(r) + " theta " +
                  std::to_string(row.theta_deg));
    }

    DotCurve si =
        exp_dot(Method::guidefill_semi_implicit, r, 40.0, thetas, 512);
    for (const auto& row : si.rows) {
      c.check(!std::isnan(row.measured_deg) &&
                  std::abs(row.measured_deg - row.theta_deg) <= 1.0,
              "semi-implicit r=" + std::to_string(r) + " theta " +
                  std::to_string(row.theta_deg));
    }
  }
  double secs = now_seconds(t0);
  c.check(secs < 600.0, "runtime " + std::to_string(secs) + "s");
  CHECK(c.ok);
}

// -- 7. the 2-degree line: semi-implicit connects, the direct form kinks ----
namespace {

// a 2-degree band crossing the top of a dirichlet data strip; its
// characteristics trace back along the band into the strip
struct ShallowLine {
  PixelGrid image;
  FillState state;
  int strip;
  double y0, tan_th;
  int thickness;
};

ShallowLine make_shallow_line() {
  const int W = 800, H = 440, strip = 56;
  ShallowLine f{PixelGrid(W, H, 1, 1.0, BoundaryMode::dirichlet_x),
                FillState(W, H, BoundaryMode::dirichlet_x),
                strip, 40.0, std::tan(deg2rad(2.0)), 20};
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double d = y - (f.y0 + f.tan_th * x);
      if (d >= 0 && d <= f.thickness) f.image.at(x, y, 0) = 1.0;
    }
  for (int y = strip; y < H; ++y)
    for (int x = 0; x < W; ++x) f.state.set_unfilled(x, y);
  f.state.refresh_active();
  return f;
}

// transported-mass orientation: row centroids over rows with at least 10%
// of the peak row mass, skipping the 5 rows nearest the boundary
double strip_orientation_deg(const PixelGrid& img, int strip) {
  std::vector<double> mass(img.height, 0.0), cent(img.height, 0.0);
  double maxm = 0;
  for (int y = strip; y < img.height; ++y) {
    double m = 0, cx = 0;
    for (int x = 0; x < img.width; ++x) {
      m += img.at(x, y, 0);
      cx += img.at(x, y, 0) * x;
    }
    mass[y] = m;
    cent[y] = m > 0 ? cx / m : 0;
    maxm = std::max(maxm, m);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int y = strip + 5; y < img.height; ++y) {
    if (mass[y] < 0.1 * maxm) continue;
    sx += y;
    sy += cent[y];
    sxx += double(y) * y;
    sxy += double(y) * cent[y];
    ++n;
  }
  if (n < 8) return -1.0;
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rad2deg(std::atan2(1.0, std::abs(b)));
}

}  // namespace

TEST_CASE("criterion 7: shallow-angle capability") {
  Criterion c(7);
  ShallowLine f = make_shallow_line();

  FillConfig cfg;
  cfg.method = Method::guidefill_semi_implicit;
  cfg.r = 3;
  cfg.mu = 100.0;
  cfg.guide = {std::cos(deg2rad(2)), std::sin(deg2rad(2))};
  cfg.solver = SolverKind::sor;
  cfg.sweeps = 5;
  PixelGrid si = fill_semi_implicit(f.image, f.state, cfg);
  // the band sits fully inside the unknown region beyond x = 500
  for (int x0 = 500; x0 + 48 <= f.image.width; x0 += 48) {
    double amp = 0;
    for (int x = x0; x < x0 + 48; ++x)
      for (int y = f.strip; y < f.image.height; ++y) {
        double d = y - (f.y0 + f.tan_th * x);
        if (d >= -2 && d <= f.thickness + 2) amp = std::max(amp, si.at(x, y, 0));
      }
    c.check(amp >= 0.9, "semi-implicit amplitude " + std::to_string(amp) +
                            " near column " + std::to_string(x0));
  }

  FillConfig d = cfg;
  d.method = Method::guidefill;
  PixelGrid gf = fill(f.image, f.state, d);
  double kink = strip_orientation_deg(gf, f.strip);
  double threshold = 2.0 + rad2deg(theory::guidefill_jump(3)) / 2.0;
  c.check(kink >= threshold, "kink " + std::to_string(kink) + " deg < " +
                                 std::to_string(threshold));
  CHECK(c.ok);
}

// -- 8. desk-scale convergence rates against Table 1 columns ----------------
TEST_CASE("criterion 8: convergence-rate spot checks") {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c(8);
  struct Cfg {
    RateConfig rc;
    double col9, col11;  // the paper's R columns at h = 2^-9 and 2^-11
    const char* name;
  };
  std::vector<Cfg> cfgs;
  {
    RateConfig a;
    a.mu = 10;
    a.s = 2;
    a.s_prime = 1;
    a.p = 1;
    cfgs.push_back({a, 0.932, 0.95, "s2-s'1-mu10-p1"});
    RateConfig b;
    b.mu = 10;
    b.s = 0.5;
    b.s_prime = 0.5;
    b.p = 1;
    cfgs.push_back({b, 0.408, 0.336, "s.5-s'.5-mu10-p1"});
    RateConfig d;  // degenerate row, L2 column
    d.mu = 50;
    d.s = 1;
    d.s_prime = 1;
    d.p = 2;
    cfgs.push_back({d, 0.94, 0.946, "s1-s'1-mu50-p2"});
    RateConfig e;  // smooth guide field, L2 column
    e.smooth_guide = true;
    e.mu = 50;
    e.s = 2;
    e.s_prime = 2;
    e.p = 2;
    cfgs.push_back({e, 0.964, 0.984, "smooth-s2-s'2-p2"});
  }
  std::vector<double> hs;
  for (int n = 7; n <= 11; ++n) hs.push_back(std::exp2(-n));
  for (const auto& cfg : cfgs) {
    RateReport rep = exp_rates(cfg.rc, hs);
    // R_h entries sit at h = 2^-8 .. 2^-11.
    // Known miss: the first configuration measures R(2^-9) near 0.84 against
    // the reference column 0.932. Its transient constant depends on
    // sub-pixel measurement conventions the reference pipeline never
    // published (registration scans, series caps, and norm choices were all
    // ruled out); the check stays strict rather than loosened.
    double r9 = rep.R_h[1], r11 = rep.R_h[3];
    c.check(std::abs(r9 - cfg.col9) <= 0.05,
            std::string(cfg.name) + " R(2^-9) " + std::to_string(r9) +
                " vs " + std::to_string(cfg.col9));
    c.check(std::abs(r11 - cfg.col11) <= 0.05,
            std::string(cfg.name) + " R(2^-11) " + std::to_string(r11) +
                " vs " + std::to_string(cfg.col11));
    double d1 = std::abs(rep.R_h[1] - rep.alpha_expected);
    double d2 = std::abs(rep.R_h[2] - rep.alpha_expected);
    double d3 = std::abs(rep.R_h[3] - rep.alpha_expected);
    c.check(d1 >= d2 - 1e-9 && d2 >= d3 - 1e-9,
            std::string(cfg.name) + " |R-alpha| not shrinking");
  }
  double secs = now_seconds(t0);
  c.check(secs < 1800.0, "runtime " + std::to_string(secs) + "s");
  CHECK(c.ok);
}

// -- 9. distance to the fixed-ratio vs the Marz limit ------------------------
TEST_CASE("criterion 9: limit comparison") {
  Criterion c(9);
  std::vector<int> rs{3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  LimitCurve curve = exp_limits(20.0, 10.0, 2.0, 0.0, 1.0, 1.0 / 1024, rs);
  std::vector<double> ratio;
  for (const auto& row : curve.rows) ratio.push_back(row.err_u / row.err_marz);
  // regression baseline: the fixed-ratio limit stays close at this h
  c.check(curve.rows[0].err_u < 0.1, "err_u at r=3 too large");
  // Known miss at r=3: the half-disk integral direction (30.235 deg) nearly
  // coincides with the r=3 center-of-mass direction (30.035 deg) at mu=10,
  // theta=20 deg, so u and u_marz are almost the same transport there and
  // the ratio is structurally ~0.67. The check stays strict.
  for (size_t i = 0; i < 3; ++i)
    c.check(ratio[i] < 0.5, "r=" + std::to_string(rs[i]) + " ratio " +
                                std::to_string(ratio[i]));
  // trend toward 1: positive slope and a higher tail than head
  double n = double(ratio.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < ratio.size(); ++i) {
    sx += double(i);
    sy += ratio[i];
    sxx += double(i) * i;
    sxy += double(i) * ratio[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double head = (ratio[0] + ratio[1] + ratio[2]) / 3.0;
  double tail = (ratio[n - 3] + ratio[n - 2] + ratio[n - 1]) / 3.0;
  c.check(slope > 0.0 && tail > head, "trend toward 1");
  CHECK(c.ok);
}

// -- 10. Conjecture-1 blur predictions ---------------------------------------
TEST_CASE("criterion 10: blur prediction") {
  Criterion c(10);
  BlurReport f14 = exp_blur(BlurScenario::fig14, {0.1, 1.0});
  for (const auto& s : f14.slices)
    c.check(s.max_abs_dev <= 2.0 / 255.0,
            "fig14 slice y=" + std::to_string(s.y) + " dev " +
                std::to_string(s.max_abs_dev * 255) + "/255");

  double t = std::tan(deg2rad(10.0));
  BlurReport f16 = exp_blur(BlurScenario::fig16, {t, 2 * t, 3 * t});
  for (const auto& s : f16.slices)
    c.check(s.max_abs_dev <= 3.0 / 255.0,
            "fig16 slice y=" + std::to_string(s.y) + " dev " +
                std::to_string(s.max_abs_dev * 255) + "/255");

  double dev = blur_degenerate_control();
  c.check(dev <= 1.0 / 255.0,
          "degenerate control dev " + std::to_string(dev * 255) + "/255");
  CHECK(c.ok);
}

// -- 11. the stability band ----------------------------------------------------
TEST_CASE("criterion 11: stability property") {
  Criterion c(11);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int N = 40;
    PixelGrid img(N, N, 1);
    for (auto& v : img.data) v = uni(rng);
    FillState s(N, N,
                trial % 2 ? BoundaryMode::periodic_x : BoundaryMode::dirichlet_x);
    int cx = 10 + int(rng() % 20), cy = 10 + int(rng() % 20);
    int rad = 4 + int(rng() % 9);
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= rad * rad)
          s.set_unfilled(x, y);
    s.refresh_active();
    if (s.unfilled_count == 0) continue;

    FillConfig cfg;
    cfg.r = 3;
    cfg.mu = 5.0 + 60.0 * uni(rng);
    double th = (0.02 + 0.96 * uni(rng)) * kPi;
    cfg.guide = {std::cos(th), std::sin(th)};

    // band: known pixels within r+2 of some unfilled pixel
    double lo = 1e9, hi = -1e9;
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x) {
        if (s.at(x, y) == PixelStatus::known) continue;
        for (int dy = -5; dy <= 5; ++dy)
          for (int dx = -5; dx <= 5; ++dx) {
            int nx = x + dx, ny = y + dy;
            if (ny < 0 || ny >= N) continue;
            if (nx < 0 || nx >= N) {
              if (s.boundary_mode != BoundaryMode::periodic_x) continue;
              nx = (nx + N) % N;
            }
            if (s.at(nx, ny) == PixelStatus::known) {
              lo = std::min(lo, img.at(nx, ny, 0));
              hi = std::max(hi, img.at(nx, ny, 0));
            }
          }
      }

    PixelGrid out;
    switch (trial % 3) {
      case 0:
        cfg.method = Method::coherence_transport;
        out = fill(img, s, cfg);
        break;
      case 1:
        cfg.method = Method::guidefill;
        out = fill(img, s, cfg);
        break;
      default:
        cfg.method = Method::guidefill_semi_implicit;
        cfg.solver = SolverKind::sor;
        cfg.sweeps = 8;
        out = fill_semi_implicit(img, s, cfg);
        break;
    }
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x)
        if (s.at(x, y) != PixelStatus::known) {
          c.check(out.at(x, y, 0) >= lo - 1e-12 &&
                      out.at(x, y, 0) <= hi + 1e-12,
                  "band violated at trial " + std::to_string(trial));
        }
  }

  // Telea violates the band before clamping (the recorded expected failure)
  {
    PixelGrid img(48, 48, 1);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 48; ++x)
        img.at(x, y, 0) = (x >= 22 && x < 26) ? 1.0 : 0.05;
    FillState s(48, 48, BoundaryMode::dirichlet_x);
    for (int y = 16; y < 32; ++y)
      for (int x = 12; x < 36; ++x) s.set_unfilled(x, y);
    s.refresh_active();
    FillConfig cfg;
    cfg.method = Method::telea;
    cfg.r = 4;
    cfg.telea_clamp = false;
    PixelGrid raw = fill_telea(img, s, cfg);
    bool violated = false;
    for (int y = 16; y < 32; ++y)
      for (int x = 12; x < 36; ++x)
        violated = violated || raw.at(x, y, 0) > 1.0 + 1e-9 ||
                   raw.at(x, y, 0) < 0.05 - 1e-9;
    c.check(violated, "telea failed to violate the band pre-clamp");
  }
  CHECK(c.ok);
}

}  // TEST_SUITE
