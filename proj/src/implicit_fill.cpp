#include "shellfill/implicit_fill.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "shellfill/ghost.hpp"
#include "shellfill/parallel.hpp"
#include "shellfill/stencil_cache.hpp"

namespace shellfill {

namespace {

struct ShellIndex {
  const FillState* state;
  std::vector<long> slot;

  ShellIndex(const std::vector<IVec2>& shell, const FillState& s) : state(&s) {
    slot.assign(size_t(s.width) * s.height, -1);
    for (size_t i = 0; i < shell.size(); ++i)
      slot[s.idx(shell[i].x, shell[i].y)] = long(i);
  }

  long find(IVec2 p) const {
    if (p.y < 0 || p.y >= state->height) return -1;
    int x = p.x;
    if (x < 0 || x >= state->width) {
      if (state->boundary_mode != BoundaryMode::periodic_x) return -1;
      x = (x % state->width + state->width) % state->width;
    }
    return slot[state->idx(x, p.y)];
  }
};

Vec2 guide_at(const FillConfig& cfg, int x, int y) {
  return cfg.guide_field ? cfg.guide_field(x, y) : cfg.guide;
}

// support categories during assembly
enum class Cat { known, self, shell, zero, dead };

Cat categorize(const FillState& state, const ShellIndex& si, IVec2 origin,
               IVec2 p, long& slot_out) {
  slot_out = -1;
  if (p.x == origin.x && p.y == origin.y) return Cat::self;
  if (state.known(p.x, p.y)) return Cat::known;
  long s = si.find(p);
  if (s >= 0) {
    slot_out = s;
    return Cat::shell;
  }
  // x out of range under dirichlet counts as a value-0 known column
  if ((p.x < 0 || p.x >= state.width) &&
      state.boundary_mode == BoundaryMode::dirichlet_x && p.y >= 0 &&
      p.y < state.height)
    return Cat::zero;
  return Cat::dead;
}

}  // namespace

ShellSystem assemble(const std::vector<IVec2>& shell, const FillState& state,
                     const PixelGrid& image, const FillConfig& cfg) {
  if (shell.empty()) throw std::invalid_argument("assemble: empty shell");
  ShellSystem sys;
  sys.unknowns = shell;
  std::sort(sys.unknowns.begin(), sys.unknowns.end(),
            [](const IVec2& a, const IVec2& b) {
              return a.x != b.x ? a.x < b.x : a.y < b.y;
            });
  ShellIndex si(sys.unknowns, state);
  const int n = int(sys.unknowns.size());
  const int C = image.channels;
  sys.channels = C;
  sys.links.assign(n, {});
  sys.total_W.assign(n, 0.0);
  sys.origin_w.assign(n, 0.0);
  sys.rhs.assign(C, std::vector<double>(n, 0.0));

  StencilCache cache(cfg.method, cfg.r, cfg.mu);
  for (int i = 0; i < n; ++i) {
    const IVec2 p = sys.unknowns[i];
    const Stencil& sten = cache.get(guide_at(cfg, p.x, p.y));
    std::unordered_map<int, double> row;
    for (size_t k = 0; k < sten.size(); ++k) {
      GhostSupport gs = ghost_support(p.x, p.y, sten.offsets[k]);
      // usable iff every support is known, self, same-shell, or a dirichlet
      // value-0 column
      Cat cats[4];
      long slots[4];
      bool usable = true;
      for (int c = 0; c < gs.count && usable; ++c) {
        cats[c] = categorize(state, si, p, gs.pos[c], slots[c]);
        usable = cats[c] != Cat::dead;
      }
      if (!usable) continue;
      const double w = sten.weights[k];
      sys.total_W[i] += w;
      for (int c = 0; c < gs.count; ++c) {
        double part = w * gs.lambda[c];
        switch (cats[c]) {
          case Cat::self:
            sys.origin_w[i] += part;
            break;
          case Cat::shell:
            row[int(slots[c])] += part;
            break;
          case Cat::known: {
            int x = gs.pos[c].x;
            image.wrap_x(x);
            for (int ch = 0; ch < C; ++ch)
              sys.rhs[ch][i] += part * image.at(x, gs.pos[c].y, ch);
            break;
          }
          case Cat::zero:
          case Cat::dead:
            break;  // contributes mass only
        }
      }
    }
    if (sys.total_W[i] <= 0.0)
      throw std::domain_error("assemble: degenerate row (zero usable mass)");
    for (int ch = 0; ch < C; ++ch) sys.rhs[ch][i] /= sys.total_W[i];
    sys.links[i].reserve(row.size());
    for (const auto& [j, w] : row) sys.links[i].push_back({j, w});
    std::sort(sys.links[i].begin(), sys.links[i].end(),
              [](const ShellSystem::Link& a, const ShellSystem::Link& b) {
                return a.j < b.j;
              });
  }
  return sys;
}

std::vector<double> omega_star(const ShellSystem& sys) {
  std::vector<double> out(sys.unknowns.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = 1.0 - sys.origin_w[i] / sys.total_W[i];
  return out;
}

namespace {

double residual_inf(const ShellSystem& sys,
                    const std::vector<std::vector<double>>& u) {
  double r = 0.0;
  for (int ch = 0; ch < sys.channels; ++ch)
    for (size_t i = 0; i < sys.unknowns.size(); ++i) {
      double s = sys.diag(int(i)) * u[ch][i] - sys.rhs[ch][i];
      for (const auto& l : sys.links[i])
        s -= (l.w / sys.total_W[i]) * u[ch][l.j];
      r = std::max(r, std::abs(s));
    }
  return r;
}

double error_inf(const std::vector<std::vector<double>>& u,
                 const std::vector<std::vector<double>>& ref) {
  double e = 0.0;
  for (size_t ch = 0; ch < u.size(); ++ch)
    for (size_t i = 0; i < u[ch].size(); ++i)
      e = std::max(e, std::abs(u[ch][i] - ref[ch][i]));
  return e;
}

std::vector<double> resolve_omega(const ShellSystem& sys, double omega) {
  if (omega > 0.0)
    return std::vector<double>(sys.unknowns.size(), omega);
  return omega_star(sys);
}

void record(SolveResult& res, const ShellSystem& sys,
            const std::vector<std::vector<double>>* reference) {
  res.residual_history.push_back(residual_inf(sys, res.u));
  if (reference) res.error_history.push_back(error_inf(res.u, *reference));
}

bool check_divergence(const std::vector<double>& hist) {
  if (hist.size() < 11) return false;
  for (size_t k = hist.size() - 10; k < hist.size(); ++k)
    if (hist[k] <= hist[k - 1]) return false;
  return true;
}

}  // namespace

SolveResult damped_jacobi(const ShellSystem& sys,
                          const std::vector<std::vector<double>>& u0,
                          double omega, SolveStop stop,
                          const std::vector<std::vector<double>>* reference) {
  if (omega > 0.0 && omega >= 2.0)
    throw std::invalid_argument("damped_jacobi: omega in (0,2) required");
  const int n = int(sys.unknowns.size());
  std::vector<double> om = resolve_omega(sys, omega);
  SolveResult res;
  res.u = u0;
  record(res, sys, reference);
  std::vector<double> next(n);
  for (int sweep = 0; sweep < stop.max_sweeps; ++sweep) {
    for (int ch = 0; ch < sys.channels; ++ch) {
      auto& u = res.u[ch];
      for (int i = 0; i < n; ++i) {
        double s = sys.rhs[ch][i];
        for (const auto& l : sys.links[i])
          s += (l.w / sys.total_W[i]) * u[l.j];
        next[i] = (1.0 - om[i]) * u[i] + om[i] * s / sys.diag(i);
      }
      u.assign(next.begin(), next.end());
    }
    ++res.sweeps;
    record(res, sys, reference);
    if (stop.tol_residual > 0.0 && res.residual_history.back() < stop.tol_residual)
      break;
  }
  res.diverged = check_divergence(reference ? res.error_history
                                            : res.residual_history);
  return res;
}

SolveResult sor(const ShellSystem& sys,
                const std::vector<std::vector<double>>& u0, double omega,
                SweepOrder order, SolveStop stop,
                const std::vector<std::vector<double>>* reference) {
  if (omega > 0.0 && omega > 1.0)
    throw std::invalid_argument("sor: omega in (0,1] is the analyzed range");
  const int n = int(sys.unknowns.size());
  std::vector<double> om = resolve_omega(sys, omega);
  SolveResult res;
  res.u = u0;
  record(res, sys, reference);
  for (int sweep = 0; sweep < stop.max_sweeps; ++sweep) {
    for (int ch = 0; ch < sys.channels; ++ch) {
      auto& u = res.u[ch];
      for (int k = 0; k < n; ++k) {
        int i = order == SweepOrder::left_to_right ? k : n - 1 - k;
        double s = sys.rhs[ch][i];
        for (const auto& l : sys.links[i])
          s += (l.w / sys.total_W[i]) * u[l.j];
        u[i] = (1.0 - om[i]) * u[i] + om[i] * s / sys.diag(i);
      }
    }
    ++res.sweeps;
    record(res, sys, reference);
    if (stop.tol_residual > 0.0 && res.residual_history.back() < stop.tol_residual)
      break;
  }
  res.diverged = check_divergence(reference ? res.error_history
                                            : res.residual_history);
  return res;
}

std::vector<std::vector<double>> ghost_sweep(
    const std::vector<IVec2>& shell, const FillState& state, PixelGrid& work,
    const FillConfig& cfg, bool sequential, SweepOrder order) {
  std::vector<IVec2> ordered = shell;
  std::sort(ordered.begin(), ordered.end(), [](const IVec2& a, const IVec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  if (order == SweepOrder::right_to_left)
    std::reverse(ordered.begin(), ordered.end());
  ShellIndex si(ordered, state);
  StencilCache cache(cfg.method, cfg.r, cfg.mu);
  const int C = work.channels;

  PixelGrid snapshot = work;  // parallel mode reads the previous iterate
  const PixelGrid& src = sequential ? work : snapshot;

  std::vector<std::vector<double>> out(C,
                                       std::vector<double>(ordered.size(), 0.0));
  for (size_t k = 0; k < ordered.size(); ++k) {
    const IVec2 p = ordered[k];
    const Stencil& sten = cache.get(guide_at(cfg, p.x, p.y));
    double wsum = 0.0;
    std::vector<double> acc(C, 0.0);
    for (size_t m = 0; m < sten.size(); ++m) {
      GhostSupport gs = ghost_support(p.x, p.y, sten.offsets[m]);
      bool usable = true;
      for (int c = 0; c < gs.count && usable; ++c) {
        long slot;
        Cat cat = categorize(state, si, {-1000000, -1000000}, gs.pos[c], slot);
        usable = cat != Cat::dead;
      }
      if (!usable) continue;
      wsum += sten.weights[m];
      for (int c = 0; c < C; ++c)
        acc[c] += sten.weights[m] * ghost_value(src, gs, c);
    }
    if (wsum <= 0.0) throw std::domain_error("ghost_sweep: degenerate pixel");
    for (int c = 0; c < C; ++c) {
      double v = acc[c] / wsum;
      out[c][k] = v;
      if (sequential) work.at(p.x, p.y, c) = v;
    }
  }
  if (!sequential)
    for (size_t k = 0; k < ordered.size(); ++k)
      for (int c = 0; c < C; ++c) work.at(ordered[k].x, ordered[k].y, c) = out[c][k];
  return out;
}

double measure_rate(const std::vector<double>& history) {
  if (history.size() < 2)
    throw std::invalid_argument("measure_rate: need at least two entries");
  if (history.front() == 0.0)
    throw std::domain_error("measure_rate: zero initial error");
  double n = double(history.size() - 1);
  return std::pow(history.back() / history.front(), 1.0 / n);
}

std::string history_csv(const SolveResult& result) {
  std::string out = "sweep,error_inf,residual_inf\n";
  for (size_t i = 0; i < result.residual_history.size(); ++i) {
    char buf[96];
    if (i < result.error_history.size()) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i,
                    result.error_history[i], result.residual_history[i]);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,,%.17g\n", i,
                    result.residual_history[i]);
    }
    out += buf;
  }
  return out;
}

std::vector<double> significant_prefix(const std::vector<double>& history,
                                       double rel_floor, double abs_floor) {
  std::vector<double> out;
  if (history.empty()) return out;
  double floor = std::max(history.front() * rel_floor, abs_floor);
  out.push_back(history.front());
  for (size_t i = 1; i < history.size(); ++i) {
    out.push_back(history[i]);
    if (history[i] <= floor) break;  // keep the first stalled entry, drop rest
  }
  return out;
}

PixelGrid fill_semi_implicit(const PixelGrid& image, FillState state,
                             const FillConfig& cfg, FillStats* stats,
                             int threads) {
  if (cfg.ready.policy != ReadyPolicy::onion &&
      (cfg.ready.threshold_c <= 0.0 || cfg.ready.threshold_c >= 1.0))
    throw std::invalid_argument(
        "fill_semi_implicit: threshold_c must lie in (0,1)");
  auto t0 = std::chrono::steady_clock::now();
  PixelGrid out = image;
  for (int y = 0; y < state.height; ++y)
    for (int x = 0; x < state.width; ++x)
      if (state.at(x, y) != PixelStatus::known)
        for (int c = 0; c < out.channels; ++c) out.at(x, y, c) = 0.0;

  StencilCache cache(cfg.method, cfg.r, cfg.mu);
  FillStats st;
  const int C = out.channels;

  while (state.unfilled_count > 0) {
    std::vector<IVec2> active = state.active_pixels();
    if (active.empty()) throw FillStall(state.shell_index);

    std::vector<IVec2> ready;
    switch (cfg.ready.policy) {
      case ReadyPolicy::onion:
        ready = active;
        break;
      case ReadyPolicy::confidence: {
        for (const auto& p : active)
          if (confidence(p, state, cache.get(guide_at(cfg, p.x, p.y))) >
              cfg.ready.threshold_c)
            ready.push_back(p);
        break;
      }
      case ReadyPolicy::coupled:
        ready = coupled_ready(
            active, state,
            [&](IVec2 p) -> const Stencil& {
              return cache.get(guide_at(cfg, p.x, p.y));
            },
            cfg.ready);
        break;
    }
    if (ready.empty()) {
      if (!cfg.stall_fallback) throw FillStall(state.shell_index);
      ready = active;
      ++st.stall_fallbacks;
    }

    ShellSystem sys = assemble(ready, state, out, cfg);
    const int n = int(sys.unknowns.size());

    // initial iterate: the direct FillBoundary pass (known mass only),
    // leaving pixels with no usable known neighbor at 0
    std::vector<std::vector<double>> u0(C, std::vector<double>(n, 0.0));
    parallel_for(
        size_t(n),
        [&](size_t i) {
          const IVec2 p = sys.unknowns[i];
          const Stencil& sten = cache.get(guide_at(cfg, p.x, p.y));
          double wsum = 0.0;
          std::vector<double> acc(C, 0.0);
          for (size_t k = 0; k < sten.size(); ++k) {
            GhostSupport gs = ghost_support(p.x, p.y, sten.offsets[k]);
            if (!ghost_usable(state, gs)) continue;
            wsum += sten.weights[k];
            for (int c = 0; c < C; ++c)
              acc[c] += sten.weights[k] * ghost_value(out, gs, c);
          }
          if (wsum > 0.0)
            for (int c = 0; c < C; ++c) u0[c][i] = acc[c] / wsum;
        },
        threads);

    SolveStop stop{cfg.sweeps, cfg.solve_tol};
    SolveResult sol;
    if (cfg.solver == SolverKind::jacobi) {
      sol = damped_jacobi(sys, u0, cfg.omega, stop);
    } else {
      Vec2 g = guide_at(cfg, sys.unknowns[0].x, sys.unknowns[0].y);
      SweepOrder order =
          g.x >= 0 ? SweepOrder::left_to_right : SweepOrder::right_to_left;
      sol = sor(sys, u0, cfg.omega, order, stop);
    }
    st.max_sweeps = std::max(st.max_sweeps, sol.sweeps);
    st.worst_residual = std::max(st.worst_residual, sol.residual_history.back());

    for (int i = 0; i < n; ++i)
      for (int c = 0; c < C; ++c)
        out.at(sys.unknowns[i].x, sys.unknowns[i].y, c) = sol.u[c][i];
    st.pixels_filled += n;
    advance(state, sys.unknowns);
    ++st.shells;
  }

  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return out;
}

}  // namespace shellfill
