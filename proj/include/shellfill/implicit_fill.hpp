#pragma once

#include <vector>

#include "shellfill/direct_fill.hpp"
#include "shellfill/lattice.hpp"
#include "shellfill/stencil.hpp"

namespace shellfill {

enum class SweepOrder { left_to_right, right_to_left };

/// One shell's linear system L u = f in leak-weight form. Row i reads
///   (1 - w00_i/W_i) u_i - sum_j (c_ij/W_i) u_j = f_i,
/// where c_ij are the equivalent weights landing on same-shell unknowns.
struct ShellSystem {
  std::vector<IVec2> unknowns;  // shell pixels, ordered left to right
  struct Link {
    int j;
    double w;  // unnormalized equivalent weight
  };
  std::vector<std::vector<Link>> links;  // per unknown
  std::vector<double> total_W;           // usable stencil mass per unknown
  std::vector<double> origin_w;          // w~(0,0) per unknown
  std::vector<std::vector<double>> rhs;  // [channel][unknown], already / W
  int channels = 1;

  double diag(int i) const { return 1.0 - origin_w[i] / total_W[i]; }
};

struct SolveStop {
  int max_sweeps = 100;
  double tol_residual = 0.0;  // > 0: stop once ||Lu-f||_inf drops below
};

struct SolveResult {
  std::vector<std::vector<double>> u;  // [channel][unknown]
  std::vector<double> error_history;   // ||u - reference||_inf per iterate
  std::vector<double> residual_history;
  int sweeps = 0;
  bool diverged = false;
};

/// Builds the shell system from the usable part of each pixel's neighborhood
/// stencil. Ghost offsets must be supported by known or same-shell pixels to
/// participate; under dirichlet_x, out-of-range columns count as known with
/// value 0 (couplings beyond either edge are truncated).
ShellSystem assemble(const std::vector<IVec2>& shell, const FillState& state,
                     const PixelGrid& image, const FillConfig& cfg);

/// omega* = 1 - w00/W per unknown.
std::vector<double> omega_star(const ShellSystem& sys);

SolveResult damped_jacobi(const ShellSystem& sys,
                          const std::vector<std::vector<double>>& u0,
                          double omega, SolveStop stop,
                          const std::vector<std::vector<double>>* reference = nullptr);

SolveResult sor(const ShellSystem& sys,
                const std::vector<std::vector<double>>& u0, double omega,
                SweepOrder order, SolveStop stop,
                const std::vector<std::vector<double>>* reference = nullptr);

/// One pass of the semi-implicit FillBoundary subroutine over the shell with
/// the current iterate treated as known: parallel (simultaneous) updates
/// reproduce damped Jacobi with omega*, sequential in-place updates reproduce
/// SOR with omega*.
std::vector<std::vector<double>> ghost_sweep(
    const std::vector<IVec2>& shell, const FillState& state, PixelGrid& work,
    const FillConfig& cfg, bool sequential, SweepOrder order);

/// R(e) = (||e_n|| / ||e_0||)^(1/n) from an error history.
double measure_rate(const std::vector<double>& history);

/// Prefix of an error history that is still above the floating-point floor
/// (relative to the initial error). Fast solvers bottom out within a few
/// sweeps; measuring the rate across the stalled tail only reports the
/// round-off plateau.
std::vector<double> significant_prefix(const std::vector<double>& history,
                                       double rel_floor = 1e-8,
                                       double abs_floor = 1e-14);

/// Iterate-history dump: CSV rows `sweep,error_inf,residual_inf` (error
/// column is empty when no reference was supplied).
std::string history_csv(const SolveResult& result);

/// The semi-implicit shell fill: coupled readiness, per-shell assembly, and
/// a damped-Jacobi or SOR solve started from the direct-method pass.
PixelGrid fill_semi_implicit(const PixelGrid& image, FillState state,
                             const FillConfig& cfg, FillStats* stats = nullptr,
                             int threads = 0);

}  // namespace shellfill
