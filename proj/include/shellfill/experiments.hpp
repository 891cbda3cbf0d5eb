#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shellfill/direct_fill.hpp"
#include "shellfill/implicit_fill.hpp"
#include "shellfill/lattice.hpp"
#include "shellfill/theory.hpp"

namespace shellfill {
namespace experiments {

/// The square inpainting domain over a known data strip (the symmetric
/// geometry every desk experiment runs on). Grid row `strip-1` is the top
/// data row, carrying the boundary samples u0(j h); the first unknown row
/// sits one lattice step above it.
///
/// Continuum comparisons use the anchor
///   x(jx) = (jx + 1/2) h,   y(iy) = (iy - strip + 1) h,
/// while boundary samples live at x = (jx + 1) h with cell ((jx)h, (jx+1)h],
/// matching the discrete mollification convention.
struct StripProblem {
  PixelGrid image;
  FillState state;
  int N = 0;       // width = unknown rows per unit height
  int strip = 0;   // data rows
  int rows = 0;    // unknown rows
  double h = 0.0;

  double sample_x(int jx) const { return (jx + 1) * h; }
  double anchor_x(int jx) const { return (jx + 0.5) * h; }
  double anchor_y(int iy) const { return (iy - strip + 1) * h; }
  int row_of(double y) const { return int(std::lround(y / h)) + strip - 1; }
  bool is_data_row(int iy) const { return iy < strip; }
};

/// Builds the strip problem with per-channel boundary data u0(x) sampled at
/// sample_x; the data is independent of y.
StripProblem make_strip_problem(
    int N, int rows, int strip, int channels,
    const std::function<void(double, double*)>& u0,
    BoundaryMode mode = BoundaryMode::periodic_x);

/// ---- Experiment I: stretching a dot into a line ----------------------

struct DotRow {
  double theta_deg = 0;
  double measured_deg = 0;  // NaN when the orientation was immeasurable
  double theory_deg = 0;
};

struct DotCurve {
  Method method;
  int r;
  double mu;
  std::vector<DotRow> rows;
};

DotCurve exp_dot(Method method, int r, double mu,
                 const std::vector<double>& theta_deg_list, int N = 512,
                 int threads = 0);

/// Orientation of the transported mass: circular per-row centroids of the
/// given channel, unwrapped, then least-squares x = a + b*row. Rows keep
/// >= 10% of the peak row mass; the 5 rows nearest the boundary are dropped.
double measure_orientation_deg(const PixelGrid& filled, const StripProblem& p,
                               int channel = 0);

/// ---- Experiment II: distance to the two continuum limits -------------

struct LimitRow {
  int r;
  double err_u;     // ||u_h - u||_p, u transported along the stencil c.o.m.
  double err_marz;  // ||u_h - u_marz||_p
};

struct LimitCurve {
  double p;
  double h;
  std::vector<LimitRow> rows;
};

/// Example-G.1 style comparison: Marz weights, constant guidance angle.
LimitCurve exp_limits(double theta_deg, double mu, double s, double s_prime,
                      double p, double h, const std::vector<int>& r_list,
                      int threads = 0);

/// ---- Experiment III: convergence-rate study ---------------------------

struct RateConfig {
  Method method = Method::coherence_transport;
  bool smooth_guide = false;  // Appendix-G Example 3 field instead of theta
  double theta_deg = 20.0;
  double mu = 10.0;
  int r = 3;
  double s = 2.0;
  double s_prime = 1.0;
  double p = 1.0;
};

struct RateReport {
  std::vector<double> h_values;
  std::vector<double> errors_lp;
  std::vector<double> R_h;  // one fewer than h_values
  double alpha_expected = 0;
  double norm_p = 1;
  bool degenerate = false;
  bool errors_all_zero = false;  // R_h undefined (constant data case)
};

RateReport exp_rates(const RateConfig& cfg, const std::vector<double>& h_list,
                     int threads = 0);

/// ---- Blur validation (Conjecture-1 scenarios) -------------------------

enum class BlurScenario { fig14, fig16 };

struct BlurSlice {
  double y;
  double sigma;
  std::vector<double> x;  // anchor positions of the slice pixels
  std::vector<double> measured;
  std::vector<double> predicted;
  double max_abs_dev = 0;
};

struct BlurReport {
  BlurScenario scenario;
  std::vector<BlurSlice> slices;
};

BlurReport exp_blur(BlurScenario scenario, const std::vector<double>& slice_y,
                    int threads = 0);

/// Degenerate-stencil control: coherence transport at a spectrum angle whose
/// representative has no in-ball multiple (arctan(1/2) for r=3) concentrates
/// all mass on one offset and shows zero blur. Returns the max abs deviation
/// of a mid-height slice from the sharply transported step.
double blur_degenerate_control(int N = 200, double theta_deg = 26.565051177,
                               int threads = 0);

/// ---- CSV helpers -------------------------------------------------------

std::string to_csv(const DotCurve& c);
std::string to_csv(const LimitCurve& c);
std::string to_csv(const RateReport& r);
std::string to_csv(const BlurReport& r);

}  // namespace experiments
}  // namespace shellfill
