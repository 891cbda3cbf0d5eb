#pragma once

#include <functional>
#include <vector>

#include "shellfill/stencil.hpp"
#include "shellfill/vec2.hpp"

namespace shellfill {
namespace theory {

/// theta_c = arcsin(1/r): the shallowest transport angle reachable by any
/// direct-form method with radius r.
double critical_angle(int r);

/// Directions (mod pi) representable by an integer offset set, with the
/// shortest representative per direction and the transition angles at which
/// the closest-point minimizer switches between consecutive representatives.
struct AngularSpectrum {
  std::vector<double> angles;        // strictly increasing, in [0, pi)
  std::vector<IVec2> representatives;  // shortest member per angle
  std::vector<double> transitions;   // theta(y_i + y_{i+1}), size angles-1
};

/// Requires A below the line y = -1 and at least two distinct directions.
AngularSpectrum angular_spectrum(const std::vector<IVec2>& A);

/// Coherence-transport staircase limit (mu -> infinity):
///   pi/2 at theta = 0, theta_i on the plateaus, angle midpoint exactly at
///   the transition angles.
double ct_limit(double theta, const AngularSpectrum& spectrum);

/// Guidefill limit law: identity on [theta_c, pi - theta_c], jump by
/// Delta_theta_r = arctan(alpha_r) outside, pi/2 at 0. Requires r >= 2.
double guidefill_limit(double theta, int r);

/// The jump magnitude arctan(alpha_r).
double guidefill_jump(int r);

/// Semi-implicit Guidefill limit: identity except exactly at theta = 0.
double sig_limit(double theta);

struct SolverNorms {
  double W = 0;        // total stencil mass, sum_{j=1}^r 1/j
  double W_tilde = 0;  // mass leaked into the current shell row
  double w00 = 0;      // mass leaked back to the pixel itself
  double J_norm = 0;   // ||J_omega||_inf
  double G_norm = 0;   // ||G_omega||_inf (omega in (0,1])
};

/// Closed forms from the mu -> infinity analysis of semi-implicit Guidefill.
/// Pass omega <= 0 to use omega* = 1 - w00/W.
SolverNorms solver_norms(double theta, int r, double omega);

double omega_star(double theta, int r);

/// Transport direction of the high-resolution vanishing-viscosity limit:
/// Riemann sum of the weight density over the lower half unit disk.
Vec2 marz_direction(double mu, double theta, int quadrature_n = 2048);

/// Weak solution of the constant-direction transport problem:
/// value of the boundary function at the foot of the characteristic,
/// x - cot(theta_star) * y (mod 1 when periodic).
double transport_solution(const std::function<double(double)>& boundary,
                          double theta_star, double x, double y,
                          bool periodic = true);

/// Linear interpolation fallback when only samples are available. Sample i
/// (0-based) lives at x = (i+1)*h per the boundary-slice convention.
double transport_solution(const std::vector<double>& slice, double theta_star,
                          double x, double y, double spacing_h,
                          bool periodic = true);

/// Mean step and transverse variance of the stopped-walk increments read off
/// an equivalent stencil: gamma^2 = Var(mu_x W_1 - mu_y V_1).
struct TransportModel {
  Vec2 g_star;      // (mu_x, mu_y), scale-free as a direction
  double theta_star = 0;
  double mu_x = 0, mu_y = 0;
  double gamma_sq = 0;
};

TransportModel transport_model(const EquivalentStencil& eq);

/// sigma = sqrt(gamma^2 * y * h / |mu_y|^3); zero when y = 0 or the stencil
/// is degenerate.
double blur_sigma(const TransportModel& model, double y, double h);

/// Discrete mollification with the cell-integrated Gaussian kernel:
/// out(x) = sum_i [ integral over ((i-1)h, ih) of g_sigma(x - t) dt ] u0(ih);
/// sample i of `slice` (0-based) is u0((i+1)h). sigma = 0 is the identity.
/// The kernel wraps periodically with period N*h.
std::vector<double> predicted_profile(const std::vector<double>& slice,
                                      double sigma, double theta_star,
                                      double spacing_h,
                                      const std::vector<double>& eval_x);

}  // namespace theory
}  // namespace shellfill
