#pragma once

#include <span>
#include <string>
#include <vector>

#include "psi/config.hpp"
#include "psi/constitutive.hpp"
#include "psi/phase_space.hpp"

namespace psi {

/// Explicit n-th iterate of alternating projections for one linear bar under
/// applied stress F/A, started from (eps0, sigma0):
///   z'_n = q^n [eps0, Y eps0] + a^2 (sum_{i=1..n} q^i) [F/(A Y), F/A],
/// with a = Y / C and q = 1 / (1 + a^2).
ElementState closed_form_iterate(double modulus, double c, double f_over_a, double eps0, double sigma0, int n);

/// Per-iteration error contraction 1 / (1 + (Y/C)^2): the squared cosine of
/// the Friedrichs angle between the linear law and the equilibrium line.
double friedrichs_rate(double modulus, double c);

struct RateEstimate {
  double beta_hat = 0.0;
  /// RMS residual of the log-linear fit.
  double fit_residual = 0.0;
  std::size_t tail_length = 0;
};

/// exp of the least-squares slope of log(error) against n over the trailing
/// half. Requires >= 6 positive entries whose final third strictly decreases;
/// throws std::invalid_argument otherwise.
RateEstimate estimate_rate(std::span<const double> errors);

/// First-order regular expansion in k of the projection onto Y (eps - k eps^2):
/// the linear projection plus
///   k Y (C^2 eps + sigma Y)(sigma Y^2 + C^2 (3 eps Y - 2 sigma)) / (C^2 + Y^2)^3.
double perturbed_projection(double eps, double sigma, double modulus, double c, double k);

/// Solve m(eps) = target by bisection on [lo, hi] (m increasing), to
/// |hi - lo| <= tol * max(1, |eps|).
double bisect_law_inverse(const MaterialLaw& law, double target, double lo, double hi, double tol = 1e-14);

/// Outcome of the bounding-line ordering checks on a one-bar trajectory.
struct BoundingLineReport {
  bool ordering_preserved = true;   ///< observation (i)
  bool nonlinear_dominates = true;  ///< observation (ii)
  double solution_strain = 0.0;
  double bounding_modulus = 0.0;    ///< tangent of the law at the solution
  std::string violation;            ///< first violating pair, if any

  bool passed() const noexcept { return ordering_preserved && nonlinear_dominates; }
};

/// Checks a trajectory of physically-admissible one-bar states (sigma = F/A)
/// against the tangent line to the law at the solution:
///   (i)  for consecutive trajectory points eps_1 < eps_2 the line iteration
///        keeps their images ordered;
///   (ii) from every point, the image under the nonlinear projection is at
///        least as close to eps* as the image under the line projection.
BoundingLineReport bounding_line_check(const MaterialLaw& law, double c, double f_over_a,
                                       std::span<const ElementState> trajectory, const PdOptions& options = {});

}  // namespace psi
