#pragma once

#include <array>
#include <vector>

#include "psi/config.hpp"
#include "psi/constitutive.hpp"
#include "psi/phase_space.hpp"

namespace psi {

/// Closest point on sigma = m(eps) to `z` under the local C-metric, i.e. the
/// minimiser of
///   g(eps') = C (eps' - eps)^2 / 2 + (m(eps') - sigma)^2 / (2 C).
/// The returned state always satisfies stress == law.eval(strain).
///
/// The search bracket is eps +- R with R = |eps| + |sigma - m(0)| / C + floor,
/// which contains every point no farther than the origin of the curve.
/// Throws ProjectionError (carrying `element`) on iteration-cap overflow and
/// ValidationError if a derivative-based method is asked of a non-smooth law.
ElementState project_d_element(const ElementState& z, const MaterialLaw& law, double c, const PdOptions& options,
                               std::size_t element = 0);

/// Element-by-element projection. Deterministic: the result does not depend
/// on `workers`.
PhasePoint project_d(const PhasePoint& z, const MaterialLaw& law, const Metric& metric, const PdOptions& options,
                     unsigned workers = 1);

/// Coefficients (a3, a2, a1, a0) of the stationarity equation for the law
/// Y (eps - k eps^2), as a cubic in eps':
///   (-2 a^2 k^2) eps'^3 + (3 k a^2) eps'^2 + (-1 - 2 k Y sigma / C^2 - a^2) eps'
///   + (eps + sigma Y / C^2) = 0,   a = Y / C.
struct CubicCoefficients {
  double a3 = 0.0;
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  double operator()(double x) const { return ((a3 * x + a2) * x + a1) * x + a0; }
  double derivative(double x) const { return (3.0 * a3 * x + 2.0 * a2) * x + a1; }
};

CubicCoefficients el_cubic_coeffs(const ElementState& z, double modulus, double k, double c);

/// Real roots of a polynomial of degree <= 3, ascending, Newton-polished.
std::vector<double> real_cubic_roots(const CubicCoefficients& poly);

/// Real root closest to the k = 0 projection; ties go to the smaller |root|.
double select_perturbed_root(const CubicCoefficients& poly, const ElementState& z, double modulus, double c);

/// Projection onto the linear law sigma = Y eps:
/// eps' = (eps + a^2 sigma / Y) / (1 + a^2), a = Y / C.
double linear_projection_strain(const ElementState& z, double modulus, double c);

}  // namespace psi
