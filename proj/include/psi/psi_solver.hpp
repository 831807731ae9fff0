#pragma once

#include "psi/config.hpp"
#include "psi/constitutive.hpp"
#include "psi/mesh.hpp"
#include "psi/solution.hpp"

namespace psi {

/// Starting point: (0, m(0)) everywhere except elements touching a prescribed
/// DOF, which get eps' = B_e u_hat and sigma' = m(eps').
PhasePoint init_point(const TrussProblem& problem, const MaterialLaw& law);

/// Alternating projections z'(n+1) = P_D(P_E(z'(n))) until
///   (a) |F_int(sigma') - F_ext| < tol1 |F_ext|   (free DOFs, L2), or
///   (b) |z'(n+1) - z'(n)| < tol2 |z'(n)|          (phase-space norm),
/// or max_iter. When F_ext vanishes, (a) uses the absolute threshold
/// tol1 * C * mean element area.
Solution psi_solve(const TrussProblem& problem, const MaterialLaw& law, const SolverConfig& config);

}  // namespace psi
