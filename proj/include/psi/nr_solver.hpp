#pragma once

#include <span>

#include "psi/config.hpp"
#include "psi/constitutive.hpp"
#include "psi/mesh.hpp"
#include "psi/projection_e.hpp"
#include "psi/solution.hpp"

namespace psi {

/// Condensed tangent stiffness sum_e w_e B_e^T m'(B_e u) B_e.
CondensedStiffness assemble_tangent(const TrussProblem& problem, const MaterialLaw& law,
                                    std::span<const double> displacements);

/// Iteration matrix of the damped scheme:
/// damping * K_T(u) + (1 - damping) * K_0, K_0 the zero-strain stiffness.
CondensedStiffness assemble_blended(const TrussProblem& problem, const MaterialLaw& law,
                                    std::span<const double> displacements, double damping);

/// Damped Newton-Raphson:
///   u <- u + [g K_T(u) + (1 - g) K_0]^-1 (F_ext - F_int(m(B u)))
/// with the prescribed displacements applied in full from the start and the
/// tangent recomputed every iteration.
Solution nr_solve(const TrussProblem& problem, const MaterialLaw& law, const NrConfig& config);

}  // namespace psi
