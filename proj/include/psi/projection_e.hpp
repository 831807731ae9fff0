#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "psi/mesh.hpp"
#include "psi/phase_space.hpp"

namespace psi {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Stiffness sum_e w_e k_e B_e^T B_e for per-element moduli k_e, split into
/// the free/free block and the free/prescribed coupling block.
struct CondensedStiffness {
  SparseMatrix free_free;
  SparseMatrix free_prescribed;
};

CondensedStiffness assemble_condensed(const TrussProblem& problem, std::span<const double> moduli);

/// Full (uncondensed) N_dofs x N_dofs stiffness for per-element moduli.
SparseMatrix assemble_full(const TrussProblem& problem, std::span<const double> moduli);

/// Factorised condensed K = sum_e w_e B_e^T C B_e. Built once per solve and
/// shared read-only by the multiplier and displacement solves.
class StiffnessFactorization {
 public:
  /// Throws ModelingError if the condensed matrix is not positive definite.
  StiffnessFactorization(const TrussProblem& problem, std::span<const double> moduli);
  ~StiffnessFactorization();
  StiffnessFactorization(StiffnessFactorization&&) noexcept;
  StiffnessFactorization& operator=(StiffnessFactorization&&) noexcept;

  const CondensedStiffness& matrices() const noexcept { return k_; }
  std::size_t num_free() const noexcept { return static_cast<std::size_t>(k_.free_free.rows()); }

  /// Solve K_ff x = rhs.
  std::vector<double> solve(std::span<const double> rhs_free) const;

 private:
  struct Impl;
  CondensedStiffness k_;
  std::unique_ptr<Impl> impl_;
};

/// Factorisation of K for the scalar distance constant C.
StiffnessFactorization assemble_k(const TrussProblem& problem, double c);

/// eta = K^-1 (F_ext - F_int(sigma')) on free DOFs, zero on prescribed DOFs.
std::vector<double> solve_eta(const StiffnessFactorization& fact, const TrussProblem& problem,
                              std::span<const double> stresses);

/// sigma_e = sigma'_e + C B_e eta
std::vector<double> update_stress(std::span<const double> stresses, std::span<const double> eta,
                                  const TrussProblem& problem, double c);

/// K u = sum_e w_e B_e^T C eps'_e on the free DOFs, with the prescribed
/// values substituted and moved to the right-hand side.
std::vector<double> solve_u(const StiffnessFactorization& fact, const TrussProblem& problem,
                            std::span<const double> strains, double c);

struct EProjection {
  PhasePoint point;
  std::vector<double> displacements;
  std::vector<double> multipliers;
};

/// Closest point (in the C-metric) to `z` satisfying equilibrium and
/// compatibility.
EProjection project_e(const PhasePoint& z, const StiffnessFactorization& fact, const TrussProblem& problem,
                      double c);

}  // namespace psi
