#include "psi/projection_e.hpp"

#include <algorithm>

#include <Eigen/SparseCholesky>

#include "psi/errors.hpp"

namespace psi {

namespace {

using Triplet = Eigen::Triplet<double>;

void check_moduli(const TrussProblem& problem, std::span<const double> moduli) {
  if (moduli.size() != problem.num_elements())
    throw StructuralError("stiffness: " + std::to_string(moduli.size()) + " moduli for " +
                          std::to_string(problem.num_elements()) + " elements");
}

}  // namespace

CondensedStiffness assemble_condensed(const TrussProblem& problem, std::span<const double> moduli) {
  check_moduli(problem, moduli);
  const auto n_free = static_cast<Eigen::Index>(problem.free_dofs().size());
  const auto n_pres = static_cast<Eigen::Index>(problem.prescribed_dofs().size());
  std::vector<long> pres_index(problem.num_dofs(), -1);
  for (std::size_t i = 0; i < problem.prescribed_dofs().size(); ++i)
    pres_index[problem.prescribed_dofs()[i]] = static_cast<long>(i);

  std::vector<Triplet> ff, fp;
  for (std::size_t e = 0; e < problem.num_elements(); ++e) {
    const auto& g = problem.gradient(e);
    const double s = problem.volume(e) * moduli[e];
    for (int i = 0; i < g.count; ++i) {
      const long fi = problem.free_index(g.dofs[i]);
      if (fi < 0) continue;
      for (int j = 0; j < g.count; ++j) {
        const double v = s * g.values[i] * g.values[j];
        const long fj = problem.free_index(g.dofs[j]);
        if (fj >= 0)
          ff.emplace_back(fi, fj, v);
        else
          fp.emplace_back(fi, pres_index[g.dofs[j]], v);
      }
    }
  }
  CondensedStiffness k;
  k.free_free.resize(n_free, n_free);
  k.free_free.setFromTriplets(ff.begin(), ff.end());
  k.free_prescribed.resize(n_free, n_pres);
  k.free_prescribed.setFromTriplets(fp.begin(), fp.end());
  return k;
}

SparseMatrix assemble_full(const TrussProblem& problem, std::span<const double> moduli) {
  check_moduli(problem, moduli);
  std::vector<Triplet> t;
  for (std::size_t e = 0; e < problem.num_elements(); ++e) {
    const auto& g = problem.gradient(e);
    const double s = problem.volume(e) * moduli[e];
    for (int i = 0; i < g.count; ++i)
      for (int j = 0; j < g.count; ++j)
        t.emplace_back(static_cast<Eigen::Index>(g.dofs[i]), static_cast<Eigen::Index>(g.dofs[j]),
                       s * g.values[i] * g.values[j]);
  }
  const auto n = static_cast<Eigen::Index>(problem.num_dofs());
  SparseMatrix k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

struct StiffnessFactorization::Impl {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

StiffnessFactorization::StiffnessFactorization(const TrussProblem& problem, std::span<const double> moduli)
    : k_(assemble_condensed(problem, moduli)), impl_(std::make_unique<Impl>()) {
  if (k_.free_free.rows() == 0) return;
  impl_->ldlt.compute(k_.free_free);
  if (impl_->ldlt.info() != Eigen::Success) throw ModelingError("stiffness factorisation failed");
  const Eigen::VectorXd d = impl_->ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (!(dmax > 0.0) || d.minCoeff() <= 1e-12 * dmax)
    throw ModelingError("condensed stiffness is not positive definite");
}

StiffnessFactorization::~StiffnessFactorization() = default;
StiffnessFactorization::StiffnessFactorization(StiffnessFactorization&&) noexcept = default;
StiffnessFactorization& StiffnessFactorization::operator=(StiffnessFactorization&&) noexcept = default;

std::vector<double> StiffnessFactorization::solve(std::span<const double> rhs_free) const {
  if (rhs_free.size() != num_free()) throw StructuralError("solve: right-hand side has wrong length");
  if (rhs_free.empty()) return {};
  const Eigen::Map<const Eigen::VectorXd> b(rhs_free.data(), static_cast<Eigen::Index>(rhs_free.size()));
  const Eigen::VectorXd x = impl_->ldlt.solve(b);
  return {x.data(), x.data() + x.size()};
}

StiffnessFactorization assemble_k(const TrussProblem& problem, double c) {
  if (!(c > 0.0)) throw ValidationError("distance constant C must be positive");
  const std::vector<double> moduli(problem.num_elements(), c);
  return StiffnessFactorization(problem, moduli);
}

std::vector<double> solve_eta(const StiffnessFactorization& fact, const TrussProblem& problem,
                              std::span<const double> stresses) {
  const auto r = free_residual(problem, stresses);
  const auto x = fact.solve(r);
  std::vector<double> eta(problem.num_dofs(), 0.0);
  const auto free = problem.free_dofs();
  for (std::size_t i = 0; i < free.size(); ++i) eta[free[i]] = x[i];
  return eta;
}

std::vector<double> update_stress(std::span<const double> stresses, std::span<const double> eta,
                                  const TrussProblem& problem, double c) {
  if (stresses.size() != problem.num_elements() || eta.size() != problem.num_dofs())
    throw StructuralError("update_stress: length mismatch");
  std::vector<double> out(stresses.begin(), stresses.end());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] += c * problem.gradient(e).dot(eta);
  return out;
}

std::vector<double> solve_u(const StiffnessFactorization& fact, const TrussProblem& problem,
                            std::span<const double> strains, double c) {
  if (strains.size() != problem.num_elements()) throw StructuralError("solve_u: length mismatch");
  std::vector<double> g(problem.num_dofs(), 0.0);
  for (std::size_t e = 0; e < strains.size(); ++e)
    problem.gradient(e).scatter(problem.volume(e) * c * strains[e], g);

  const auto free = problem.free_dofs();
  const auto pres = problem.prescribed_dofs();
  const auto u_hat = problem.prescribed_values();
  Eigen::VectorXd up(static_cast<Eigen::Index>(pres.size()));
  for (std::size_t i = 0; i < pres.size(); ++i) up[static_cast<Eigen::Index>(i)] = u_hat[pres[i]];
  const auto& kfp = fact.matrices().free_prescribed;
  // K_fp is assembled with the moduli the factorisation was built with; for
  // the distance-constant stiffness those are C everywhere.
  Eigen::VectorXd coupling = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free.size()));
  if (pres.size() > 0 && free.size() > 0) coupling = kfp * up;

  std::vector<double> rhs(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) rhs[i] = g[free[i]] - coupling[static_cast<Eigen::Index>(i)];
  const auto x = fact.solve(rhs);

  std::vector<double> u(u_hat.begin(), u_hat.end());
  for (std::size_t i = 0; i < free.size(); ++i) u[free[i]] = x[i];
  return u;
}

EProjection project_e(const PhasePoint& z, const StiffnessFactorization& fact, const TrussProblem& problem,
                      double c) {
  if (z.size() != problem.num_elements())
    throw StructuralError("project_e: phase point has " + std::to_string(z.size()) + " states for " +
                          std::to_string(problem.num_elements()) + " elements");
  const auto stresses = z.stresses();
  EProjection out;
  out.multipliers = solve_eta(fact, problem, stresses);
  const auto sigma = update_stress(stresses, out.multipliers, problem, c);
  out.displacements = solve_u(fact, problem, z.strains(), c);
  const auto eps = compute_strains(problem, out.displacements);
  std::vector<ElementState> states(z.size());
  for (std::size_t e = 0; e < states.size(); ++e) states[e] = {eps[e], sigma[e]};
  out.point = PhasePoint(std::move(states));
  return out;
}

}  // namespace psi
