#include "psi/nr_solver.hpp"

#include <chrono>
#include <cmath>

#include "psi/errors.hpp"

namespace psi {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> tangent_moduli(const TrussProblem& problem, const MaterialLaw& law,
                                   std::span<const double> displacements) {
  const auto eps = compute_strains(problem, displacements);
  std::vector<double> k(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) k[e] = law.tangent(eps[e]);
  return k;
}

std::vector<double> blended_moduli(const TrussProblem& problem, const MaterialLaw& law,
                                   std::span<const double> displacements, double damping) {
  auto k = tangent_moduli(problem, law, displacements);
  const double y0 = law.zero_strain_modulus();
  for (double& v : k) v = damping * v + (1.0 - damping) * y0;
  return k;
}

}  // namespace

CondensedStiffness assemble_tangent(const TrussProblem& problem, const MaterialLaw& law,
                                    std::span<const double> displacements) {
  return assemble_condensed(problem, tangent_moduli(problem, law, displacements));
}

CondensedStiffness assemble_blended(const TrussProblem& problem, const MaterialLaw& law,
                                    std::span<const double> displacements, double damping) {
  return assemble_condensed(problem, blended_moduli(problem, law, displacements, damping));
}

Solution nr_solve(const TrussProblem& problem, const MaterialLaw& law, const NrConfig& config) {
  config.validate();
  const auto free = problem.free_dofs();
  double f_norm = 0.0;
  for (std::size_t k : free) f_norm += problem.external_forces()[k] * problem.external_forces()[k];
  f_norm = std::sqrt(f_norm);
  const double f_ref = f_norm > 0.0 ? f_norm : law.zero_strain_modulus() * problem.mean_area();

  Solution sol;
  sol.solver = "nr";
  std::vector<double> u(problem.prescribed_values().begin(), problem.prescribed_values().end());
  const auto stresses_of = [&](std::span<const double> disp) {
    auto s = compute_strains(problem, disp);
    for (double& v : s) v = law.eval(v);
    return s;
  };
  std::vector<double> r = free_residual(problem, stresses_of(u));
  sol.initial_residual = l2(r) / f_ref;

  sol.stop_reason = StopReason::MaxIter;
  for (int n = 1; n <= config.max_iter; ++n) {
    const auto t0 = Clock::now();
    const auto moduli = blended_moduli(problem, law, u, config.damping);
    double t_pd = ms_since(t0);
    const auto t1 = Clock::now();
    std::vector<double> du;
    try {
      const StiffnessFactorization fact(problem, moduli);
      du = fact.solve(r);
    } catch (const ModelingError&) {
      throw ModelingError("newton-raphson: iteration matrix is singular at iteration " + std::to_string(n));
    }
    for (std::size_t i = 0; i < free.size(); ++i) u[free[i]] += du[i];
    const double t_pe = ms_since(t1);

    const auto t2 = Clock::now();
    r = free_residual(problem, stresses_of(u));
    t_pd += ms_since(t2);

    const double residual = l2(r) / f_ref;
    const double u_norm = l2(u);
    const double step = u_norm > 0.0 ? l2(du) / u_norm : 0.0;
    sol.trace.push_back({n, residual, step, t_pe, t_pd});
    if (!std::isfinite(residual)) throw ModelingError("newton-raphson: residual became non-finite");
    if (residual < config.tol) {
      sol.stop_reason = StopReason::ForceResidual;
      break;
    }
  }

  const auto eps = compute_strains(problem, u);
  std::vector<ElementState> states(eps.size());
  std::vector<double> sig(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    sig[e] = law.eval(eps[e]);
    states[e] = {eps[e], sig[e]};
  }
  sol.states = PhasePoint(std::move(states));
  sol.reactions = compute_reactions(problem, sig);
  sol.displacements = std::move(u);
  return sol;
}

}  // namespace psi
