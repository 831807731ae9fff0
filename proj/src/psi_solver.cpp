#include "psi/psi_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "psi/projection_d.hpp"
#include "psi/projection_e.hpp"

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

}  // namespace

PhasePoint init_point(const TrussProblem& problem, const MaterialLaw& law) {
  const auto u_hat = problem.prescribed_values();
  const double m0 = law.eval(0.0);
  std::vector<ElementState> states(problem.num_elements(), ElementState{0.0, m0});
  for (std::size_t e = 0; e < states.size(); ++e) {
    if (!problem.touches_prescribed(e)) continue;
    const double eps = problem.gradient(e).dot(u_hat);
    states[e] = {eps, law.eval(eps)};
  }
  return PhasePoint(std::move(states));
}

Solution psi_solve(const TrussProblem& problem, const MaterialLaw& law, const SolverConfig& config) {
  config.validate();
  const double c = config.c_over_y0 * law.zero_strain_modulus();
  const Metric metric(c, std::vector<double>(problem.volumes().begin(), problem.volumes().end()));
  const StiffnessFactorization fact = assemble_k(problem, c);

  double f_norm = 0.0;
  for (std::size_t k : problem.free_dofs()) f_norm += problem.external_forces()[k] * problem.external_forces()[k];
  f_norm = std::sqrt(f_norm);
  // with no applied forces the residual is measured against C times the mean area
  const double f_ref = f_norm > 0.0 ? f_norm : c * problem.mean_area();
  const double tol2 = config.tol2_value();

  Solution sol;
  sol.solver = "psi";
  PhasePoint z = init_point(problem, law);
  sol.initial_residual = l2(free_residual(problem, z.stresses())) / f_ref;
  if (config.record_iterates) sol.d_iterates.push_back(z);

  std::vector<double> u;
  sol.stop_reason = StopReason::MaxIter;
  for (int n = 1; n <= config.max_iter; ++n) {
    const auto t0 = Clock::now();
    EProjection pe = project_e(z, fact, problem, c);
    const double t_pe = ms_since(t0);
    const auto t1 = Clock::now();
    PhasePoint next = project_d(pe.point, law, metric, config.pd, config.workers);
    const double t_pd = ms_since(t1);

    const double residual = l2(free_residual(problem, next.stresses())) / f_ref;
    const double z_norm = ps_norm(z, metric);
    const double dist = ps_distance(next, z, metric);
    const double step = z_norm > 0.0 ? dist / z_norm : (dist == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    sol.trace.push_back({n, residual, step, t_pe, t_pd});
    if (config.record_iterates) {
      sol.e_iterates.push_back(pe.point);
      sol.d_iterates.push_back(next);
    }
    u = std::move(pe.displacements);
    z = std::move(next);

    if (residual < config.tol1) {
      sol.stop_reason = StopReason::ForceResidual;
      break;
    }
    if (step < tol2) {
      sol.stop_reason = StopReason::PhaseSpaceStep;
      break;
    }
  }

  sol.displacements = std::move(u);
  sol.reactions = compute_reactions(problem, z.stresses());
  sol.states = std::move(z);
  return sol;
}

}  // namespace psi
