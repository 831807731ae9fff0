#include "psi/solution.hpp"

#include <string>

#include "psi/errors.hpp"

namespace psi {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ForceResidual: return "force_residual";
    case StopReason::PhaseSpaceStep: return "phase_space_step";
    case StopReason::MaxIter: return "max_iter";
  }
  return "max_iter";
}

StopReason parse_stop_reason(std::string_view name) {
  if (name == "force_residual") return StopReason::ForceResidual;
  if (name == "phase_space_step") return StopReason::PhaseSpaceStep;
  if (name == "max_iter") return StopReason::MaxIter;
  throw ValidationError("unknown stop reason '" + std::string(name) + "'");
}

std::vector<NodalValue> compute_reactions(const TrussProblem& problem, std::span<const double> stresses) {
  const auto f_int = assemble_internal_force(problem, stresses);
  const auto f_ext = problem.external_forces();
  std::vector<NodalValue> out;
  out.reserve(problem.prescribed_dofs().size());
  const auto dim = static_cast<std::size_t>(problem.dim());
  for (std::size_t dof : problem.prescribed_dofs())
    out.push_back({dof / dim, static_cast<int>(dof % dim), f_int[dof] - f_ext[dof]});
  return out;
}

}  // namespace psi
