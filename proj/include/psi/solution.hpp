#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "psi/mesh.hpp"
#include "psi/phase_space.hpp"

namespace psi {

enum class StopReason { ForceResidual, PhaseSpaceStep, MaxIter };

std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view name);

/// One row of the per-iteration trace.
///
/// For PSI: residual on the materially-admissible stresses after P_D, the
/// phase-space step relative to the previous iterate, and the wall time of
/// each projection. For NR: residual after the update, |du| / |u|, and the
/// time spent in linear algebra (t_pe_ms) and constitutive evaluation
/// (t_pd_ms).
struct IterationRecord {
  int iter = 0;
  double residual_rel = 0.0;
  double ps_step_rel = 0.0;
  double t_pe_ms = 0.0;
  double t_pd_ms = 0.0;
};

struct Solution {
  std::string solver;  ///< "psi" or "nr"
  std::vector<double> displacements;
  PhasePoint states;  ///< (eps', sigma') per element, on the constitutive law
  std::vector<NodalValue> reactions;
  std::vector<IterationRecord> trace;
  StopReason stop_reason = StopReason::MaxIter;
  /// Residual of the starting point, relative like the trace entries.
  double initial_residual = 0.0;

  /// Populated only when SolverConfig::record_iterates is set.
  std::vector<PhasePoint> e_iterates;
  std::vector<PhasePoint> d_iterates;

  bool converged() const noexcept { return stop_reason != StopReason::MaxIter; }
  int iterations() const noexcept { return static_cast<int>(trace.size()); }
  double final_residual() const noexcept { return trace.empty() ? initial_residual : trace.back().residual_rel; }
};

/// Reactions F_int(sigma) - F_ext at the prescribed DOFs.
std::vector<NodalValue> compute_reactions(const TrussProblem& problem, std::span<const double> stresses);

}  // namespace psi
