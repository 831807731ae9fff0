#include "psi/config.hpp"

#include <cmath>
#include <string>

#include "psi/errors.hpp"

namespace psi {

std::string_view to_string(PdMethod method) {
  switch (method) {
    case PdMethod::DerivativeFreeMin: return "dfm";
    case PdMethod::NewtonEL: return "newton";
    case PdMethod::SecantEL: return "secant";
  }
  return "dfm";
}

PdMethod parse_pd_method(std::string_view name) {
  if (name == "dfm" || name == "derivative-free") return PdMethod::DerivativeFreeMin;
  if (name == "newton") return PdMethod::NewtonEL;
  if (name == "secant") return PdMethod::SecantEL;
  throw ValidationError("unknown P_D method '" + std::string(name) + "' (expected dfm, newton or secant)");
}

void SolverConfig::validate() const {
  if (!(c_over_y0 > 0.0) || !std::isfinite(c_over_y0)) throw ValidationError("solver.c_over_y0 must be positive");
  if (!(tol1 > 0.0)) throw ValidationError("solver.tol1 must be positive");
  if (!(tol2_value() > 0.0)) throw ValidationError("solver.tol2 must be positive");
  if (max_iter < 1) throw ValidationError("solver.max_iter must be at least 1");
  if (pd.scan_points < 2) throw ValidationError("solver.pd scan_points must be at least 2");
  if (pd.max_iter < 1) throw ValidationError("solver.pd max_iter must be at least 1");
  if (!(pd.strain_floor > 0.0)) throw ValidationError("solver.pd strain_floor must be positive");
  if (workers < 1) throw ValidationError("solver.workers must be at least 1");
}

void NrConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("nr.damping must lie in (0, 1]");
  if (!(tol > 0.0)) throw ValidationError("nr.tol must be positive");
  if (max_iter < 1) throw ValidationError("nr.max_iter must be at least 1");
}

}  // namespace psi
