#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace psi {

/// How the per-element closest-point problem onto the constitutive curve is
/// solved.
enum class PdMethod {
  DerivativeFreeMin,  ///< scan + Brent on the distance (root polish on smooth laws)
  NewtonEL,           ///< safeguarded Newton on the stationarity (E-L) equation
  SecantEL,           ///< safeguarded secant on the stationarity equation
};

std::string_view to_string(PdMethod method);
/// Accepts "dfm"/"derivative-free", "newton", "secant" (case-sensitive).
PdMethod parse_pd_method(std::string_view name);

struct PdOptions {
  PdMethod method = PdMethod::DerivativeFreeMin;
  /// Floor added to the search half-width so points at the origin still get
  /// a non-empty bracket.
  double strain_floor = 1e-6;
  /// Uniform samples of the bracket scanned before the local search.
  int scan_points = 64;
  int max_iter = 200;
};

struct SolverConfig {
  /// Distance constant as a multiple of the zero-strain modulus.
  double c_over_y0 = 0.3;
  /// Relative force-residual tolerance (free DOFs).
  double tol1 = 5e-2;
  /// Relative phase-space step tolerance; tol1 / 10 when unset.
  std::optional<double> tol2;
  int max_iter = 500;
  PdOptions pd;
  unsigned workers = 1;
  /// Keep every P_E and P_D iterate in the solution (tests and plotting).
  bool record_iterates = false;

  double tol2_value() const { return tol2 ? *tol2 : tol1 / 10.0; }
  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

struct NrConfig {
  /// Weight of the current tangent in the iteration matrix; the zero-strain
  /// stiffness gets 1 - damping.
  double damping = 0.8;
  double tol = 5e-2;
  int max_iter = 500;

  void validate() const;
};

}  // namespace psi
