#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psi/config.hpp"

namespace psi {

enum class LawType { Power, Linear, Quadratic, Neural };

std::string_view to_string(LawType type);
LawType parse_law_type(std::string_view name);

/// Constitutive law as written in a problem file. Only the fields relevant
/// to `type` are meaningful.
struct MaterialSpec {
  LawType type = LawType::Linear;
  double y0 = 1.0;  ///< Y0 for power, Y for linear and quadratic [Pa]
  double p = 1e-4;
  double k = 0.0;
  std::string weights_path;  ///< neural only; relative to the problem file
};

struct NodalValue {
  std::size_t node = 0;
  int dof = 0;
  double value = 0.0;

  bool operator==(const NodalValue&) const = default;
};

struct BarElement {
  std::size_t node_a = 0;
  std::size_t node_b = 0;
  double area = 0.0;  ///< [m^2]

  bool operator==(const BarElement&) const = default;
};

/// Everything a problem file holds, before validation.
struct TrussDescription {
  int dim = 2;
  std::vector<std::array<double, 3>> nodes;  ///< unused trailing coordinate is 0 in 2D
  std::vector<BarElement> elements;
  std::vector<NodalValue> bcs;     ///< prescribed displacements [m]
  std::vector<NodalValue> forces;  ///< external nodal forces [N]
  MaterialSpec material;
  SolverConfig solver;
  NrConfig nr;
};

/// Sparse row of the discrete gradient of one bar: at most 2 * dim entries.
struct GradientRow {
  std::array<std::size_t, 6> dofs{};
  std::array<double, 6> values{};
  int count = 0;

  double dot(std::span<const double> u) const;
  /// out[dofs] += scale * values
  void scatter(double scale, std::span<double> out) const;
};

/// Validated, immutable truss: geometry, DOF numbering, boundary conditions
/// and the per-element discrete gradients.
///
/// DOF numbering is node-major: dof(node, d) = node * dim + d.
class TrussProblem {
 public:
  /// Validates the description (index ranges, positive areas, non-degenerate
  /// bars, no DOF both prescribed and loaded, rigid-body modes removed).
  /// Throws ValidationError, GeometryError or ModelingError.
  explicit TrussProblem(TrussDescription description);

  const TrussDescription& description() const noexcept { return desc_; }
  int dim() const noexcept { return desc_.dim; }
  std::size_t num_nodes() const noexcept { return desc_.nodes.size(); }
  std::size_t num_elements() const noexcept { return desc_.elements.size(); }
  std::size_t num_dofs() const noexcept { return num_nodes() * static_cast<std::size_t>(dim()); }
  std::size_t dof(std::size_t node, int d) const { return node * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(d); }

  const GradientRow& gradient(std::size_t e) const { return gradients_[e]; }
  double length(std::size_t e) const { return lengths_[e]; }
  double volume(std::size_t e) const { return volumes_[e]; }
  std::span<const double> volumes() const noexcept { return volumes_; }
  double mean_area() const noexcept;

  /// Full-length external force vector (zero at prescribed DOFs).
  std::span<const double> external_forces() const noexcept { return f_ext_; }
  /// Full-length vector of prescribed values, zero on free DOFs.
  std::span<const double> prescribed_values() const noexcept { return u_hat_; }
  bool is_prescribed(std::size_t dof) const { return free_index_[dof] < 0; }
  /// Position of `dof` among the free DOFs, or -1.
  long free_index(std::size_t dof) const { return free_index_[dof]; }
  std::span<const std::size_t> free_dofs() const noexcept { return free_dofs_; }
  std::span<const std::size_t> prescribed_dofs() const noexcept { return prescribed_dofs_; }
  /// True if any DOF of the element's nodes is prescribed.
  bool touches_prescribed(std::size_t e) const;

 private:
  TrussDescription desc_;
  std::vector<GradientRow> gradients_;
  std::vector<double> lengths_;
  std::vector<double> volumes_;
  std::vector<double> f_ext_;
  std::vector<double> u_hat_;
  std::vector<long> free_index_;
  std::vector<std::size_t> free_dofs_;
  std::vector<std::size_t> prescribed_dofs_;
};

/// Discrete gradient row of a bar: -c_i/L at node_a DOFs, +c_i/L at node_b
/// DOFs, c the direction cosines. Throws GeometryError for zero length.
GradientRow build_b(const BarElement& element, std::span<const std::array<double, 3>> nodes, int dim);

/// F_int = sum_e w_e B_e^T sigma_e, full length.
std::vector<double> assemble_internal_force(const TrussProblem& problem, std::span<const double> stresses);

/// Strains B_e u for every element.
std::vector<double> compute_strains(const TrussProblem& problem, std::span<const double> u);

/// F_ext - F_int(sigma) restricted to the free DOFs.
std::vector<double> free_residual(const TrussProblem& problem, std::span<const double> stresses);

/// Loading recipe of the planar grid generator.
struct TrussLoadRecipe {
  /// Downward displacement imposed on two top-row nodes [m]; 0 disables it.
  double imposed_drop = 0.05;
  /// Vertical nodal forces [N], assigned to distinct free nodes in order.
  std::vector<double> forces{-1000.0, -1000.0, -100.0, 1800.0};
};

/// Planar grid truss with one diagonal per cell.
///
/// Nodes sit on a rows x cols grid with the given spacing; node (r, c) has
/// index r * cols + c and coordinates (c * spacing, r * spacing). Bars:
///   rows * (cols - 1) horizontals, (rows - 1) * cols verticals and
///   (rows - 1) * (cols - 1) diagonals, alternating direction cell by cell,
/// so N_n = rows * cols and N_e = 3 rows cols - 2 rows - 2 cols + 1.
///
/// Supports: bottom-left and bottom-right nodes pinned in x and y.
/// Imposed displacement: y = -imposed_drop at the top-row nodes in columns
/// cols / 3 and cols - 1 - cols / 3.
/// Forces: vertical, applied in order to top-row nodes taken alternately from
/// the left and right ends (skipping imposed nodes), then to the remaining
/// free nodes in index order.
///
/// Requires rows >= 2 and cols >= 2. Deterministic.
TrussDescription generate_truss(int rows, int cols, double spacing, double area, const TrussLoadRecipe& recipe,
                                const MaterialSpec& material);

/// Collinear chain of bars along x with the given lengths: node 0 fixed in x,
/// every y DOF fixed, axial force `force` at the last node.
TrussDescription serial_bar_chain(std::span<const double> lengths, double area, double force,
                                  const MaterialSpec& material);

}  // namespace psi
