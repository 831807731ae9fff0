#include "psi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "psi/errors.hpp"
#include "psi/projection_e.hpp"

namespace psi {

std::string_view to_string(LawType type) {
  switch (type) {
    case LawType::Power: return "power";
    case LawType::Linear: return "linear";
    case LawType::Quadratic: return "quadratic";
    case LawType::Neural: return "neural";
  }
  return "linear";
}

LawType parse_law_type(std::string_view name) {
  if (name == "power") return LawType::Power;
  if (name == "linear") return LawType::Linear;
  if (name == "quadratic") return LawType::Quadratic;
  if (name == "neural") return LawType::Neural;
  throw ValidationError("material.type: unknown law '" + std::string(name) +
                        "' (expected power, linear, quadratic or neural)");
}

double GradientRow::dot(std::span<const double> u) const {
  double s = 0.0;
  for (int i = 0; i < count; ++i) s += values[i] * u[dofs[i]];
  return s;
}

void GradientRow::scatter(double scale, std::span<double> out) const {
  for (int i = 0; i < count; ++i) out[dofs[i]] += scale * values[i];
}

GradientRow build_b(const BarElement& element, std::span<const std::array<double, 3>> nodes, int dim) {
  if (element.node_a >= nodes.size() || element.node_b >= nodes.size())
    throw StructuralError("build_b: node index out of range");
  const auto& xa = nodes[element.node_a];
  const auto& xb = nodes[element.node_b];
  double len2 = 0.0;
  for (int d = 0; d < dim; ++d) len2 += (xb[d] - xa[d]) * (xb[d] - xa[d]);
  const double len = std::sqrt(len2);
  if (!(len > 0.0)) throw GeometryError("build_b: zero-length bar");

  GradientRow row;
  const auto sdim = static_cast<std::size_t>(dim);
  for (int d = 0; d < dim; ++d) {
    const double cosine = (xb[d] - xa[d]) / len;
    row.dofs[row.count] = element.node_a * sdim + static_cast<std::size_t>(d);
    row.values[row.count++] = -cosine / len;
  }
  for (int d = 0; d < dim; ++d) {
    const double cosine = (xb[d] - xa[d]) / len;
    row.dofs[row.count] = element.node_b * sdim + static_cast<std::size_t>(d);
    row.values[row.count++] = cosine / len;
  }
  return row;
}

namespace {

std::string at(const char* list, std::size_t i) { return std::string(list) + "[" + std::to_string(i) + "]"; }

void check_nodal_value(const NodalValue& v, const char* list, std::size_t i, std::size_t num_nodes, int dim) {
  if (v.node >= num_nodes)
    throw ValidationError(at(list, i) + ": node " + std::to_string(v.node) + " out of range (" +
                          std::to_string(num_nodes) + " nodes)");
  if (v.dof < 0 || v.dof >= dim)
    throw ValidationError(at(list, i) + ": dof " + std::to_string(v.dof) + " out of range for dim " +
                          std::to_string(dim));
  if (!std::isfinite(v.value)) throw ValidationError(at(list, i) + ": value is not finite");
}

}  // namespace

TrussProblem::TrussProblem(TrussDescription description) : desc_(std::move(description)) {
  const int dim = desc_.dim;
  if (dim != 2 && dim != 3) throw ValidationError("dim: must be 2 or 3, got " + std::to_string(dim));
  if (desc_.nodes.empty()) throw ValidationError("nodes: at least one node required");
  if (desc_.elements.empty()) throw ValidationError("elements: at least one element required");
  for (std::size_t i = 0; i < desc_.nodes.size(); ++i)
    for (int d = 0; d < 3; ++d)
      if (!std::isfinite(desc_.nodes[i][d])) throw ValidationError(at("nodes", i) + ": non-finite coordinate");

  const std::size_t n_nodes = desc_.nodes.size();
  gradients_.reserve(desc_.elements.size());
  for (std::size_t e = 0; e < desc_.elements.size(); ++e) {
    const auto& el = desc_.elements[e];
    if (el.node_a >= n_nodes)
      throw ValidationError(at("elements", e) + ": node " + std::to_string(el.node_a) + " out of range (" +
                            std::to_string(n_nodes) + " nodes)");
    if (el.node_b >= n_nodes)
      throw ValidationError(at("elements", e) + ": node " + std::to_string(el.node_b) + " out of range (" +
                            std::to_string(n_nodes) + " nodes)");
    if (!(el.area > 0.0) || !std::isfinite(el.area))
      throw ValidationError(at("elements", e) + ": area must be positive");
    try {
      gradients_.push_back(build_b(el, desc_.nodes, dim));
    } catch (const GeometryError&) {
      throw GeometryError(at("elements", e) + ": zero-length bar between nodes " + std::to_string(el.node_a) +
                          " and " + std::to_string(el.node_b));
    }
    double len2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double dx = desc_.nodes[el.node_b][d] - desc_.nodes[el.node_a][d];
      len2 += dx * dx;
    }
    lengths_.push_back(std::sqrt(len2));
    volumes_.push_back(el.area * lengths_.back());
  }

  const std::size_t n_dofs = num_dofs();
  u_hat_.assign(n_dofs, 0.0);
  f_ext_.assign(n_dofs, 0.0);
  std::vector<char> prescribed(n_dofs, 0);
  for (std::size_t i = 0; i < desc_.bcs.size(); ++i) {
    const auto& bc = desc_.bcs[i];
    check_nodal_value(bc, "bcs", i, n_nodes, dim);
    const std::size_t k = dof(bc.node, bc.dof);
    if (prescribed[k]) throw ValidationError(at("bcs", i) + ": dof prescribed twice");
    prescribed[k] = 1;
    u_hat_[k] = bc.value;
  }
  for (std::size_t i = 0; i < desc_.forces.size(); ++i) {
    const auto& f = desc_.forces[i];
    check_nodal_value(f, "forces", i, n_nodes, dim);
    const std::size_t k = dof(f.node, f.dof);
    if (prescribed[k]) throw ValidationError(at("forces", i) + ": dof is also prescribed");
    f_ext_[k] += f.value;
  }

  free_index_.assign(n_dofs, -1);
  for (std::size_t k = 0; k < n_dofs; ++k) {
    if (prescribed[k]) {
      prescribed_dofs_.push_back(k);
    } else {
      free_index_[k] = static_cast<long>(free_dofs_.size());
      free_dofs_.push_back(k);
    }
  }

  desc_.solver.validate();
  desc_.nr.validate();

  try {
    std::vector<double> unit(num_elements(), 1.0);
    StiffnessFactorization check(*this, unit);
  } catch (const ModelingError&) {
    throw ModelingError("bcs: the constraint set leaves rigid-body modes or mechanisms (condensed stiffness is singular)");
  }
}

double TrussProblem::mean_area() const noexcept {
  double s = 0.0;
  for (const auto& el : desc_.elements) s += el.area;
  return s / static_cast<double>(desc_.elements.size());
}

bool TrussProblem::touches_prescribed(std::size_t e) const {
  const auto& g = gradients_[e];
  for (int i = 0; i < g.count; ++i)
    if (is_prescribed(g.dofs[i])) return true;
  return false;
}

std::vector<double> assemble_internal_force(const TrussProblem& problem, std::span<const double> stresses) {
  if (stresses.size() != problem.num_elements())
    throw StructuralError("assemble_internal_force: " + std::to_string(stresses.size()) + " stresses for " +
                          std::to_string(problem.num_elements()) + " elements");
  std::vector<double> f(problem.num_dofs(), 0.0);
  for (std::size_t e = 0; e < problem.num_elements(); ++e)
    problem.gradient(e).scatter(problem.volume(e) * stresses[e], f);
  return f;
}

std::vector<double> compute_strains(const TrussProblem& problem, std::span<const double> u) {
  if (u.size() != problem.num_dofs())
    throw StructuralError("compute_strains: displacement vector has wrong length");
  std::vector<double> eps(problem.num_elements());
  for (std::size_t e = 0; e < eps.size(); ++e) eps[e] = problem.gradient(e).dot(u);
  return eps;
}

std::vector<double> free_residual(const TrussProblem& problem, std::span<const double> stresses) {
  const auto f_int = assemble_internal_force(problem, stresses);
  const auto f_ext = problem.external_forces();
  std::vector<double> r;
  r.reserve(problem.free_dofs().size());
  for (std::size_t k : problem.free_dofs()) r.push_back(f_ext[k] - f_int[k]);
  return r;
}

TrussDescription generate_truss(int rows, int cols, double spacing, double area, const TrussLoadRecipe& recipe,
                                const MaterialSpec& material) {
  if (rows < 2 || cols < 2) throw ValidationError("generate_truss: rows and cols must both be >= 2");
  if (!(spacing > 0.0) || !(area > 0.0)) throw ValidationError("generate_truss: spacing and area must be positive");

  TrussDescription d;
  d.dim = 2;
  d.material = material;
  const auto node = [cols](int r, int c) { return static_cast<std::size_t>(r * cols + c); };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) d.nodes.push_back({c * spacing, r * spacing, 0.0});

  for (int r = 0; r < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c) d.elements.push_back({node(r, c), node(r, c + 1), area});
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c < cols; ++c) d.elements.push_back({node(r, c), node(r + 1, c), area});
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c) {
      if ((r + c) % 2 == 0)
        d.elements.push_back({node(r, c), node(r + 1, c + 1), area});
      else
        d.elements.push_back({node(r, c + 1), node(r + 1, c), area});
    }

  const std::size_t left = node(0, 0);
  const std::size_t right = node(0, cols - 1);
  for (std::size_t n : {left, right}) {
    d.bcs.push_back({n, 0, 0.0});
    d.bcs.push_back({n, 1, 0.0});
  }

  std::vector<std::size_t> imposed;
  if (recipe.imposed_drop != 0.0) {
    for (int c : {cols / 3, cols - 1 - cols / 3}) {
      const std::size_t n = node(rows - 1, c);
      if (std::find(imposed.begin(), imposed.end(), n) == imposed.end()) imposed.push_back(n);
    }
    for (std::size_t n : imposed) d.bcs.push_back({n, 1, -recipe.imposed_drop});
  }

  const auto taken = [&](std::size_t n) {
    return n == left || n == right || std::find(imposed.begin(), imposed.end(), n) != imposed.end();
  };
  std::vector<std::size_t> candidates;
  for (int i = 0, lo = 0, hi = cols - 1; lo <= hi; ++i) {
    const std::size_t n = node(rows - 1, (i % 2 == 0) ? lo++ : hi--);
    if (!taken(n)) candidates.push_back(n);
  }
  for (std::size_t n = 0; n < d.nodes.size(); ++n)
    if (!taken(n) && std::find(candidates.begin(), candidates.end(), n) == candidates.end()) candidates.push_back(n);
  if (candidates.size() < recipe.forces.size())
    throw ValidationError("generate_truss: grid too small for " + std::to_string(recipe.forces.size()) + " forces");
  for (std::size_t i = 0; i < recipe.forces.size(); ++i) d.forces.push_back({candidates[i], 1, recipe.forces[i]});
  return d;
}

TrussDescription serial_bar_chain(std::span<const double> lengths, double area, double force,
                                  const MaterialSpec& material) {
  if (lengths.empty()) throw ValidationError("serial_bar_chain: at least one bar required");
  TrussDescription d;
  d.dim = 2;
  d.material = material;
  double x = 0.0;
  d.nodes.push_back({0.0, 0.0, 0.0});
  for (double len : lengths) {
    if (!(len > 0.0)) throw ValidationError("serial_bar_chain: lengths must be positive");
    x += len;
    d.nodes.push_back({x, 0.0, 0.0});
  }
  for (std::size_t e = 0; e < lengths.size(); ++e) d.elements.push_back({e, e + 1, area});
  d.bcs.push_back({0, 0, 0.0});
  for (std::size_t n = 0; n < d.nodes.size(); ++n) d.bcs.push_back({n, 1, 0.0});
  d.forces.push_back({d.nodes.size() - 1, 0, force});
  return d;
}

}  // namespace psi
