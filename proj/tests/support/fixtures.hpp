#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "psi/mesh.hpp"
#include "psi/phase_space.hpp"

namespace fixtures {

inline psi::MaterialSpec power_spec(double y0 = 2e11, double p = 1e-4) {
  psi::MaterialSpec m;
  m.type = psi::LawType::Power;
  m.y0 = y0;
  m.p = p;
  return m;
}

inline psi::MaterialSpec linear_spec(double y) {
  psi::MaterialSpec m;
  m.type = psi::LawType::Linear;
  m.y0 = y;
  return m;
}

/// Planar 4 x 10 grid truss (93 bars) under the reference load set:
/// forces -1000, -1000, -100, +1800 N and a 5 cm imposed drop.
inline psi::TrussDescription desk_truss(const psi::MaterialSpec& material = power_spec()) {
  psi::TrussLoadRecipe recipe;
  recipe.imposed_drop = 0.05;
  recipe.forces = {-1000.0, -1000.0, -100.0, 1800.0};
  return psi::generate_truss(4, 10, 35.0, 5e-4, recipe, material);
}

/// One horizontal bar of length L along x, left end pinned, right end
/// restrained in y and loaded by `force` in x.
inline psi::TrussDescription one_bar(double length, double area, double force, const psi::MaterialSpec& m) {
  const std::vector<double> lengths{length};
  return psi::serial_bar_chain(lengths, area, force, m);
}

inline psi::PhasePoint random_point(std::size_t n, std::mt19937_64& rng, double eps_scale, double sig_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<psi::ElementState> s(n);
  for (auto& e : s) e = {eps_scale * u(rng), sig_scale * u(rng)};
  return psi::PhasePoint(std::move(s));
}

/// Small problems (<= 8 DOFs) used for oracle comparisons.
inline std::vector<psi::TrussDescription> small_problems() {
  std::vector<psi::TrussDescription> out;
  const auto mat = linear_spec(2e11);
  {
    // triangle, one pinned node, one roller, load and imposed displacement
    psi::TrussDescription d;
    d.nodes = {{0, 0, 0}, {2, 0, 0}, {1, 1.5, 0}};
    d.elements = {{0, 1, 1e-4}, {1, 2, 2e-4}, {0, 2, 1.5e-4}};
    d.bcs = {{0, 0, 0.0}, {0, 1, 0.0}, {1, 1, -1e-3}};
    d.forces = {{2, 0, 500.0}, {2, 1, -800.0}, {1, 0, 100.0}};
    d.material = mat;
    out.push_back(d);
  }
  {
    // four nodes, square with one diagonal and one brace (8 DOFs, 5 free)
    psi::TrussDescription d;
    d.nodes = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    d.elements = {{0, 1, 1e-4}, {1, 2, 1e-4}, {2, 3, 1e-4}, {3, 0, 1e-4}, {0, 2, 2e-4}, {1, 3, 3e-4}};
    d.bcs = {{0, 0, 0.0}, {0, 1, 0.0}, {1, 1, 2e-4}};
    d.forces = {{2, 0, 1000.0}, {3, 1, -500.0}};
    d.material = mat;
    out.push_back(d);
  }
  {
    const std::vector<double> lengths{1.0, 0.4, 2.5};
    out.push_back(psi::serial_bar_chain(lengths, 1e-4, 300.0, mat));
  }
  return out;
}

struct KktResult {
  std::vector<double> strains;
  std::vector<double> stresses;
};

/// Least-distance point of the physically admissible set, from one dense
/// KKT solve over (eps, sigma, u_free) with multipliers for equilibrium and
/// compatibility. Bar gradients are rebuilt from the node coordinates.
inline KktResult kkt_project_e(const psi::TrussDescription& d, const psi::PhasePoint& z, double c) {
  const int dim = d.dim;
  const std::size_t ne = d.elements.size();
  const std::size_t ndof = d.nodes.size() * static_cast<std::size_t>(dim);
  std::vector<int> pres(ndof, 0);
  std::vector<double> u_hat(ndof, 0.0), f(ndof, 0.0);
  for (const auto& bc : d.bcs) {
    pres[bc.node * dim + bc.dof] = 1;
    u_hat[bc.node * dim + bc.dof] = bc.value;
  }
  for (const auto& fo : d.forces) f[fo.node * dim + fo.dof] += fo.value;
  std::vector<std::size_t> free;
  std::vector<long> fidx(ndof, -1);
  for (std::size_t k = 0; k < ndof; ++k)
    if (!pres[k]) {
      fidx[k] = static_cast<long>(free.size());
      free.push_back(k);
    }
  const std::size_t nf = free.size();

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<long>(ne), static_cast<long>(ndof));
  Eigen::VectorXd w(static_cast<long>(ne));
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& el = d.elements[e];
    double len2 = 0.0;
    for (int k = 0; k < dim; ++k) len2 += std::pow(d.nodes[el.node_b][k] - d.nodes[el.node_a][k], 2);
    const double len = std::sqrt(len2);
    w[static_cast<long>(e)] = el.area * len;
    for (int k = 0; k < dim; ++k) {
      const double cosk = (d.nodes[el.node_b][k] - d.nodes[el.node_a][k]) / len;
      B(static_cast<long>(e), static_cast<long>(el.node_a * dim + k)) = -cosk / len;
      B(static_cast<long>(e), static_cast<long>(el.node_b * dim + k)) = cosk / len;
    }
  }

  const long n_x = static_cast<long>(2 * ne + nf);
  const long n_c = static_cast<long>(nf + ne);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n_x + n_c, n_x + n_c);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_x + n_c);
  for (std::size_t e = 0; e < ne; ++e) {
    const long ie = static_cast<long>(e), is = static_cast<long>(ne + e);
    // unknowns are eps and sigma / c so both blocks carry the same scale
    K(ie, ie) = w[ie];
    K(is, is) = w[ie];
    rhs[ie] = w[ie] * z[e].strain;
    rhs[is] = w[ie] * z[e].stress / c;
  }
  // equilibrium rows: sum_e w_e B_e,k sigma_e / c = f_k / c for free k
  for (std::size_t i = 0; i < nf; ++i) {
    const long row = n_x + static_cast<long>(i);
    for (std::size_t e = 0; e < ne; ++e) {
      const double a = w[static_cast<long>(e)] * B(static_cast<long>(e), static_cast<long>(free[i]));
      K(row, static_cast<long>(ne + e)) = a;
      K(static_cast<long>(ne + e), row) = a;
    }
    rhs[row] = f[free[i]] / c;
  }
  // compatibility rows: eps_e - B_e,f u_f = B_e,p u_hat
  for (std::size_t e = 0; e < ne; ++e) {
    const long row = n_x + static_cast<long>(nf + e);
    K(row, static_cast<long>(e)) = 1.0;
    K(static_cast<long>(e), row) = 1.0;
    for (std::size_t i = 0; i < nf; ++i) {
      const double a = -B(static_cast<long>(e), static_cast<long>(free[i]));
      K(row, static_cast<long>(2 * ne + i)) = a;
      K(static_cast<long>(2 * ne + i), row) = a;
    }
    double b = 0.0;
    for (std::size_t k = 0; k < ndof; ++k)
      if (pres[k]) b += B(static_cast<long>(e), static_cast<long>(k)) * u_hat[k];
    rhs[row] = b;
  }
  const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
  KktResult r;
  for (std::size_t e = 0; e < ne; ++e) {
    r.strains.push_back(x[static_cast<long>(e)]);
    r.stresses.push_back(c * x[static_cast<long>(ne + e)]);
  }
  return r;
}

}  // namespace fixtures
