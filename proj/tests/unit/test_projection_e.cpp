#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "psi/errors.hpp"
#include "psi/projection_e.hpp"

using namespace psi;

namespace {

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("stiffness of one horizontal bar") {
  const double a = 2e-4, l = 2.0, c = 5.0;
  const TrussProblem p(fixtures::one_bar(l, a, 1.0, fixtures::linear_spec(1.0)));
  const std::vector<double> moduli{c};
  const Eigen::MatrixXd k = Eigen::MatrixXd(assemble_full(p, moduli));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected(0, 0) = expected(2, 2) = 1.0;
  expected(0, 2) = expected(2, 0) = -1.0;
  expected *= a * c / l;
  CHECK((k - expected).norm() <= 1e-15 * expected.norm());
  const auto fact = assemble_k(p, c);
  REQUIRE(fact.num_free() == 1);
  CHECK(Eigen::MatrixXd(fact.matrices().free_free)(0, 0) == doctest::Approx(a * c / l));
}

TEST_CASE("stiffness is symmetric and positive semidefinite") {
  const TrussProblem p(fixtures::desk_truss());
  const std::vector<double> moduli(p.num_elements(), 6e10);
  const Eigen::MatrixXd k = Eigen::MatrixXd(assemble_full(p, moduli));
  CHECK((k - k.transpose()).norm() <= 1e-14 * k.norm());
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(k.rows());
    for (auto& v : x) v = n(rng);
    CHECK(x.dot(k * x) >= -1e-12 * k.norm() * x.squaredNorm());
  }
  // rigid translation in x carries no energy
  Eigen::VectorXd t = Eigen::VectorXd::Zero(k.rows());
  for (std::size_t node = 0; node < p.num_nodes(); ++node) t[static_cast<long>(p.dof(node, 0))] = 1.0;
  CHECK(std::abs(t.dot(k * t)) <= 1e-12 * k.norm());
  const auto cond = assemble_condensed(p, moduli);
  CHECK(cond.free_free.rows() == static_cast<long>(p.free_dofs().size()));
  CHECK(cond.free_prescribed.cols() == static_cast<long>(p.prescribed_dofs().size()));
}

TEST_CASE("non-positive distance constant is rejected") {
  const TrussProblem p(fixtures::one_bar(1.0, 1.0, 1.0, fixtures::linear_spec(1.0)));
  CHECK_THROWS_AS(assemble_k(p, 0.0), ValidationError);
}

TEST_CASE("multipliers for one bar") {
  const double l = 2.0, a = 1e-4, c = 3e10, f = 500.0;
  const TrussProblem p(fixtures::one_bar(l, a, f, fixtures::linear_spec(1.0)));
  const auto fact = assemble_k(p, c);
  for (double s0 : {0.0, 1e6, -3e6}) {
    const std::vector<double> s{s0};
    const auto eta = solve_eta(fact, p, s);
    CHECK(eta[p.dof(1, 0)] == doctest::Approx(l / c * (f / a - s0)).epsilon(1e-12));
    CHECK(eta[p.dof(0, 0)] == 0.0);
    const auto upd = update_stress(s, eta, p, c);
    CHECK(upd[0] == doctest::Approx(f / a).epsilon(1e-12));
  }
  // equilibrated stress needs no correction
  const std::vector<double> eq{f / a};
  for (double v : solve_eta(fact, p, eq)) CHECK(std::abs(v) <= 1e-20);
  // update with zero multipliers is the identity
  const std::vector<double> zero(p.num_dofs(), 0.0);
  CHECK(update_stress(std::vector<double>{7.0}, zero, p, c)[0] == 7.0);
}

TEST_CASE("multipliers are linear in the imbalance") {
  auto d = fixtures::desk_truss();
  const TrussProblem p(d);
  const auto fact = assemble_k(p, 6e10);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e7, 1e7);
  std::vector<double> s(p.num_elements());
  for (double& v : s) v = u(rng);
  const auto eta = solve_eta(fact, p, s);
  for (auto& fo : d.forces) fo.value *= 3.0;
  const TrussProblem p3(d);
  const auto fact3 = assemble_k(p3, 6e10);
  // eta(3F, 3s) = 3 eta(F, s)
  std::vector<double> s3(s);
  for (double& v : s3) v *= 3.0;
  const auto eta3 = solve_eta(fact3, p3, s3);
  for (std::size_t k = 0; k < eta.size(); ++k) CHECK(eta3[k] == doctest::Approx(3.0 * eta[k]).epsilon(1e-9));
}

TEST_CASE("stress update restores equilibrium") {
  std::mt19937_64 rng(13);
  const TrussProblem p(fixtures::desk_truss());
  const double c = 6e10;
  const auto fact = assemble_k(p, c);
  double f_norm = 0.0;
  for (double v : p.external_forces()) f_norm += v * v;
  f_norm = std::sqrt(f_norm);
  for (int i = 0; i < 20; ++i) {
    const auto z = fixtures::random_point(p.num_elements(), rng, 1e-3, 1e8);
    const auto proj = project_e(z, fact, p, c);
    CHECK(l2(free_residual(p, proj.point.stresses())) <= 1e-10 * (1.0 + f_norm) * 1e4);
    // scale of the internal forces: a few 1e4 N; measured relative to it
    double fi = 0.0;
    for (double v : assemble_internal_force(p, z.stresses())) fi += v * v;
    CHECK(l2(free_residual(p, proj.point.stresses())) <= 1e-10 * (1.0 + f_norm + std::sqrt(fi)));
  }
}

TEST_CASE("displacement solve") {
  SUBCASE("one bar with a free end: u = L eps'") {
    const double l = 3.0;
    const TrussProblem p(fixtures::one_bar(l, 1e-4, 1.0, fixtures::linear_spec(1.0)));
    const auto fact = assemble_k(p, 7.0);
    const auto u = solve_u(fact, p, std::vector<double>{0.02}, 7.0);
    CHECK(u[p.dof(1, 0)] == doctest::Approx(l * 0.02).epsilon(1e-13));
    CHECK(compute_strains(p, u)[0] == doctest::Approx(0.02).epsilon(1e-13));
  }
  SUBCASE("compatible strains reproduce their displacement field") {
    const TrussProblem p(fixtures::desk_truss());
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u01(-1e-2, 1e-2);
    std::vector<double> field(p.prescribed_values().begin(), p.prescribed_values().end());
    for (std::size_t k : p.free_dofs()) field[k] = u01(rng);
    const auto eps = compute_strains(p, field);
    const auto fact = assemble_k(p, 6e10);
    const auto u = solve_u(fact, p, eps, 6e10);
    for (std::size_t k = 0; k < u.size(); ++k) CHECK(u[k] == doctest::Approx(field[k]).epsilon(1e-9).scale(1e-2));
  }
  SUBCASE("zero strains and zero prescribed values give zero") {
    auto d = fixtures::desk_truss();
    for (auto& bc : d.bcs) bc.value = 0.0;
    const TrussProblem p(d);
    const auto fact = assemble_k(p, 1.0);
    for (double v : solve_u(fact, p, std::vector<double>(p.num_elements(), 0.0), 1.0)) CHECK(v == 0.0);
  }
}

TEST_CASE("projection onto E for one bar") {
  const TrussProblem p(fixtures::one_bar(1.0, 1.0, 1.0, fixtures::linear_spec(1.0)));
  const auto fact = assemble_k(p, 1.0);
  const PhasePoint z(std::vector<ElementState>{{0.2, 0.7}});
  const auto r = project_e(z, fact, p, 1.0);
  CHECK(r.point[0].strain == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(r.point[0].stress == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("points of E are fixed and the projection is idempotent") {
  std::mt19937_64 rng(15);
  const TrussProblem p(fixtures::desk_truss());
  const double c = 6e10;
  const auto fact = assemble_k(p, c);
  const Metric metric(c, std::vector<double>(p.volumes().begin(), p.volumes().end()));
  for (int i = 0; i < 10; ++i) {
    const auto z = fixtures::random_point(p.num_elements(), rng, 1e-3, 1e8);
    const auto once = project_e(z, fact, p, c).point;
    const auto twice = project_e(once, fact, p, c).point;
    CHECK(ps_distance(once, twice, metric) <= 1e-12 * ps_norm(once, metric));
  }
}

TEST_CASE("projection matches the KKT least-distance oracle") {
  std::mt19937_64 rng(16);
  for (const auto& d : fixtures::small_problems()) {
    const TrussProblem p(d);
    REQUIRE(p.num_dofs() <= 8);
    for (double c : {2e11, 6e10, 1e9}) {
      const auto fact = assemble_k(p, c);
      for (int i = 0; i < 25; ++i) {
        const auto z = fixtures::random_point(p.num_elements(), rng, 1e-3, 1e8);
        const auto got = project_e(z, fact, p, c).point;
        const auto ref = fixtures::kkt_project_e(d, z, c);
        const Metric metric(c, std::vector<double>(p.volumes().begin(), p.volumes().end()));
        const PhasePoint ref_pt([&] {
          std::vector<ElementState> s(ref.strains.size());
          for (std::size_t e = 0; e < s.size(); ++e) s[e] = {ref.strains[e], ref.stresses[e]};
          return s;
        }());
        CHECK(ps_distance(got, ref_pt, metric) <= 1e-8 * ps_norm(ref_pt, metric));
      }
    }
  }
}

TEST_CASE("projection onto E is non-expansive") {
  std::mt19937_64 rng(17);
  for (const auto& d : fixtures::small_problems()) {
    const TrussProblem p(d);
    const double c = 6e10;
    const auto fact = assemble_k(p, c);
    const Metric metric(c, std::vector<double>(p.volumes().begin(), p.volumes().end()));
    for (int i = 0; i < 1000; ++i) {
      const auto a = fixtures::random_point(p.num_elements(), rng, 1e-3, 1e8);
      const auto b = fixtures::random_point(p.num_elements(), rng, 1e-3, 1e8);
      const double before = ps_distance(a, b, metric);
      const double after = ps_distance(project_e(a, fact, p, c).point, project_e(b, fact, p, c).point, metric);
      CHECK(after <= before * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("wrong lengths are structural errors") {
  const TrussProblem p(fixtures::one_bar(1.0, 1.0, 1.0, fixtures::linear_spec(1.0)));
  const auto fact = assemble_k(p, 1.0);
  CHECK_THROWS_AS(project_e(PhasePoint(2), fact, p, 1.0), StructuralError);
  CHECK_THROWS_AS(fact.solve(std::vector<double>{1.0, 2.0}), StructuralError);
}
