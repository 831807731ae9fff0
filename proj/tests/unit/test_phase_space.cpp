#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "psi/errors.hpp"
#include "psi/phase_space.hpp"

using namespace psi;

TEST_CASE("norm of the zero point is zero") {
  const Metric m(3.0, {1.0, 2.0, 0.5});
  CHECK(ps_norm(PhasePoint(3), m) == 0.0);
}

TEST_CASE("norm of a single weighted state") {
  // w = 2, C = 4, (1, 2): sqrt((2/2)(4 * 1 + 4 / 4)) = sqrt(5)
  const Metric m(4.0, {2.0});
  const PhasePoint z(std::vector<ElementState>{{1.0, 2.0}});
  CHECK(ps_norm(z, m) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("norm is absolutely homogeneous") {
  std::mt19937_64 rng(1);
  const Metric m(2.5, {1.0, 3.0, 0.2, 7.0});
  const auto z = fixtures::random_point(4, rng, 1.0, 5.0);
  for (double t : {-3.0, 0.5, 2.0})
    CHECK(ps_norm(t * z, m) == doctest::Approx(std::abs(t) * ps_norm(z, m)).epsilon(1e-14));
}

TEST_CASE("distance examples") {
  const Metric m(1.0, {1.0});
  const PhasePoint a(std::vector<ElementState>{{0.0, 0.0}});
  const PhasePoint b(std::vector<ElementState>{{1.0, 1.0}});
  CHECK(ps_distance(a, b, m) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ps_distance(b, b, m) == 0.0);
}

TEST_CASE("distance is symmetric and equals the norm of the difference") {
  std::mt19937_64 rng(2);
  const Metric m(0.7, {1.0, 2.0, 3.0});
  for (int i = 0; i < 100; ++i) {
    const auto a = fixtures::random_point(3, rng, 1.0, 1.0);
    const auto b = fixtures::random_point(3, rng, 1.0, 1.0);
    CHECK(ps_distance(a, b, m) == ps_distance(b, a, m));
    CHECK(ps_distance(a, b, m) == doctest::Approx(ps_norm(a - b, m)).epsilon(1e-14));
  }
}

TEST_CASE("triangle inequality on random triples") {
  std::mt19937_64 rng(3);
  const Metric m(2e11 * 0.3, {1e-3, 5e-3, 2e-3, 1e-2, 4e-3});
  for (int i = 0; i < 1000; ++i) {
    const auto a = fixtures::random_point(5, rng, 1e-3, 1e8);
    const auto b = fixtures::random_point(5, rng, 1e-3, 1e8);
    const auto c = fixtures::random_point(5, rng, 1e-3, 1e8);
    CHECK(ps_distance(a, c, m) <= (ps_distance(a, b, m) + ps_distance(b, c, m)) * (1.0 + 1e-12));
  }
}

TEST_CASE("norm is positive definite") {
  std::mt19937_64 rng(4);
  const Metric m(5.0, {1.0, 0.1});
  for (int i = 0; i < 1000; ++i) {
    const auto z = fixtures::random_point(2, rng, 1.0, 1.0);
    CHECK(ps_norm(z, m) > 0.0);
  }
  CHECK(ps_norm(PhasePoint(std::vector<ElementState>{{0.0, 1e-100}, {0.0, 0.0}}), m) > 0.0);
}

TEST_CASE("rescaled coordinates make the metric Euclidean") {
  std::mt19937_64 rng(5);
  const Metric m(2e11 * 0.3, {1e-3, 5e-3, 2e-3});
  for (int i = 0; i < 200; ++i) {
    const auto z = fixtures::random_point(3, rng, 1e-3, 1e8);
    const auto r = rescaled_coordinates(z, m);
    double s = 0.0;
    for (double v : r) s += v * v;
    CHECK(std::abs(std::sqrt(s) - ps_norm(z, m)) <= 1e-14 * ps_norm(z, m));
  }
}

TEST_CASE("inner product is consistent with the norm") {
  std::mt19937_64 rng(6);
  const Metric m(3.0, {1.0, 2.0});
  const auto z = fixtures::random_point(2, rng, 1.0, 1.0);
  CHECK(ps_inner(z, z, m) == doctest::Approx(std::pow(ps_norm(z, m), 2)).epsilon(1e-14));
}

TEST_CASE("length mismatches and invalid metrics are rejected") {
  const Metric m(1.0, {1.0, 1.0});
  CHECK_THROWS_AS(ps_norm(PhasePoint(3), m), StructuralError);
  CHECK_THROWS_AS(ps_distance(PhasePoint(2), PhasePoint(3), m), StructuralError);
  CHECK_THROWS_AS(Metric(0.0, {1.0}), Error);
  CHECK_THROWS_AS(Metric(1.0, {1.0, -2.0}), Error);
}

TEST_CASE("strain and stress views") {
  const PhasePoint z(std::vector<ElementState>{{1.0, 2.0}, {3.0, 4.0}});
  CHECK(z.strains() == std::vector<double>{1.0, 3.0});
  CHECK(z.stresses() == std::vector<double>{2.0, 4.0});
  CHECK(z.all_finite());
  CHECK_FALSE(PhasePoint(std::vector<ElementState>{{NAN, 0.0}}).all_finite());
}
