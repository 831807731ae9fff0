#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psi {

/// Local phase-space coordinates of one bar: axial strain and stress [Pa].
struct ElementState {
  double strain = 0.0;
  double stress = 0.0;

  bool operator==(const ElementState&) const = default;
};

/// A point of the global phase space: one state per element, ordered by
/// element index.
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(std::size_t n) : states_(n) {}
  explicit PhasePoint(std::vector<ElementState> states) : states_(std::move(states)) {}

  std::size_t size() const noexcept { return states_.size(); }
  ElementState& operator[](std::size_t e) { return states_[e]; }
  const ElementState& operator[](std::size_t e) const { return states_[e]; }

  auto begin() noexcept { return states_.begin(); }
  auto end() noexcept { return states_.end(); }
  auto begin() const noexcept { return states_.begin(); }
  auto end() const noexcept { return states_.end(); }

  std::span<const ElementState> states() const noexcept { return states_; }
  std::vector<double> strains() const;
  std::vector<double> stresses() const;

  bool all_finite() const noexcept;

  bool operator==(const PhasePoint&) const = default;

 private:
  std::vector<ElementState> states_;
};

PhasePoint operator-(const PhasePoint& a, const PhasePoint& b);
PhasePoint operator*(double t, const PhasePoint& z);

/// Weighting of the phase-space inner product: the distance constant C [Pa]
/// and the element volumes w_e [m^3]. Both must be strictly positive.
class Metric {
 public:
  Metric(double c_constant, std::vector<double> volumes);

  double c() const noexcept { return c_; }
  std::span<const double> volumes() const noexcept { return volumes_; }
  std::size_t size() const noexcept { return volumes_.size(); }

 private:
  double c_;
  std::vector<double> volumes_;
};

/// ( sum_e w_e [ C eps_e^2 / 2 + sigma_e^2 / (2 C) ] )^(1/2)
double ps_norm(const PhasePoint& z, const Metric& m);

/// ps_norm(a - b), evaluated without forming the difference point.
double ps_distance(const PhasePoint& a, const PhasePoint& b, const Metric& m);

/// Phase-space inner product induced by the metric.
double ps_inner(const PhasePoint& a, const PhasePoint& b, const Metric& m);

/// Squared local distance without the volume factor:
/// C (da.strain)^2 / 2 + (da.stress)^2 / (2 C).
double local_distance_sq(const ElementState& a, const ElementState& b, double c);

/// Coordinates in which the metric is plain Euclidean:
/// (sqrt(w C / 2) eps, sqrt(w / (2 C)) sigma), interleaved per element.
std::vector<double> rescaled_coordinates(const PhasePoint& z, const Metric& m);

}  // namespace psi
