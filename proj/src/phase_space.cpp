#include "psi/phase_space.hpp"

#include <cmath>
#include <string>

#include "psi/errors.hpp"

namespace psi {

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw StructuralError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
}

}  // namespace

std::vector<double> PhasePoint::strains() const {
  std::vector<double> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s.strain);
  return out;
}

std::vector<double> PhasePoint::stresses() const {
  std::vector<double> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s.stress);
  return out;
}

bool PhasePoint::all_finite() const noexcept {
  for (const auto& s : states_)
    if (!std::isfinite(s.strain) || !std::isfinite(s.stress)) return false;
  return true;
}

PhasePoint operator-(const PhasePoint& a, const PhasePoint& b) {
  check_sizes(a.size(), b.size(), "phase point difference");
  PhasePoint out(a.size());
  for (std::size_t e = 0; e < a.size(); ++e)
    out[e] = {a[e].strain - b[e].strain, a[e].stress - b[e].stress};
  return out;
}

PhasePoint operator*(double t, const PhasePoint& z) {
  PhasePoint out(z.size());
  for (std::size_t e = 0; e < z.size(); ++e) out[e] = {t * z[e].strain, t * z[e].stress};
  return out;
}

Metric::Metric(double c_constant, std::vector<double> volumes) : c_(c_constant), volumes_(std::move(volumes)) {
  if (!(c_ > 0.0) || !std::isfinite(c_)) throw StructuralError("metric: distance constant must be positive");
  for (std::size_t e = 0; e < volumes_.size(); ++e)
    if (!(volumes_[e] > 0.0) || !std::isfinite(volumes_[e]))
      throw StructuralError("metric: volume of element " + std::to_string(e) + " must be positive");
}

double local_distance_sq(const ElementState& a, const ElementState& b, double c) {
  const double de = a.strain - b.strain;
  const double ds = a.stress - b.stress;
  return 0.5 * c * de * de + 0.5 * ds * ds / c;
}

double ps_inner(const PhasePoint& a, const PhasePoint& b, const Metric& m) {
  check_sizes(a.size(), m.size(), "ps_inner");
  check_sizes(b.size(), m.size(), "ps_inner");
  const double c = m.c();
  double sum = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e)
    sum += m.volumes()[e] * (0.5 * c * a[e].strain * b[e].strain + 0.5 * a[e].stress * b[e].stress / c);
  return sum;
}

double ps_norm(const PhasePoint& z, const Metric& m) {
  check_sizes(z.size(), m.size(), "ps_norm");
  double sum = 0.0;
  for (std::size_t e = 0; e < z.size(); ++e) sum += m.volumes()[e] * local_distance_sq(z[e], {}, m.c());
  return std::sqrt(sum);
}

double ps_distance(const PhasePoint& a, const PhasePoint& b, const Metric& m) {
  check_sizes(a.size(), m.size(), "ps_distance");
  check_sizes(b.size(), m.size(), "ps_distance");
  double sum = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) sum += m.volumes()[e] * local_distance_sq(a[e], b[e], m.c());
  return std::sqrt(sum);
}

std::vector<double> rescaled_coordinates(const PhasePoint& z, const Metric& m) {
  check_sizes(z.size(), m.size(), "rescaled_coordinates");
  std::vector<double> out;
  out.reserve(2 * z.size());
  for (std::size_t e = 0; e < z.size(); ++e) {
    const double w = m.volumes()[e];
    out.push_back(std::sqrt(0.5 * w * m.c()) * z[e].strain);
    out.push_back(std::sqrt(0.5 * w / m.c()) * z[e].stress);
  }
  return out;
}

}  // namespace psi
