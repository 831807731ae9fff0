#include "psi/analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "psi/projection_d.hpp"

namespace psi {

ElementState closed_form_iterate(double modulus, double c, double f_over_a, double eps0, double sigma0, int n) {
  if (n < 0) throw std::invalid_argument("closed_form_iterate: n must be >= 0");
  if (n == 0) return {eps0, sigma0};
  const double a2 = (modulus / c) * (modulus / c);
  const double q = 1.0 / (1.0 + a2);
  // a^2 sum_{i=1..n} q^i = 1 - q^n
  const double qn = std::pow(q, n);
  const double strain = qn * eps0 + (1.0 - qn) * f_over_a / modulus;
  return {strain, modulus * strain};
}

double friedrichs_rate(double modulus, double c) {
  const double a = modulus / c;
  return 1.0 / (1.0 + a * a);
}

RateEstimate estimate_rate(std::span<const double> errors) {
  const std::size_t n = errors.size();
  if (n < 6) throw std::invalid_argument("estimate_rate: need at least 6 errors");
  for (double e : errors)
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("estimate_rate: errors must be positive");
  for (std::size_t i = n - n / 3; i < n; ++i)
    if (!(errors[i] < errors[i - 1])) throw std::invalid_argument("estimate_rate: tail is not strictly decreasing");

  const std::size_t start = n / 2;
  const std::size_t m = n - start;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    sx += static_cast<double>(i);
    sy += std::log(errors[i]);
  }
  const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double r = std::log(errors[i]) - (my + slope * (static_cast<double>(i) - mx));
    rss += r * r;
  }
  return {std::exp(slope), std::sqrt(rss / static_cast<double>(m)), m};
}

double perturbed_projection(double eps, double sigma, double modulus, double c, double k) {
  const double c2 = c * c, y = modulus, y2 = y * y;
  const double s = c2 + y2;
  const double zeroth = (c2 * eps + sigma * y) / s;
  const double first = y * (c2 * eps + sigma * y) * (sigma * y2 + c2 * (3.0 * eps * y - 2.0 * sigma)) / (s * s * s);
  return zeroth + k * first;
}

double bisect_law_inverse(const MaterialLaw& law, double target, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("bisect_law_inverse: empty interval");
  double flo = law.eval(lo) - target;
  const double fhi = law.eval(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw std::invalid_argument("bisect_law_inverse: target not bracketed");
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(1.0, std::abs(mid)) || mid == lo || mid == hi) return mid;
    const double fm = law.eval(mid) - target;
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double solve_for_stress(const MaterialLaw& law, double target) {
  double span = std::max(1e-12, 2.0 * std::abs(target) / law.zero_strain_modulus());
  for (int i = 0; i < 200; ++i, span *= 2.0)
    if (law.eval(-span) <= target && law.eval(span) >= target) return bisect_law_inverse(law, target, -span, span);
  throw std::invalid_argument("bounding_line_check: cannot bracket the solution strain");
}

}  // namespace

BoundingLineReport bounding_line_check(const MaterialLaw& law, double c, double f_over_a,
                                       std::span<const ElementState> trajectory, const PdOptions& options) {
  BoundingLineReport rep;
  const double eps_star = solve_for_stress(law, f_over_a);
  const double yt = law.tangent(eps_star);
  rep.solution_strain = eps_star;
  rep.bounding_modulus = yt;
  const double q = c * c / (c * c + yt * yt);
  const auto line_image = [&](double eps) { return eps_star + q * (eps - eps_star); };
  const double slack = 1e-12 * std::max(std::abs(eps_star), 1e-300);

  for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
    double a = trajectory[i].strain, b = trajectory[i + 1].strain;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!(line_image(a) < line_image(b))) {
      rep.ordering_preserved = false;
      std::ostringstream msg;
      msg.precision(17);
      msg << "ordering: line images of " << a << " < " << b << " are " << line_image(a) << ", " << line_image(b);
      if (rep.violation.empty()) rep.violation = msg.str();
    }
  }
  for (const auto& s : trajectory) {
    const double nonlinear = project_d_element({s.strain, f_over_a}, law, c, options).strain;
    const double line = line_image(s.strain);
    if (std::abs(nonlinear - eps_star) > std::abs(line - eps_star) + slack) {
      rep.nonlinear_dominates = false;
      std::ostringstream msg;
      msg.precision(17);
      msg << "dominance: from " << s.strain << " nonlinear image " << nonlinear << " is farther from " << eps_star
          << " than line image " << line;
      if (rep.violation.empty()) rep.violation = msg.str();
    }
  }
  return rep;
}

}  // namespace psi
