#include "psi/projection_d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psi/errors.hpp"
#include "psi/parallel.hpp"

namespace psi {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Local {
  const MaterialLaw& law;
  double eps;
  double sigma;
  double c;

  // g(a) - g(b) for g(x) = C (x - eps)^2 / 2 + (m(x) - sigma)^2 / (2 C),
  // grouped so that nearby points do not cancel catastrophically.
  double diff(double a, double ma, double b, double mb) const {
    return 0.5 * c * (a - b) * (a + b - 2.0 * eps) + (ma - mb) * (ma + mb - 2.0 * sigma) / (2.0 * c);
  }
  // E-L residual g'(x)
  double el(double x) const { return c * (x - eps) + (law.eval(x) - sigma) * law.tangent(x) / c; }
  double el_derivative(double x) const {
    const double mp = law.tangent(x);
    return c + (mp * mp + (law.eval(x) - sigma) * law.curvature(x)) / c;
  }
};

/// Brent's minimiser on [lo, hi] for h(x) = g(x) - g(anchor). `x`, `fx`
/// carry the best point in and out; only strict improvements are accepted.
void brent(const Local& p, double anchor, double m_anchor, double lo, double hi, double tol_abs, int max_iter,
           std::size_t element, double& x, double& fx) {
  const auto h = [&](double t) { return p.diff(t, p.law.eval(t), anchor, m_anchor); };
  constexpr double golden = 0.3819660112501051;
  double a = lo, b = hi;
  double v = x, w = x;
  double fv = fx, fw = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double xm = 0.5 * (a + b);
    const double tol1 = 2.0 * kEps * std::abs(x) + tol_abs;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) return;
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double s = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) s = -s;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(s) < std::abs(0.5 * q * e_prev) && s > q * (a - x) && s < q * (b - x)) {
        d = s / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = xm >= x ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = h(u);
    if (fu < fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w, fv = fw;
      w = x, fw = fx;
      x = u, fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w, fv = fw;
        w = u, fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u, fv = fu;
      }
    }
  }
  throw ProjectionError("projection onto the constitutive law: minimiser did not converge (element " +
                            std::to_string(element) + ")",
                        element, x);
}

double derivative_free(const Local& p, double radius, const PdOptions& options, std::size_t element) {
  const double lo = p.eps - radius;
  const double hi = p.eps + radius;
  const double m_eps = p.law.eval(p.eps);

  // coarse scan of the whole bracket, anchored at eps
  const int n = std::max(options.scan_points, 3);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n) + 2);
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * i / (n - 1));
  xs.push_back(p.eps);
  if (lo < 0.0 && hi > 0.0) xs.push_back(0.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> hs(xs.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    hs[i] = p.diff(xs[i], p.law.eval(xs[i]), p.eps, m_eps);
    if (hs[i] < hs[best]) best = i;
  }
  double x = xs[best];
  double fx = hs[best];
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min(best + 1, xs.size() - 1)];
  brent(p, p.eps, m_eps, a, b, 1e-12 * radius, options.max_iter, element, x, fx);

  // re-anchor at the current best point and polish in shrinking windows
  for (double rel : {1e-6, 1e-9}) {
    const double anchor = x;
    const double m_anchor = p.law.eval(anchor);
    double half = rel * radius;
    for (int grow = 0; grow < 8; ++grow) {
      const double left = p.diff(anchor - half, p.law.eval(anchor - half), anchor, m_anchor);
      const double right = p.diff(anchor + half, p.law.eval(anchor + half), anchor, m_anchor);
      if (left >= 0.0 && right >= 0.0) break;
      half *= 10.0;
    }
    double fa = 0.0;
    brent(p, anchor, m_anchor, std::max(lo, anchor - half), std::min(hi, anchor + half), 1e-15 * radius,
          options.max_iter, element, x, fa);
  }

  // Distance differences bottom out near sqrt of the law's rounding error;
  // on smooth laws finish with a bracketed root polish of g' around x.
  if (p.law.smooth()) {
    double w = std::max(1e-9 * radius, 1e3 * kEps * std::abs(x));
    double a_lo = std::max(lo, x - w), a_hi = std::min(hi, x + w);
    for (int grow = 0; grow < 3 && !(p.el(a_lo) < 0.0 && p.el(a_hi) > 0.0); ++grow) {
      w *= 10.0;
      a_lo = std::max(lo, x - w), a_hi = std::min(hi, x + w);
    }
    if (p.el(a_lo) < 0.0 && p.el(a_hi) > 0.0) {
      double t = x;
      for (int it = 0; it < 60; ++it) {
        const double f = p.el(t);
        if (f == 0.0) break;
        (f < 0.0 ? a_lo : a_hi) = t;
        const double fp = p.el_derivative(t);
        double next = fp > 0.0 ? t - f / fp : a_lo - 1.0;
        if (!(next > a_lo && next < a_hi)) next = 0.5 * (a_lo + a_hi);
        const bool done = std::abs(next - t) <= 2.0 * kEps * std::abs(t) || a_hi - a_lo <= 4.0 * kEps * std::abs(t);
        t = next;
        if (done) break;
      }
      x = t;
    }
  }
  return x;
}

/// Sign-changing sub-bracket of the E-L residual, preferring the one that
/// contains eps.
bool el_bracket(const Local& p, double radius, const PdOptions& options, double& lo, double& hi, double& flo,
                double& fhi) {
  lo = p.eps - radius;
  hi = p.eps + radius;
  flo = p.el(lo);
  fhi = p.el(hi);
  if (flo < 0.0 && fhi > 0.0) return true;
  const int n = std::max(options.scan_points, 3);
  double prev_x = lo, prev_f = flo;
  double best_gap = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int i = 1; i < n; ++i) {
    const double xi = lo + 2.0 * radius * i / (n - 1);
    const double fi = p.el(xi);
    if (prev_f < 0.0 && fi >= 0.0) {
      const double gap = std::max(0.0, std::max(prev_x - p.eps, p.eps - xi));
      if (gap < best_gap) {
        best_gap = gap;
        found = true;
        lo = prev_x, flo = prev_f;
        hi = xi, fhi = fi;
      }
    }
    prev_x = xi, prev_f = fi;
  }
  return found;
}

double el_tolerance(double x, double radius) { return 2.0 * kEps * std::abs(x) + 1e-14 * radius; }

double newton_el(const Local& p, double radius, const PdOptions& options, std::size_t element) {
  double lo, hi, flo, fhi;
  if (!el_bracket(p, radius, options, lo, hi, flo, fhi))
    throw ProjectionError("newton projection: no sign change of the stationarity residual (element " +
                              std::to_string(element) + ")",
                          element, p.eps);
  if (fhi == 0.0) return hi;
  double x = std::clamp(p.eps, lo, hi);
  for (int it = 0; it < options.max_iter; ++it) {
    const double f = p.el(x);
    if (f == 0.0) return x;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    const double fp = p.el_derivative(x);
    double next = (fp > 0.0) ? x - f / fp : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= el_tolerance(x, radius) || hi - lo <= el_tolerance(x, radius)) return x;
  }
  throw ProjectionError("newton projection: iteration cap reached (element " + std::to_string(element) + ")",
                        element, x);
}

double secant_el(const Local& p, double radius, const PdOptions& options, std::size_t element) {
  double lo, hi, flo, fhi;
  if (!el_bracket(p, radius, options, lo, hi, flo, fhi))
    throw ProjectionError("secant projection: no sign change of the stationarity residual (element " +
                              std::to_string(element) + ")",
                          element, p.eps);
  if (fhi == 0.0) return hi;
  double x0 = std::clamp(p.eps, lo, hi);
  double f0 = p.el(x0);
  if (f0 == 0.0) return x0;
  double x1 = x0 + ((f0 < 0.0) ? 1e-3 : -1e-3) * radius;
  if (!(x1 > lo && x1 < hi)) x1 = 0.5 * (lo + hi);
  (f0 < 0.0 ? lo : hi) = x0;
  for (int it = 0; it < options.max_iter; ++it) {
    const double f1 = p.el(x1);
    if (f1 == 0.0) return x1;
    if (f1 < 0.0)
      lo = x1;
    else
      hi = x1;
    const double denom = f1 - f0;
    double next = denom != 0.0 ? x1 - f1 * (x1 - x0) / denom : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x1);
    x0 = x1, f0 = f1;
    x1 = next;
    if (step <= el_tolerance(x1, radius) || hi - lo <= el_tolerance(x1, radius)) return x1;
  }
  throw ProjectionError("secant projection: iteration cap reached (element " + std::to_string(element) + ")",
                        element, x1);
}

}  // namespace

ElementState project_d_element(const ElementState& z, const MaterialLaw& law, double c, const PdOptions& options,
                               std::size_t element) {
  if (!(c > 0.0)) throw ValidationError("distance constant C must be positive");
  if (options.method != PdMethod::DerivativeFreeMin && !law.smooth())
    throw ValidationError("projection method '" + std::string(to_string(options.method)) +
                          "' needs a smooth law; use the derivative-free method with the " + law.name() + " law");
  if (!std::isfinite(z.strain) || !std::isfinite(z.stress))
    throw ProjectionError("projection input is not finite (element " + std::to_string(element) + ")", element,
                          z.strain);
  if (law.eval(z.strain) == z.stress) return z;

  const Local p{law, z.strain, z.stress, c};
  const double radius = std::abs(z.strain) + std::abs(z.stress - law.eval(0.0)) / c + options.strain_floor;
  double x = 0.0;
  switch (options.method) {
    case PdMethod::DerivativeFreeMin: x = derivative_free(p, radius, options, element); break;
    case PdMethod::NewtonEL: x = newton_el(p, radius, options, element); break;
    case PdMethod::SecantEL: x = secant_el(p, radius, options, element); break;
  }
  return {x, law.eval(x)};
}

PhasePoint project_d(const PhasePoint& z, const MaterialLaw& law, const Metric& metric, const PdOptions& options,
                     unsigned workers) {
  if (z.size() != metric.size())
    throw StructuralError("project_d: phase point has " + std::to_string(z.size()) + " states, metric has " +
                          std::to_string(metric.size()));
  std::vector<ElementState> out(z.size());
  parallel_for(z.size(), workers,
               [&](std::size_t e) { out[e] = project_d_element(z[e], law, metric.c(), options, e); });
  return PhasePoint(std::move(out));
}

CubicCoefficients el_cubic_coeffs(const ElementState& z, double modulus, double k, double c) {
  const double a2 = (modulus / c) * (modulus / c);
  const double yc2 = modulus / (c * c);
  return {-2.0 * a2 * k * k, 3.0 * k * a2, -1.0 - 2.0 * k * yc2 * z.stress - a2, z.strain + z.stress * yc2};
}

std::vector<double> real_cubic_roots(const CubicCoefficients& poly) {
  const double scale = std::max({std::abs(poly.a2), std::abs(poly.a1), std::abs(poly.a0)});
  std::vector<double> roots;
  if (std::abs(poly.a3) > 1e-14 * scale) {
    // depressed cubic t^3 + P t + Q with x = t - b / 3
    const double b = poly.a2 / poly.a3, c = poly.a1 / poly.a3, d = poly.a0 / poly.a3;
    const double P = c - b * b / 3.0;
    const double Q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = Q * Q / 4.0 + P * P * P / 27.0;
    const double shift = -b / 3.0;
    if (disc > 0.0) {
      const double s = std::sqrt(disc);
      roots.push_back(std::cbrt(-Q / 2.0 + s) + std::cbrt(-Q / 2.0 - s) + shift);
    } else if (P == 0.0) {
      roots.push_back(shift);
    } else {
      const double r = 2.0 * std::sqrt(-P / 3.0);
      const double arg = std::clamp(3.0 * Q / (P * r), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int j = 0; j < 3; ++j) roots.push_back(r * std::cos(phi - 2.0 * M_PI * j / 3.0) + shift);
    }
  } else if (std::abs(poly.a2) > 1e-14 * std::max(std::abs(poly.a1), std::abs(poly.a0))) {
    const double disc = poly.a1 * poly.a1 - 4.0 * poly.a2 * poly.a0;
    if (disc >= 0.0) {
      const double q = -0.5 * (poly.a1 + std::copysign(std::sqrt(disc), poly.a1));
      roots.push_back(q / poly.a2);
      if (q != 0.0) roots.push_back(poly.a0 / q);
    }
  } else if (poly.a1 != 0.0) {
    roots.push_back(-poly.a0 / poly.a1);
  }
  for (double& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const double d = poly.derivative(r);
      if (d == 0.0) break;
      const double step = poly(r) / d;
      if (!std::isfinite(step)) break;
      r -= step;
      if (std::abs(step) <= kEps * std::abs(r)) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double linear_projection_strain(const ElementState& z, double modulus, double c) {
  const double a2 = (modulus / c) * (modulus / c);
  return (z.strain + a2 * z.stress / modulus) / (1.0 + a2);
}

double select_perturbed_root(const CubicCoefficients& poly, const ElementState& z, double modulus, double c) {
  const auto roots = real_cubic_roots(poly);
  if (roots.empty()) throw ValidationError("stationarity cubic has no real root");
  const double target = linear_projection_strain(z, modulus, c);
  double best = roots.front();
  for (double r : roots) {
    const double dr = std::abs(r - target), db = std::abs(best - target);
    if (dr < db || (dr == db && std::abs(r) < std::abs(best))) best = r;
  }
  return best;
}

}  // namespace psi
