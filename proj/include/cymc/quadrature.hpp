#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace cymc {

/// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return {x, w};
}

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
inline double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
  auto [x, w] = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += w[i] * f(mid + half * x[i]);
  return acc * half;
}

struct AdaptiveResult {
  double value = 0.0;
  bool converged = true;
};

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double fa, double b,
                      double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline void adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                          double fb, double m, double fm, double whole, double rel_tol,
                          double scale, int depth, AdaptiveResult& out) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, fa, m, fm, lm, flm);
  double right = simpson(f, m, fm, b, fb, rm, frm);
  double err = left + right - whole;
  if (std::abs(err) <= 15.0 * rel_tol * scale || depth > 48) {
    if (depth > 48 && std::abs(err) > 15.0 * rel_tol * scale) out.converged = false;
    out.value += left + right + err / 15.0;
    return;
  }
  adaptive_step(f, a, fa, m, fm, lm, flm, left, rel_tol * 0.5, scale, depth + 1, out);
  adaptive_step(f, m, fm, b, fb, rm, frm, right, rel_tol * 0.5, scale, depth + 1, out);
}
} // namespace detail

/// Adaptive Simpson on [a, b] to the given relative tolerance; `scale` sets
/// the magnitude the tolerance is relative to (pass an estimate of |integral|).
inline AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                       double rel_tol, double scale) {
  AdaptiveResult out;
  if (a == b) return out;
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = detail::simpson(f, a, fa, b, fb, m, fm);
  detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, rel_tol, scale, 0, out);
  return out;
}

} // namespace cymc
