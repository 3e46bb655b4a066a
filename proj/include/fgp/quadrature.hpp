#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace fgp {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double fa, double m, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm, double whole,
                    double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, lm, flm, m, fm);
  const double right = simpson(f, m, fm, rm, frm, b, fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw QuadratureError("adaptive Simpson: max depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a,b] with absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = detail::simpson(f, a, fa, m, fm, b, fb);
  return detail::adapt(f, a, fa, b, fb, m, fm, whole,
                       std::max(abs_tol, 1e-300), max_depth);
}

// Integral over [u0, infinity) of a non-negative, eventually-decreasing
// integrand. Geometric panels [u0 2^k, u0 2^{k+1}]; once panel contributions
// decay geometrically the remaining tail is extrapolated from the observed
// ratio. Throws QuadratureError when no decay is observed within the panel cap.
inline double integrate_to_infinity(const std::function<double(double)>& f,
                                    double u0, double rel_tol,
                                    int max_panels = 256) {
  if (!(u0 > 0.0)) throw QuadratureError("integrate_to_infinity: u0 must be > 0");
  double total = 0.0;
  double prev = -1.0;
  double lo = u0;
  for (int k = 0; k < max_panels; ++k) {
    const double hi = lo * 2.0;
    const double scale = std::max(total, f(lo) * lo + 1e-300);
    const double panel = integrate(f, lo, hi, 0.25 * rel_tol * scale / 8.0);
    total += panel;
    if (prev >= 0.0 && panel <= prev) {
      const double r = (prev > 0.0) ? panel / prev : 0.0;
      if (r < 0.999) {
        const double tail = panel * r / (1.0 - r);
        if (tail <= 0.5 * rel_tol * total) return total + tail;
      }
    }
    prev = panel;
    lo = hi;
  }
  throw QuadratureError("integrate_to_infinity: tail did not converge within " +
                        std::to_string(max_panels) + " panels");
}

}  // namespace fgp
