#pragma once

#include <cmath>
#include <cstdint>

#include "statdist/common.hpp"

namespace statdist {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::uint64_t evaluations = 0;
  bool converged = true;
};

namespace detail {

template <typename F>
void adaptive_simpson_step(const F& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol,
                           int depth, int max_depth, QuadratureResult& out) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  out.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
    out.value += left + right + delta / 15.0;
    out.error_estimate += std::abs(delta) / 15.0;
    if (depth >= max_depth && std::abs(delta) > 15.0 * tol) {
      out.converged = false;
    }
    return;
  }
  adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1,
                        max_depth, out);
  adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1,
                        max_depth, out);
}

}  // namespace detail

/// Adaptive Simpson integration of f over [a, b].
template <typename F>
QuadratureResult adaptive_simpson(const F& f, double a, double b,
                                  double tol = 1e-9, int max_depth = 40) {
  QuadratureResult out;
  if (a == b) return out;
  const double fa = f(a);
  const double fm = f(0.5 * (a + b));
  const double fb = f(b);
  out.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, 0, max_depth,
                                out);
  if (!std::isfinite(out.value)) {
    throw NumericError("quadrature produced a non-finite value");
  }
  return out;
}

}  // namespace statdist
