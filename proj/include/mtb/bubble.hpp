#pragma once
// Closed forms for the limiting bubble and its first-order correction.
//
// The bubble eta0(r) = -log(1 + r^2) solves  -Delta eta0 = 4 e^{2 eta0}  with
// total curvature mass 4 pi.  The correction w solves the linearized Cauchy
// problem
//
//     -Delta w = 4 e^{2 eta0} (eta0 + eta0^2 + 2 w),  w(0) = w'(0) = 0,
//
// and admits a closed form in terms of the auxiliary integral
// I(x) = int_1^x log t / (1 - t) dt  (a dilogarithm: I(1 + y) = Li2(-y)):
//
//     w = eta0 + 2 r^2/(1+r^2) - eta0^2/2 + ((1-r^2)/(1+r^2)) I(1+r^2).
//
// Everything is scalar-templated; the long-double instantiation feeds the
// finite-difference residual checks, which divide by h^2 and need a noise
// floor well below double roundoff.

#include "mtb/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mtb {

/// Bubble profile eta0(r) = -log(1 + r^2).
template <typename Scalar>
Scalar eta0(Scalar r) {
  if (!(r >= 0) || r > Scalar(1e140)) throw std::invalid_argument("eta0: radius out of range");
  return -std::log1p(r * r);
}

/// eta0'(r) = -2 r / (1 + r^2).
template <typename Scalar>
Scalar eta0_prime(Scalar r) {
  if (!(r >= 0) || r > Scalar(1e140)) throw std::invalid_argument("eta0_prime: radius out of range");
  return -2 * r / (1 + r * r);
}

/// eta0 at log-radius s, overflow-safe for any |s| (r = e^s up to e^{450}).
template <typename Scalar>
Scalar eta0_log_radius(Scalar s) {
  if (s > 0) return -(2 * s + std::log1p(std::exp(-2 * s)));
  return -std::log1p(std::exp(2 * s));
}

/// I(x) = int_1^x log t / (1 - t) dt for x >= 1.  The integrand is analytic
/// at t = 1 (value -1); near 1 the alternating series
/// I(x) = sum_{m>=1} (1-x)^m / m^2 converges geometrically, and beyond 1.5
/// the substitution t = e^v yields the smooth integrand -v / (1 - e^{-v}).
template <typename Scalar>
Scalar aux_integral(Scalar x) {
  if (!(x >= 1) || x > Scalar(1e290)) throw std::invalid_argument("aux_integral: x out of range");
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar series_edge = Scalar(1.5);

  const auto series_part = [&](Scalar xx) {
    const Scalar z = 1 - xx;  // |z| <= 1/2
    Scalar term = z, sum = z;
    for (int m = 2; m <= 200; ++m) {
      term *= z;
      const Scalar add = term / Scalar(m * m);
      sum += add;
      if (std::abs(add) <= eps * std::abs(sum)) break;
    }
    return sum;
  };

  if (x <= series_edge) return series_part(x);
  const Scalar tail = integrate_adaptive(
      [](Scalar v) { return -v / (1 - std::exp(-v)); }, std::log(series_edge), std::log(x),
      Scalar(32) * eps, std::numeric_limits<Scalar>::min(), 52);
  return series_part(series_edge) + tail;
}

/// First-order correction w(r); w(0) = 0, w ~ r^4/4 near 0, and
/// w - eta0 -> 2 + pi^2/6 at infinity.
template <typename Scalar>
Scalar w_closed_form(Scalar r) {
  if (!(r >= 0) || r > Scalar(1e140)) throw std::invalid_argument("w_closed_form: radius out of range");
  const Scalar q = r * r;
  const Scalar e0 = -std::log1p(q);
  return e0 + 2 * q / (1 + q) - e0 * e0 / 2 + ((1 - q) / (1 + q)) * aux_integral(1 + q);
}

/// w'(r); w' ~ r^3 near 0.
template <typename Scalar>
Scalar w_prime(Scalar r) {
  if (!(r >= 0) || r > Scalar(1e70)) throw std::invalid_argument("w_prime: radius out of range");
  if (r < Scalar(1e-8)) return r * r * r;
  const Scalar q = r * r;
  const Scalar op = 1 + q, op2 = op * op;
  return 2 * r * (1 - q) / op2 - 2 * std::log1p(q) / (r * op) - (4 * r / op2) * aux_integral(1 + q);
}

/// sup over a log grid on [0, r_max] of |w - eta0|; stabilizes at 2 + pi^2/6.
template <typename Scalar>
Scalar w_bound_check(Scalar r_max, int n = 1024) {
  if (!(r_max > 1) || n < 2) throw std::invalid_argument("w_bound_check: bad grid");
  const Scalar lo = std::log(Scalar(1e-3)), hi = std::log(r_max);
  Scalar sup = 0;  // the r = 0 sample: w(0) = eta0(0) = 0
  for (int i = 0; i < n; ++i) {
    const Scalar r = std::exp(lo + (hi - lo) * Scalar(i) / Scalar(n - 1));
    sup = std::max(sup, std::abs(w_closed_form(r) - eta0(r)));
  }
  return sup;
}

/// Smallest radius with w(r) <= -1.  w rises to a small positive maximum near
/// r = 1.77 and then decreases monotonically, so the crossing is simple.
inline double find_R0() {
  double lo = 1.0, hi = 50.0;
  if (!(w_closed_form(lo) > -1.0) || !(w_closed_form(hi) < -1.0))
    throw SolverError("find_R0: bracket [1, 50] does not straddle w = -1");
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (w_closed_form(mid) > -1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mtb
