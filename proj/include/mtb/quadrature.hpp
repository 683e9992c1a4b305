#pragma once
// Adaptive Gauss-Kronrod 15(7) quadrature, generic over the scalar type.
// Intervals are bisected until the local Kronrod-Gauss discrepancy fits the
// tolerance apportioned to them; smooth integrands converge in a handful of
// panels per decade.

#include "mtb/rk45.hpp"  // SolverError

#include <cmath>
#include <limits>
#include <utility>

namespace mtb {

namespace detail {

// 15-point Kronrod abscissae (positive half) and weights; the even-index
// abscissae are the embedded 7-point Gauss rule.
template <typename Scalar>
struct GaussKronrod15 {
  static constexpr int kHalf = 8;
  static constexpr Scalar xk[kHalf] = {
      Scalar(0.991455371120812639206854697526329L),
      Scalar(0.949107912342758524526189684047851L),
      Scalar(0.864864423359769072789712788640926L),
      Scalar(0.741531185599394439863864773280788L),
      Scalar(0.586087235467691130294144838258730L),
      Scalar(0.405845151377397166906606412076961L),
      Scalar(0.207784955007898467600689403773245L),
      Scalar(0.0L)};
  static constexpr Scalar wk[kHalf] = {
      Scalar(0.022935322010529224963732008058970L),
      Scalar(0.063092092629978553290700663189204L),
      Scalar(0.104790010322250183839876322541518L),
      Scalar(0.140653259715525918745189590510238L),
      Scalar(0.169004726639267902826583426598550L),
      Scalar(0.190350578064785409913256402421014L),
      Scalar(0.204432940075298892414161999234649L),
      Scalar(0.209482141084727828012999174891714L)};
  static constexpr Scalar wg[4] = {
      Scalar(0.129484966168869693270611432679082L),
      Scalar(0.279705391489276667901467771423780L),
      Scalar(0.381830050505118944950369775488975L),
      Scalar(0.417959183673469387755102040816327L)};
};

/// One panel: returns (kronrod, |kronrod - gauss|).
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> gk15_panel(F&& f, Scalar a, Scalar b) {
  using Rule = GaussKronrod15<Scalar>;
  const Scalar c = (a + b) / 2, half = (b - a) / 2;
  Scalar kron = 0, gauss = 0;
  for (int i = 0; i < Rule::kHalf; ++i) {
    const Scalar dx = half * Rule::xk[i];
    const Scalar fsum =
        (i + 1 == Rule::kHalf) ? f(c) : f(c - dx) + f(c + dx);
    kron += Rule::wk[i] * fsum;
    if (i % 2 == 1) gauss += Rule::wg[i / 2] * fsum;
  }
  kron *= half;
  gauss *= half;
  return {kron, std::abs(kron - gauss)};
}

template <typename Scalar, typename F>
Scalar gk15_adaptive(F&& f, Scalar a, Scalar b, Scalar tol, int depth) {
  const auto [kron, disc] = gk15_panel(f, a, b);
  if (disc <= tol || b - a <= std::numeric_limits<Scalar>::epsilon() * (std::abs(a) + std::abs(b)))
    return kron;
  if (depth <= 0) throw SolverError("adaptive quadrature failed to converge");
  const Scalar c = (a + b) / 2, t2 = tol / 2;
  return gk15_adaptive(f, a, c, t2, depth - 1) + gk15_adaptive(f, c, b, t2, depth - 1);
}

}  // namespace detail

/// Integrate f over [a, b] to roughly max(abs_tol, rel_tol * |integral|).
/// Throws SolverError when bisection cannot reach the tolerance.
template <typename Scalar, typename F>
Scalar integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar rel_tol, Scalar abs_tol,
                          int max_depth = 48) {
  if (a == b) return Scalar(0);
  if (!(b > a)) return -integrate_adaptive(std::forward<F>(f), b, a, rel_tol, abs_tol, max_depth);
  const auto [estimate, disc] = detail::gk15_panel(f, a, b);
  (void)disc;
  const Scalar tol = std::max(abs_tol, rel_tol * std::abs(estimate));
  return detail::gk15_adaptive(f, a, b, tol, max_depth);
}

}  // namespace mtb
