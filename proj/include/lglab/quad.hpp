#pragma once

#include <array>
#include <functional>
#include <vector>

namespace lglab {

/// Gauss-Legendre abscissae/weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence (machine precision, no tables).
template <int N>
struct GaussRule {
  std::array<double, N> node;
  std::array<double, N> weight;
  static const GaussRule& get();
};

struct QuadResult {
  double value;
  double error_estimate;
  long long evaluations;
};

/// Description of one integration problem for the oscillation-aware scheme.
struct OscillatorySpec {
  std::function<double(double)> integrand;
  /// Phase function in radians; panels whose phase span exceeds the guard are
  /// refused convergence while their amplitude still matters.
  std::function<double(double)> phase;
  /// Upper bound for |integrand| on [a, b]; used to retire negligible panels.
  std::function<double(double, double)> envelope;
};

/// Globally adaptive bisection quadrature (G15 value, |G15-G7| error) with an
/// oscillation guard: a panel spanning more than pi of phase cannot be
/// accepted on its error estimate alone unless its envelope bound is already
/// below its share of the tolerance. Splitting is worst-error-first with
/// deterministic tie-breaking, so results are bit-reproducible.
///
/// `splits` are interior points (sorted, deduplicated by the caller) where the
/// integrand or phase changes character; initial panels are cut there.
/// Throws numerical_error when max_panels is exhausted before reaching tol.
QuadResult integrate_oscillatory(const OscillatorySpec& spec, double a, double b,
                                 const std::vector<double>& splits, double tol,
                                 int max_panels = 400000);

}  // namespace lglab
