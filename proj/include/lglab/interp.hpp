#pragma once

#include <cstddef>
#include <vector>

namespace lglab {

/// Piecewise cubic Hermite interpolant on a strictly increasing grid.
///
/// Two constructions:
///   - monotone(): Fritsch-Butland slopes with parabolic endpoint slopes
///     clamped to the monotone region. Shape preserving: on data that is
///     monotone between nodes the interpolant never overshoots the node
///     values, so probabilities stay in [0, 1].
///   - spline(): C2 cubic spline with not-a-knot end conditions, for smooth
///     possibly oscillatory data.
///
/// Evaluation outside the grid clamps to the end node values; callers that
/// must reject out-of-range arguments do so before calling.
class PiecewiseCubic {
 public:
  static PiecewiseCubic monotone(std::vector<double> x, std::vector<double> y);
  static PiecewiseCubic spline(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  double derivative(double t) const;

  /// Integral of the interpolant from x.front() to t (t clamped to the grid).
  double integral(double t) const;
  /// Integral of x * f(x) from x.front() to t.
  double first_moment(double t) const;

  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return d_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }

 private:
  PiecewiseCubic(std::vector<double> x, std::vector<double> y,
                 std::vector<double> d);
  std::size_t segment_of(double t) const;

  std::vector<double> x_, y_, d_;
  std::vector<double> cum0_, cum1_;  // prefix integrals of f and x*f at nodes
};

}  // namespace lglab
