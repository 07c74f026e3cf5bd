#include "lglab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lglab/errors.hpp"

namespace lglab {

namespace {

void check_grid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw config_error("interpolation grid and values differ in length");
  if (x.size() < 2) throw config_error("interpolation needs at least 2 nodes");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1]))
      throw config_error("interpolation grid must be strictly increasing");
  for (double v : y)
    if (!std::isfinite(v)) throw config_error("interpolation values must be finite");
}

// Parabolic three-point endpoint slope, clamped as in Fritsch-Carlson so the
// end segment cannot overshoot on monotone data.
double endpoint_slope(double h0, double h1, double d0, double d1) {
  double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (d * d0 <= 0.0) return 0.0;
  if (d1 * d0 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
  return d;
}

std::vector<double> butland_slopes(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), del(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    del[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = del[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (del[i - 1] * del[i] > 0.0) {
      // Fritsch-Butland weighted harmonic mean.
      double a = (h[i - 1] + 2.0 * h[i]) / (3.0 * (h[i - 1] + h[i]));
      d[i] = del[i - 1] * del[i] / (a * del[i] + (1.0 - a) * del[i - 1]);
    } else {
      d[i] = 0.0;
    }
  }
  d[0] = endpoint_slope(h[0], h[1], del[0], del[1]);
  d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  return d;
}

// Not-a-knot cubic spline, returned as node slopes. Solves the standard
// tridiagonal system for first derivatives with third-derivative continuity
// imposed at the second and second-to-last nodes.
std::vector<double> notaknot_slopes(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    del[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) return {del[0], del[0]};
  if (n == 3) {
    // single parabola through the three points
    std::vector<double> d(3);
    double a = (del[1] - del[0]) / (x[2] - x[0]);
    d[0] = del[0] - a * h[0];
    d[1] = del[0] + a * h[0];
    d[2] = del[1] + a * h[1];
    return d;
  }
  std::vector<double> lo(n), di(n), up(n), rhs(n), d(n);
  // interior rows: C1+C2 continuity of the Hermite pieces
  for (std::size_t i = 1; i + 1 < n; ++i) {
    lo[i] = h[i];
    di[i] = 2.0 * (h[i - 1] + h[i]);
    up[i] = h[i - 1];
    rhs[i] = 3.0 * (h[i] * del[i - 1] + h[i - 1] * del[i]);
  }
  // not-a-knot rows
  di[0] = h[1];
  up[0] = h[0] + h[1];
  rhs[0] = ((3.0 * h[0] + 2.0 * h[1]) * h[1] * del[0] + h[0] * h[0] * del[1]) /
           (h[0] + h[1]);
  di[n - 1] = h[n - 3];
  lo[n - 1] = h[n - 2] + h[n - 3];
  rhs[n - 1] = (h[n - 2] * h[n - 2] * del[n - 3] +
                (2.0 * h[n - 3] + 3.0 * h[n - 2]) * h[n - 3] * del[n - 2]) /
               (h[n - 3] + h[n - 2]);
  // Thomas algorithm
  for (std::size_t i = 1; i < n; ++i) {
    double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  d[n - 1] = rhs[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (rhs[i] - up[i] * d[i + 1]) / di[i];
  return d;
}

// 3-point Gauss-Legendre on [a,b]; exact for quintics, so exact for a cubic
// segment and for x * cubic.
template <class F>
double gauss3(F&& f, double a, double b) {
  static const double r = std::sqrt(0.6);
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  return hw * ((5.0 / 9.0) * f(c - hw * r) + (8.0 / 9.0) * f(c) +
               (5.0 / 9.0) * f(c + hw * r));
}

}  // namespace

PiecewiseCubic PiecewiseCubic::monotone(std::vector<double> x,
                                        std::vector<double> y) {
  check_grid(x, y);
  auto d = butland_slopes(x, y);
  return PiecewiseCubic(std::move(x), std::move(y), std::move(d));
}

PiecewiseCubic PiecewiseCubic::spline(std::vector<double> x,
                                      std::vector<double> y) {
  check_grid(x, y);
  auto d = notaknot_slopes(x, y);
  return PiecewiseCubic(std::move(x), std::move(y), std::move(d));
}

PiecewiseCubic::PiecewiseCubic(std::vector<double> x, std::vector<double> y,
                               std::vector<double> d)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(d)) {
  const std::size_t n = x_.size();
  cum0_.assign(n, 0.0);
  cum1_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto f = [&](double t) {
      // evaluate segment i directly to avoid the search
      double h = x_[i + 1] - x_[i];
      double s = (t - x_[i]) / h;
      double s2 = s * s, s3 = s2 * s;
      return y_[i] * (2 * s3 - 3 * s2 + 1) + y_[i + 1] * (-2 * s3 + 3 * s2) +
             h * (d_[i] * (s3 - 2 * s2 + s) + d_[i + 1] * (s3 - s2));
    };
    cum0_[i + 1] = cum0_[i] + gauss3(f, x_[i], x_[i + 1]);
    cum1_[i + 1] =
        cum1_[i] + gauss3([&](double t) { return t * f(t); }, x_[i], x_[i + 1]);
  }
}

std::size_t PiecewiseCubic::segment_of(double t) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double PiecewiseCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  std::size_t i = segment_of(t);
  double h = x_[i + 1] - x_[i];
  double s = (t - x_[i]) / h;
  double s2 = s * s, s3 = s2 * s;
  return y_[i] * (2 * s3 - 3 * s2 + 1) + y_[i + 1] * (-2 * s3 + 3 * s2) +
         h * (d_[i] * (s3 - 2 * s2 + s) + d_[i + 1] * (s3 - s2));
}

double PiecewiseCubic::derivative(double t) const {
  t = std::clamp(t, x_.front(), x_.back());
  std::size_t i = segment_of(t);
  double h = x_[i + 1] - x_[i];
  double s = (t - x_[i]) / h;
  double s2 = s * s;
  return (y_[i] * (6 * s2 - 6 * s) + y_[i + 1] * (-6 * s2 + 6 * s)) / h +
         d_[i] * (3 * s2 - 4 * s + 1) + d_[i + 1] * (3 * s2 - 2 * s);
}

double PiecewiseCubic::integral(double t) const {
  t = std::clamp(t, x_.front(), x_.back());
  std::size_t i = segment_of(t);
  return cum0_[i] + gauss3([&](double u) { return (*this)(u); }, x_[i], t);
}

double PiecewiseCubic::first_moment(double t) const {
  t = std::clamp(t, x_.front(), x_.back());
  std::size_t i = segment_of(t);
  return cum1_[i] +
         gauss3([&](double u) { return u * (*this)(u); }, x_[i], t);
}

}  // namespace lglab
