#include "lglab/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lglab/errors.hpp"

namespace lglab {

std::vector<double> linspace(double start, double end, int n) {
  if (n < 2) throw config_error("axis needs at least 2 points");
  if (!(start < end)) throw config_error("axis start must be below end");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = start + (end - start) * static_cast<double>(i) / (n - 1);
  return v;
}

LineScan scan_line(const DecayModel& model, double t1, double ratio,
                   TimeWindow t2_range, int n_points) {
  if (!(ratio > 1.0)) throw std::domain_error("scan_line: ratio must exceed 1");
  if (!(t1 >= 0.0 && t1 < t2_range.start))
    throw std::domain_error("scan_line: need 0 <= t1 < t2 range start");
  LineScan scan;
  scan.t1 = t1;
  scan.ratio = ratio;
  scan.t2 = linspace(t2_range.start, t2_range.end, n_points);
  scan.k3.reserve(scan.t2.size());
  for (double t2 : scan.t2)
    scan.k3.push_back(
        k3(model, t1, t2, ratio * t2, Ontology::quantum_collapse).k3);
  return scan;
}

ScanGrid scan_grid(const DecayModel& model, double t1,
                   const std::vector<double>& t2_axis,
                   const std::vector<double>& t3_axis, int threads) {
  if (t2_axis.size() < 2 || t3_axis.size() < 2)
    throw config_error("scan_grid: axes need at least 2 points");
  for (std::size_t i = 0; i + 1 < t2_axis.size(); ++i)
    if (!(t2_axis[i] < t2_axis[i + 1]))
      throw config_error("scan_grid: t2 axis must be strictly increasing");
  for (std::size_t i = 0; i + 1 < t3_axis.size(); ++i)
    if (!(t3_axis[i] < t3_axis[i + 1]))
      throw config_error("scan_grid: t3 axis must be strictly increasing");
  if (!(t1 >= 0.0 && t1 < t2_axis.front()))
    throw std::domain_error("scan_grid: need 0 <= t1 < min(t2 axis)");

  ScanGrid grid;
  grid.t1 = t1;
  grid.t2_axis = t2_axis;
  grid.t3_axis = t3_axis;
  const std::size_t n2 = t2_axis.size(), n3 = t3_axis.size();
  grid.values.assign(n2 * n3, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::string> row_failure(n2);
  std::vector<long long> row_failed(n2, 0);
  auto fill_row = [&](std::size_t i2) {
    double t2 = t2_axis[i2];
    for (std::size_t i3 = 0; i3 < n3; ++i3) {
      double t3 = t3_axis[i3];
      if (!(t1 < t2 && t2 < t3)) continue;
      try {
        grid.values[i2 * n3 + i3] =
            k3(model, t1, t2, t3, Ontology::quantum_collapse).k3 - 1.0;
      } catch (const std::exception& e) {
        ++row_failed[i2];
        if (row_failure[i2].empty()) row_failure[i2] = e.what();
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1) {
    for (std::size_t i2 = 0; i2 < n2; ++i2) fill_row(i2);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w]() {
        for (std::size_t i2 = static_cast<std::size_t>(w); i2 < n2;
             i2 += static_cast<std::size_t>(threads))
          fill_row(i2);
      });
    for (auto& th : pool) th.join();
  }
  for (std::size_t i2 = 0; i2 < n2; ++i2) {
    grid.failed_cells += row_failed[i2];
    if (grid.first_failure.empty() && !row_failure[i2].empty())
      grid.first_failure = row_failure[i2];
  }

  // extremes by exhaustive scan; strict comparison keeps the first (smallest
  // t2, then t3) on ties
  bool any = false;
  grid.max_point = {0.0, 0.0, -std::numeric_limits<double>::infinity()};
  grid.min_point = {0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i2 = 0; i2 < n2; ++i2)
    for (std::size_t i3 = 0; i3 < n3; ++i3) {
      double v = grid.values[i2 * n3 + i3];
      if (std::isnan(v)) continue;
      any = true;
      if (v > grid.max_point.value)
        grid.max_point = {t2_axis[i2], t3_axis[i3], v};
      if (v < grid.min_point.value)
        grid.min_point = {t2_axis[i2], t3_axis[i3], v};
    }
  if (!any)
    throw std::domain_error("scan_grid: no cell satisfies t1 < t2 < t3");
  return grid;
}

}  // namespace lglab
