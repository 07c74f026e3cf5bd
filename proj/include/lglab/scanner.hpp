#pragma once

#include <string>
#include <vector>

#include "lglab/correlators.hpp"

namespace lglab {

/// K3 along t3 = ratio * t2 at fixed t1 (quantum ontology).
struct LineScan {
  double t1;
  double ratio;
  std::vector<double> t2;
  std::vector<double> k3;
};

LineScan scan_line(const DecayModel& model, double t1, double ratio,
                   TimeWindow t2_range, int n_points);

struct GridExtreme {
  double t2, t3;
  double value;  // K3 - 1
};

/// K3 - 1 over a rectangular (t2, t3) grid at fixed t1. Cells with
/// t3 <= t2 (or t2 <= t1) are masked (NaN); cells where the model evaluation
/// fails are masked and counted. Extremes are located by exhaustive scan in
/// (t2, t3) order, so ties resolve to the smallest t2 then t3.
struct ScanGrid {
  double t1;
  std::vector<double> t2_axis;
  std::vector<double> t3_axis;
  std::vector<double> values;  // row-major: values[i2 * t3_axis.size() + i3]
  GridExtreme max_point;
  GridExtreme min_point;
  long long failed_cells = 0;
  std::string first_failure;

  double at(std::size_t i2, std::size_t i3) const {
    return values[i2 * t3_axis.size() + i3];
  }
};

ScanGrid scan_grid(const DecayModel& model, double t1,
                   const std::vector<double>& t2_axis,
                   const std::vector<double>& t3_axis, int threads = 1);

/// Uniform axis helper: n values from start to end inclusive.
std::vector<double> linspace(double start, double end, int n);

}  // namespace lglab
