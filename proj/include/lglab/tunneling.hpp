#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lglab/interp.hpp"

namespace lglab::tunneling {

/// Parameters of the cold-atom tunneling survival law
///   log p(t) = -int_0^t (t - tau) W(tau) dtau
///   W(tau)   = (a^2/2V0) int ds L(s - a tau/V0) L(s) cos((V0^2/a) Phi(s, tau))
/// with L(x) = 1/(1+x^2) and Phi the arc-length phase between the two
/// Lorentzian centers. `accel` and `depth` are dimensionless internal values;
/// physical inputs are mapped onto them by config-level scale constants.
struct Params {
  double accel;            // a
  double depth;            // V0
  double s_cutoff = 700.0; // truncation: integrate s in [-S, a*tau/V0 + S]
  double tol = 1e-8;       // absolute tolerance on W (prefactor included)
};

void validate(const Params& p);

/// F(z) = int_0^z sqrt(1+u^2) du = (z sqrt(1+z^2) + asinh z) / 2.
double antiderivative_sqrt1pz2(double z);

/// One W(tau) evaluation by guarded adaptive quadrature. Deterministic for
/// fixed parameters; throws numerical_error if the tolerance is unreachable.
double eval_w(double tau, const Params& params);

struct WTable {
  Params params;
  std::vector<double> grid;    // strictly increasing, grid[0] == 0
  std::vector<double> values;  // W(grid[i])
};

WTable build_wtable(const Params& params, double tau_max, int n_points,
                    int threads = 1);

/// Content hash of the parameter set, printed into cache file headers.
std::string params_digest(const Params& params);

void write_wtable_csv(const WTable& table, const std::filesystem::path& file);
/// Returns an empty table (grid empty) when the file is missing or its digest
/// does not match `params`.
WTable read_wtable_csv(const std::filesystem::path& file, const Params& params);

/// Builds or loads the W table: when `cache_dir` is non-empty, looks for
/// wtable_<digest>_<n>_<taumax>.csv there and writes it after a fresh build.
WTable load_or_build_wtable(const Params& params, double tau_max, int n_points,
                            const std::filesystem::path& cache_dir,
                            int threads = 1);

/// Outer integral against the tabulated W (cubic spline interpolation).
/// log p(t) = -(t * int_0^t W - int_0^t tau W); exact per spline segment.
class LogPEvaluator {
 public:
  explicit LogPEvaluator(WTable table);

  /// t must lie within the table coverage.
  double log_p(double t) const;
  /// int_0^t W(tau) dtau (= -d log p/dt), for decay densities.
  double cumulative_w(double t) const;

  double coverage() const { return table_.grid.back(); }
  double w0() const { return table_.values.front(); }
  const WTable& table() const { return table_; }

 private:
  WTable table_;
  PiecewiseCubic spline_;
};

/// Op-level convenience wrapper over LogPEvaluator.
double eval_log_p(double t, const WTable& table);

}  // namespace lglab::tunneling
