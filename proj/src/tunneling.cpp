#include "lglab/tunneling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <thread>

#include "lglab/errors.hpp"
#include "lglab/fmtnum.hpp"
#include "lglab/quad.hpp"
#include "lglab/version.hpp"

namespace lglab::tunneling {

void validate(const Params& p) {
  if (!(p.accel > 0.0)) throw config_error("accel: must be positive");
  if (!(p.depth > 0.0)) throw config_error("depth: must be positive");
  if (!(p.s_cutoff >= 10.0)) throw config_error("s_cutoff: must be >= 10");
  if (!(p.tol > 0.0 && p.tol <= 1e-4))
    throw config_error("tol: must be in (0, 1e-4]");
}

double antiderivative_sqrt1pz2(double z) {
  return 0.5 * (z * std::sqrt(1.0 + z * z) + std::asinh(z));
}

namespace {

inline double lorentz(double x) { return 1.0 / (1.0 + x * x); }

// Largest value of L(. - c0) * L(. - c1) on [lo, hi]: product of each
// factor's max over the interval (1 if the center is inside).
double pair_envelope(double lo, double hi, double c0, double c1) {
  auto factor = [&](double c) {
    if (c >= lo && c <= hi) return 1.0;
    double dist = (c < lo) ? lo - c : c - hi;
    return lorentz(dist);
  };
  return factor(c0) * factor(c1);
}

}  // namespace

double eval_w(double tau, const Params& params) {
  validate(params);
  if (!(tau >= 0.0)) throw std::domain_error("eval_w: tau must be >= 0");
  const double a = params.accel, v0 = params.depth;
  const double d = a * tau / v0;           // separation of the Lorentzian centers
  const double omega = v0 * v0 / a;        // phase prefactor
  const double prefactor = a * a / (2.0 * v0);

  OscillatorySpec spec;
  spec.integrand = [=](double s) {
    double phi = omega * (antiderivative_sqrt1pz2(s) -
                          antiderivative_sqrt1pz2(s - d));
    return lorentz(s - d) * lorentz(s) * std::cos(phi);
  };
  spec.phase = [=](double s) {
    return omega *
           (antiderivative_sqrt1pz2(s) - antiderivative_sqrt1pz2(s - d));
  };
  spec.envelope = [=](double lo, double hi) {
    return pair_envelope(lo, hi, 0.0, d);
  };

  // Cover both centers; cut at the centers and at the phase stationary point.
  const double lo = -params.s_cutoff;
  const double hi = d + params.s_cutoff;
  std::vector<double> splits{0.0, 0.5 * d, d};
  double bare_tol = params.tol / prefactor;
  QuadResult q = integrate_oscillatory(spec, lo, hi, splits, bare_tol);
  return prefactor * q.value;
}

WTable build_wtable(const Params& params, double tau_max, int n_points,
                    int threads) {
  validate(params);
  if (!(tau_max > 0.0)) throw config_error("tau_max: must be positive");
  if (n_points < 16) throw config_error("w_points: must be >= 16");
  WTable t;
  t.params = params;
  t.grid.resize(n_points);
  t.values.assign(n_points, 0.0);
  for (int i = 0; i < n_points; ++i)
    t.grid[i] = tau_max * static_cast<double>(i) / (n_points - 1);

  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < n_points; ++i) t.values[i] = eval_w(t.grid[i], params);
  } else {
    // Each node is independent; a static partition keeps every value
    // identical to the serial fill.
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w]() {
        for (int i = w; i < n_points; i += threads)
          t.values[i] = eval_w(t.grid[i], params);
      });
    }
    for (auto& th : pool) th.join();
  }
  return t;
}

std::string params_digest(const Params& params) {
  std::string canon = format_double(params.accel) + "," +
                      format_double(params.depth) + "," +
                      format_double(params.s_cutoff) + "," +
                      format_double(params.tol);
  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_wtable_csv(const WTable& table, const std::filesystem::path& file) {
  std::ostringstream out;
  out << "# " << tool_name << " wtable " << tool_version << "\n";
  out << "# digest = " << params_digest(table.params) << "\n";
  out << "# accel = " << format_double(table.params.accel) << "\n";
  out << "# depth = " << format_double(table.params.depth) << "\n";
  out << "# s_cutoff = " << format_double(table.params.s_cutoff) << "\n";
  out << "# tol = " << format_double(table.params.tol) << "\n";
  out << "tau,w\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i)
    out << format_double(table.grid[i]) << "," << format_double(table.values[i])
        << "\n";
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw config_error("cannot write W table: " + file.string());
    f << out.str();
  }
  std::filesystem::rename(tmp, file);
}

WTable read_wtable_csv(const std::filesystem::path& file, const Params& params) {
  WTable empty;
  std::ifstream f(file);
  if (!f) return empty;
  std::string line;
  std::string digest;
  WTable t;
  t.params = params;
  bool header_done = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("digest = ");
      if (pos != std::string::npos) digest = line.substr(pos + 9);
      continue;
    }
    if (!header_done) {  // column header line
      header_done = true;
      if (line != "tau,w") return empty;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) return empty;
    t.grid.push_back(parse_double(line.substr(0, comma), "wtable tau"));
    t.values.push_back(parse_double(line.substr(comma + 1), "wtable w"));
  }
  if (digest != params_digest(params)) return empty;
  if (t.grid.size() < 2) return empty;
  return t;
}

WTable load_or_build_wtable(const Params& params, double tau_max, int n_points,
                            const std::filesystem::path& cache_dir,
                            int threads) {
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    std::string name = "wtable_" + params_digest(params) + "_" +
                       std::to_string(n_points) + "_" + format_double(tau_max) +
                       ".csv";
    std::filesystem::path file = cache_dir / name;
    WTable cached = read_wtable_csv(file, params);
    if (cached.grid.size() == static_cast<std::size_t>(n_points) &&
        cached.grid.back() == tau_max)
      return cached;
    WTable fresh = build_wtable(params, tau_max, n_points, threads);
    write_wtable_csv(fresh, file);
    return fresh;
  }
  return build_wtable(params, tau_max, n_points, threads);
}

LogPEvaluator::LogPEvaluator(WTable table)
    : table_(std::move(table)),
      spline_(PiecewiseCubic::spline(table_.grid, table_.values)) {
  if (table_.grid.empty() || table_.grid.front() != 0.0)
    throw config_error("W table must start at tau = 0");
}

double LogPEvaluator::log_p(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("log_p: t must be >= 0");
  if (t > coverage())
    throw std::domain_error("log_p: t beyond W table coverage (" +
                            format_double(coverage()) + ")");
  if (t == 0.0) return 0.0;
  double v = -(t * spline_.integral(t) - spline_.first_moment(t));
  return std::min(v, 0.0);
}

double LogPEvaluator::cumulative_w(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("cumulative_w: t must be >= 0");
  if (t > coverage())
    throw std::domain_error("cumulative_w: t beyond W table coverage");
  return spline_.integral(t);
}

double eval_log_p(double t, const WTable& table) {
  return LogPEvaluator(table).log_p(t);
}

}  // namespace lglab::tunneling
