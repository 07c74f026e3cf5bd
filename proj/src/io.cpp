#include "lglab/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "lglab/errors.hpp"
#include "lglab/fmtnum.hpp"
#include "lglab/mc.hpp"
#include "lglab/scanner.hpp"
#include "lglab/version.hpp"

namespace lglab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

const std::set<std::string> k_commands{"survival", "k3",  "scan-line",
                                       "scan-grid", "mc", "fit", "reproduce"};
const std::set<std::string> k_kinds{"exponential", "toy",          "tunneling",
                                    "power_tail",  "three_regime", "tabulated"};

std::set<std::string> kind_keys(const std::string& kind) {
  if (kind == "exponential") return {"gamma"};
  if (kind == "toy") return {"gamma", "alpha"};
  if (kind == "power_tail") return {"tau", "alpha", "turnover"};
  if (kind == "three_regime")
    return {"tau_z", "z", "gamma", "k", "alpha", "t_a", "t_b"};
  if (kind == "tunneling")
    return {"accel",       "depth",       "accel_phys", "accel_scale",
            "depth_phys",  "depth_scale", "s_cutoff",   "tol",
            "t_max",       "w_points",    "direct",     "p_points"};
  if (kind == "tabulated") return {"file"};
  return {};
}

std::set<std::string> command_keys(const std::string& command) {
  if (command == "survival") return {"t_end", "points"};
  if (command == "k3") return {"t1", "t2", "t3", "ontology"};
  if (command == "scan-line")
    return {"t1", "ratio", "t2_start", "t2_end", "points"};
  if (command == "scan-grid")
    return {"t1",       "t2_start", "t2_end",   "t2_points",
            "t3_start", "t3_end",   "t3_points"};
  if (command == "mc") return {"times", "ontology", "trials", "seed"};
  if (command == "fit") return {"fit_mode"};
  if (command == "reproduce")
    return {"out_dir", "w_points", "p_points", "grid_points", "line_points"};
  return {};
}

std::vector<double> parse_times_list(const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), "times"));
  return out;
}

void require(const RunConfig& c, std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (!c.has(k)) throw config_error(std::string(k) + ": required key missing");
}

void check_positive(const RunConfig& c, const char* key) {
  if (c.has(key) && !(c.get_double(key) > 0.0))
    throw config_error(std::string(key) + ": must be positive");
}

}  // namespace

const std::string& RunConfig::get(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw config_error(key + ": required key missing");
  return it->second;
}

std::string RunConfig::get_or(const std::string& key,
                              const std::string& fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key) const {
  return parse_double(get(key), key);
}

double RunConfig::get_double_or(const std::string& key, double fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : parse_double(it->second, key);
}

long long RunConfig::get_int_or(const std::string& key, long long fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : parse_int(it->second, key);
}

std::uint64_t RunConfig::get_uint_or(const std::string& key,
                                     std::uint64_t fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : parse_uint(it->second, key);
}

bool RunConfig::get_bool_or(const std::string& key, bool fallback) const {
  auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw config_error(key + ": expected true or false, got '" + it->second + "'");
}

bool RunConfig::has(const std::string& key) const {
  return entries.count(key) > 0;
}

std::map<std::string, std::string> parse_config_syntax(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) +
                         ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw config_error("line " + std::to_string(lineno) + ": bad key '" +
                         key + "'");
    if (value.empty())
      throw config_error("line " + std::to_string(lineno) + ": empty value for '" +
                         key + "'");
    if (entries.count(key))
      throw config_error("line " + std::to_string(lineno) + ": duplicate key '" +
                         key + "'");
    entries[key] = value;
  }
  return entries;
}

RunConfig validate_config(std::map<std::string, std::string> entries) {
  RunConfig c;
  c.entries = std::move(entries);

  const std::string command = c.get("command");
  if (!k_commands.count(command))
    throw config_error("command: unknown command '" + command + "'");

  std::set<std::string> allowed{"command"};
  for (const auto& k : command_keys(command)) allowed.insert(k);

  if (command == "reproduce") {
    require(c, {"out_dir"});
  } else {
    for (const char* k : {"model", "output", "format", "normalize",
                          "fit_window_start", "fit_window_end", "fit_samples",
                          "emit_timing"})
      allowed.insert(k);
    const std::string kind = c.get("model");
    if (!k_kinds.count(kind))
      throw config_error("model: unknown model kind '" + kind + "'");
    for (const auto& k : kind_keys(kind)) allowed.insert(k);
    require(c, {"output"});
  }

  for (const auto& [key, value] : c.entries)
    if (!allowed.count(key))
      throw config_error(key + ": unknown key for this command/model");

  if (command == "reproduce") return c;

  // model parameter ranges (mirrors the model factories, without the cost of
  // actually constructing expensive models)
  const std::string kind = c.get("model");
  if (kind == "exponential") {
    require(c, {"gamma"});
    check_positive(c, "gamma");
  } else if (kind == "toy") {
    require(c, {"gamma", "alpha"});
    check_positive(c, "gamma");
    check_positive(c, "alpha");
  } else if (kind == "power_tail") {
    require(c, {"tau", "alpha", "turnover"});
    check_positive(c, "tau");
    check_positive(c, "turnover");
    if (!(c.get_double("alpha") < 0.0))
      throw config_error("alpha: power-law index must be negative");
  } else if (kind == "three_regime") {
    require(c, {"tau_z", "z", "gamma", "k", "alpha"});
    for (const char* k : {"tau_z", "z", "gamma", "k", "alpha"})
      check_positive(c, k);
  } else if (kind == "tunneling") {
    bool internal = c.has("accel") || c.has("depth");
    bool physical = c.has("accel_phys") || c.has("depth_phys");
    if (internal && physical)
      throw config_error(
          "accel: give either internal (accel, depth) or physical "
          "(accel_phys, depth_phys with scales), not both");
    if (internal) {
      require(c, {"accel", "depth"});
    } else {
      require(c, {"accel_phys", "accel_scale", "depth_phys", "depth_scale"});
      for (const char* k : {"accel_phys", "accel_scale", "depth_phys", "depth_scale"})
        check_positive(c, k);
    }
    require(c, {"t_max"});
    check_positive(c, "t_max");
    if (c.has("s_cutoff") && !(c.get_double("s_cutoff") >= 10.0))
      throw config_error("s_cutoff: must be >= 10");
    if (c.has("tol")) {
      double tol = c.get_double("tol");
      if (!(tol > 0.0 && tol <= 1e-4))
        throw config_error("tol: must be in (0, 1e-4]");
    }
    if (c.get_int_or("w_points", 2048) < 16)
      throw config_error("w_points: must be >= 16");
    if (c.get_int_or("p_points", 1024) < 64)
      throw config_error("p_points: must be >= 64");
  } else if (kind == "tabulated") {
    require(c, {"file"});
  }

  const std::string format = c.get_or("format", "");
  if (!format.empty() && format != "csv" && format != "json")
    throw config_error("format: must be csv or json");

  if (command == "survival") {
    require(c, {"t_end"});
    check_positive(c, "t_end");
    if (c.get_int_or("points", 400) < 2)
      throw config_error("points: must be >= 2");
  } else if (command == "k3") {
    require(c, {"t1", "t2", "t3", "ontology"});
    double t1 = c.get_double("t1"), t2 = c.get_double("t2"),
           t3 = c.get_double("t3");
    if (!(t1 >= 0.0 && t1 < t2 && t2 < t3))
      throw config_error("t1: times must satisfy 0 <= t1 < t2 < t3");
    const std::string ont = c.get("ontology");
    if (ont != "classical" && ont != "quantum")
      throw config_error("ontology: must be classical or quantum");
  } else if (command == "scan-line") {
    require(c, {"t1", "ratio", "t2_start", "t2_end"});
    if (!(c.get_double("ratio") > 1.0))
      throw config_error("ratio: must exceed 1");
    if (!(c.get_double("t1") >= 0.0 &&
          c.get_double("t1") < c.get_double("t2_start")))
      throw config_error("t1: must satisfy 0 <= t1 < t2_start");
    if (!(c.get_double("t2_start") < c.get_double("t2_end")))
      throw config_error("t2_start: must be below t2_end");
    if (c.get_int_or("points", 400) < 2)
      throw config_error("points: must be >= 2");
  } else if (command == "scan-grid") {
    require(c, {"t1", "t2_start", "t2_end", "t3_start", "t3_end"});
    if (!(c.get_double("t1") >= 0.0 &&
          c.get_double("t1") < c.get_double("t2_start")))
      throw config_error("t1: must satisfy 0 <= t1 < t2_start");
    if (!(c.get_double("t2_start") < c.get_double("t2_end")))
      throw config_error("t2_start: must be below t2_end");
    if (!(c.get_double("t3_start") < c.get_double("t3_end")))
      throw config_error("t3_start: must be below t3_end");
    if (c.get_int_or("t2_points", 200) < 2 || c.get_int_or("t3_points", 200) < 2)
      throw config_error("t2_points: grid axes need >= 2 points");
  } else if (command == "mc") {
    require(c, {"times", "ontology"});
    auto times = parse_times_list(c.get("times"));
    if (times.size() != 2 && times.size() != 3)
      throw config_error("times: need 2 or 3 comma-separated times");
    if (!(times.front() >= 0.0))
      throw config_error("times: must be >= 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
      if (!(times[i] < times[i + 1]))
        throw config_error("times: must be strictly increasing");
    const std::string ont = c.get("ontology");
    if (ont != "realist" && ont != "collapse" && ont != "clock_reset")
      throw config_error("ontology: must be realist, collapse or clock_reset");
    if (c.get_int_or("trials", 1000000) < 1)
      throw config_error("trials: must be >= 1");
    if (!format.empty() && format != "json")
      throw config_error("format: mc emits json only");
  } else if (command == "fit") {
    const std::string mode = c.get_or("fit_mode", "lifetime");
    if (mode != "lifetime" && mode != "regime")
      throw config_error("fit_mode: must be lifetime or regime");
    if (!format.empty() && format != "json")
      throw config_error("format: fit emits json only");
    if (c.get_bool_or("normalize", false))
      throw config_error("normalize: not applicable to the fit command");
  }

  if (command == "k3" && !format.empty() && format != "json")
    throw config_error("format: k3 emits json only");

  if (!(c.get_double_or("fit_window_start", 0.5) <
        c.get_double_or("fit_window_end", 3.0)))
    throw config_error("fit_window_start: must be below fit_window_end");
  if (c.get_int_or("fit_samples", 64) < 8)
    throw config_error("fit_samples: must be >= 8");
  c.get_bool_or("normalize", false);   // type check
  c.get_bool_or("emit_timing", false);

  return c;
}

RunConfig parse_config(const std::string& text) {
  return validate_config(parse_config_syntax(text));
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config.entries)
    out << key << " = " << value << "\n";
  return out.str();
}

namespace {

fs::path cache_dir_for(const RunOptions& options) {
  if (options.cache_dir) return *options.cache_dir;
  if (const char* env = std::getenv("LGLAB_CACHE_DIR")) return fs::path(env);
  return {};
}

DecayModel load_tabulated_file(const fs::path& file) {
  std::ifstream f(file);
  if (!f) throw config_error("file: cannot open '" + file.string() + "'");
  std::vector<double> t, p;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw config_error("file: malformed row '" + line + "'");
    t.push_back(parse_double(line.substr(0, comma), "file t"));
    p.push_back(parse_double(line.substr(comma + 1), "file p"));
  }
  return DecayModel::tabulated(std::move(t), std::move(p));
}

struct CsvWriter {
  std::ostringstream out;

  void comment(const std::string& s) { out << "# " << s << "\n"; }
  void header(const RunConfig& config) {
    comment(std::string(tool_name) + " " + tool_version);
    for (const auto& [key, value] : config.entries)
      comment(key + " = " + value);
  }
  void columns(const std::string& names) { out << names << "\n"; }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out << ",";
      out << format_double(v);
      first = false;
    }
    out << "\n";
  }
};

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw config_error("output: cannot write '" + path.string() + "'");
  f << bytes;
}

ordered_json json_skeleton(const RunConfig& config) {
  ordered_json j;
  j["tool"] = {{"name", tool_name}, {"version", tool_version}};
  ordered_json echo = ordered_json::object();
  for (const auto& [key, value] : config.entries) echo[key] = value;
  j["config"] = echo;
  j["results"] = ordered_json::object();
  j["errors"] = ordered_json::array();
  return j;
}

ordered_json estimate_json(const McEstimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}};
}

/// Times in the active command are interpreted in units of the fitted
/// lifetime when normalize = true; outputs are divided by it symmetrically.
struct TimeScale {
  double tau = 1.0;
  double to_raw(double t) const { return t * tau; }
  double to_out(double t) const { return t / tau; }
};

McOntology mc_ontology_from(const std::string& name) {
  if (name == "realist") return McOntology::classical_realist;
  if (name == "collapse") return McOntology::quantum_collapse;
  return McOntology::classical_clock_reset;
}

void run_survival(const RunConfig& c, const DecayModel& model,
                  const TimeScale& scale, ordered_json& summary,
                  std::string& csv_out) {
  int points = static_cast<int>(c.get_int_or("points", 400));
  double t_end = scale.to_raw(c.get_double("t_end"));
  auto ts = linspace(0.0, t_end, points);
  if (c.get_or("format", "csv") == "csv") {
    CsvWriter w;
    w.header(c);
    w.columns("t,p");
    for (double t : ts) w.row({scale.to_out(t), survival(model, t)});
    csv_out = w.out.str();
  } else {
    ordered_json rows = ordered_json::array();
    for (double t : ts)
      rows.push_back({{"t", scale.to_out(t)}, {"p", survival(model, t)}});
    summary["results"]["survival"] = rows;
  }
}

void run_k3(const RunConfig& c, const DecayModel& model, const TimeScale& scale,
            ordered_json& summary) {
  Ontology ont = c.get("ontology") == "classical" ? Ontology::classical_mrnim
                                                  : Ontology::quantum_collapse;
  K3Result r = k3(model, scale.to_raw(c.get_double("t1")),
                  scale.to_raw(c.get_double("t2")),
                  scale.to_raw(c.get_double("t3")), ont);
  summary["results"]["k3"] = {
      {"t1", scale.to_out(r.t1)}, {"t2", scale.to_out(r.t2)},
      {"t3", scale.to_out(r.t3)}, {"c12", r.c12},
      {"c23", r.c23},             {"c13", r.c13},
      {"k3", r.k3}};
}

void run_scan_line(const RunConfig& c, const DecayModel& model,
                   const TimeScale& scale, ordered_json& summary,
                   std::string& csv_out) {
  TimeWindow range{scale.to_raw(c.get_double("t2_start")),
                   scale.to_raw(c.get_double("t2_end"))};
  LineScan scan =
      scan_line(model, scale.to_raw(c.get_double("t1")), c.get_double("ratio"),
                range, static_cast<int>(c.get_int_or("points", 400)));
  if (c.get_or("format", "csv") == "csv") {
    CsvWriter w;
    w.header(c);
    w.columns("t2,k3");
    for (std::size_t i = 0; i < scan.t2.size(); ++i)
      w.row({scale.to_out(scan.t2[i]), scan.k3[i]});
    csv_out = w.out.str();
  } else {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < scan.t2.size(); ++i)
      rows.push_back({{"t2", scale.to_out(scan.t2[i])}, {"k3", scan.k3[i]}});
    summary["results"]["line"] = rows;
  }
}

void run_scan_grid(const RunConfig& c, const DecayModel& model,
                   const TimeScale& scale, const RunOptions& options,
                   ordered_json& summary, std::string& csv_out) {
  auto t2_axis = linspace(scale.to_raw(c.get_double("t2_start")),
                          scale.to_raw(c.get_double("t2_end")),
                          static_cast<int>(c.get_int_or("t2_points", 200)));
  auto t3_axis = linspace(scale.to_raw(c.get_double("t3_start")),
                          scale.to_raw(c.get_double("t3_end")),
                          static_cast<int>(c.get_int_or("t3_points", 200)));
  ScanGrid grid = scan_grid(model, scale.to_raw(c.get_double("t1")), t2_axis,
                            t3_axis, options.threads);
  if (c.get_or("format", "csv") == "csv") {
    CsvWriter w;
    w.header(c);
    if (grid.failed_cells > 0)
      w.comment("failed_cells = " + std::to_string(grid.failed_cells));
    w.columns("t2,t3,k3m1");
    for (std::size_t i2 = 0; i2 < grid.t2_axis.size(); ++i2)
      for (std::size_t i3 = 0; i3 < grid.t3_axis.size(); ++i3) {
        double v = grid.at(i2, i3);
        if (std::isnan(v)) continue;  // masked region is never emitted
        w.row({scale.to_out(grid.t2_axis[i2]), scale.to_out(grid.t3_axis[i3]), v});
      }
    csv_out = w.out.str();
  } else {
    long long defined = 0;
    for (double v : grid.values)
      if (!std::isnan(v)) ++defined;
    summary["results"]["grid"] = {
        {"t1", scale.to_out(grid.t1)},
        {"t2_points", grid.t2_axis.size()},
        {"t3_points", grid.t3_axis.size()},
        {"defined_cells", defined},
        {"failed_cells", grid.failed_cells}};
  }
  summary["extremes"] = {
      {"max",
       {{"t2", scale.to_out(grid.max_point.t2)},
        {"t3", scale.to_out(grid.max_point.t3)},
        {"value", grid.max_point.value}}},
      {"min",
       {{"t2", scale.to_out(grid.min_point.t2)},
        {"t3", scale.to_out(grid.min_point.t3)},
        {"value", grid.min_point.value}}}};
  if (grid.failed_cells > 0) summary["errors"].push_back(grid.first_failure);
}

void run_mc(const RunConfig& c, const DecayModel& model, const TimeScale& scale,
            const RunOptions& options, ordered_json& summary) {
  auto times = parse_times_list(c.get("times"));
  for (double& t : times) t = scale.to_raw(t);
  McOntology ont = mc_ontology_from(c.get("ontology"));
  long long n = c.get_int_or("trials", 1000000);
  std::uint64_t seed = c.get_uint_or("seed", 1);
  auto freq = run_trials(model, times, ont, n, seed, options.threads);
  ordered_json fj = ordered_json::object();
  for (const auto& [name, est] : freq) fj[name] = estimate_json(est);
  ordered_json out_times = ordered_json::array();
  for (double t : times) out_times.push_back(scale.to_out(t));
  summary["results"]["mc"] = {{"times", out_times},
                              {"ontology", c.get("ontology")},
                              {"trials", n},
                              {"seed", seed},
                              {"frequencies", fj}};
  if (times.size() == 3) {
    McEstimate k = estimate_k3(model, times[0], times[1], times[2], ont, n,
                               seed, options.threads);
    summary["results"]["mc"]["k3"] = estimate_json(k);
  }
}

void run_fit(const RunConfig& c, const DecayModel& model,
             ordered_json& summary) {
  TimeWindow window{c.get_double_or("fit_window_start", 0.5),
                    c.get_double_or("fit_window_end", 3.0)};
  int samples = static_cast<int>(c.get_int_or("fit_samples", 64));
  if (c.get_or("fit_mode", "lifetime") == "lifetime") {
    double tau = fit_effective_lifetime(model, window, samples);
    summary["results"]["fit"] = {{"mode", "lifetime"},
                                 {"tau", tau},
                                 {"window", {window.start, window.end}},
                                 {"samples", samples}};
  } else {
    RegimeFit fit = fit_exponential_regime(model, window, samples);
    summary["results"]["fit"] = {{"mode", "regime"},
                                 {"z", fit.amplitude},
                                 {"gamma", fit.gamma},
                                 {"classification",
                                  regime_classification(fit.amplitude)},
                                 {"residual", fit.residual},
                                 {"window", {window.start, window.end}},
                                 {"samples", samples}};
  }
}

void run_reproduce(const RunConfig& c, const RunOptions& options);

}  // namespace

DecayModel model_from_config(const RunConfig& config, const RunOptions& options) {
  const std::string kind = config.get("model");
  if (kind == "exponential")
    return DecayModel::exponential(config.get_double("gamma"));
  if (kind == "toy")
    return DecayModel::toy(config.get_double("gamma"), config.get_double("alpha"));
  if (kind == "power_tail")
    return DecayModel::piecewise_power_tail(config.get_double("tau"),
                                            config.get_double("alpha"),
                                            config.get_double("turnover"));
  if (kind == "three_regime") {
    std::optional<double> t_a, t_b;
    if (config.has("t_a")) t_a = config.get_double("t_a");
    if (config.has("t_b")) t_b = config.get_double("t_b");
    return DecayModel::three_regime(
        config.get_double("tau_z"), config.get_double("z"),
        config.get_double("gamma"), config.get_double("k"),
        config.get_double("alpha"), t_a, t_b);
  }
  if (kind == "tabulated") return load_tabulated_file(config.get("file"));

  // tunneling
  tunneling::Params params;
  if (config.has("accel")) {
    params.accel = config.get_double("accel");
    params.depth = config.get_double("depth");
  } else {
    params.accel = config.get_double("accel_phys") / config.get_double("accel_scale");
    params.depth = config.get_double("depth_phys") / config.get_double("depth_scale");
  }
  params.s_cutoff = config.get_double_or("s_cutoff", params.s_cutoff);
  params.tol = config.get_double_or("tol", params.tol);
  DecayModel direct = DecayModel::tunneling_direct(
      params, config.get_double("t_max"),
      static_cast<int>(config.get_int_or("w_points", 2048)),
      cache_dir_for(options), options.threads);

  const std::string command = config.get("command");
  bool wants_interpolant = command == "scan-line" || command == "scan-grid" ||
                           command == "mc";
  if (wants_interpolant && !config.get_bool_or("direct", false))
    return build_p_interpolant(direct,
                               static_cast<int>(config.get_int_or("p_points", 1024)));
  return direct;
}

void run(const RunConfig& config, const RunOptions& options) {
  const std::string command = config.get("command");
  if (command == "reproduce") {
    run_reproduce(config, options);
    return;
  }

  auto t_start = std::chrono::steady_clock::now();
  DecayModel model = model_from_config(config, options);

  TimeScale scale;
  if (config.get_bool_or("normalize", false)) {
    TimeWindow window{config.get_double_or("fit_window_start", 0.5),
                      config.get_double_or("fit_window_end", 3.0)};
    int samples = static_cast<int>(config.get_int_or("fit_samples", 64));
    scale.tau = fit_effective_lifetime(model, window, samples);
    model.set_time_unit(scale.tau);
  }

  ordered_json summary = json_skeleton(config);
  if (scale.tau != 1.0) summary["results"]["time_unit"] = scale.tau;
  std::string csv_out;

  if (command == "survival")
    run_survival(config, model, scale, summary, csv_out);
  else if (command == "k3")
    run_k3(config, model, scale, summary);
  else if (command == "scan-line")
    run_scan_line(config, model, scale, summary, csv_out);
  else if (command == "scan-grid")
    run_scan_grid(config, model, scale, options, summary, csv_out);
  else if (command == "mc")
    run_mc(config, model, scale, options, summary);
  else if (command == "fit")
    run_fit(config, model, summary);

  fs::path out_path(config.get("output"));
  if (!csv_out.empty()) {
    write_file(out_path, csv_out);
  } else {
    if (config.get_bool_or("emit_timing", false)) {
      auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t_start);
      summary["timing"] = {{"seconds", dt.count()}};
    }
    write_file(out_path, summary.dump(2) + "\n");
  }
}

namespace {

// The figure-reproduction bundle. Internal tunneling units are the paper's
// quoted physical values divided by the documented scale constants
// (4200 m s^-2 / 1260 per unit acceleration, 100 kHz / 50 per unit depth).
void run_reproduce(const RunConfig& c, const RunOptions& options) {
  fs::path out_dir(c.get("out_dir"));
  fs::create_directories(out_dir);

  RunOptions opts = options;
  if (!opts.cache_dir && !std::getenv("LGLAB_CACHE_DIR"))
    opts.cache_dir = out_dir / "cache";

  long long w_points = c.get_int_or("w_points", 2048);
  long long p_points = c.get_int_or("p_points", 1024);
  long long grid_points = c.get_int_or("grid_points", 200);
  long long line_points = c.get_int_or("line_points", 400);

  auto base_model = [&](const std::string& which) {
    std::map<std::string, std::string> m;
    if (which == "toy") {
      m["model"] = "toy";
      m["gamma"] = "1";
      m["alpha"] = "2";
    } else if (which == "tunneling") {
      m["model"] = "tunneling";
      m["accel_phys"] = "4200";
      m["accel_scale"] = "1260";
      m["depth_phys"] = "100";
      m["depth_scale"] = "50";
      m["t_max"] = "16";
      m["w_points"] = std::to_string(w_points);
      m["p_points"] = std::to_string(p_points);
    } else if (which == "power_tail") {
      m["model"] = "power_tail";
      m["tau"] = "0.35";
      m["alpha"] = "-2.26";
      m["turnover"] = "3.885";  // 11.1 tau
    } else {
      m["model"] = "exponential";
      m["gamma"] = "1";
    }
    m["normalize"] = "true";
    return m;
  };

  ordered_json manifest;
  manifest["tool"] = {{"name", tool_name}, {"version", tool_version}};
  ordered_json runs = ordered_json::array();

  auto execute = [&](const std::string& name,
                     std::map<std::string, std::string> entries) {
    entries["output"] = (out_dir / (name + (entries["format"] == "json"
                                                ? ".json"
                                                : ".csv")))
                            .string();
    RunConfig rc = validate_config(entries);
    write_file(out_dir / (name + ".config"), serialize_config(rc));
    run(rc, opts);
    runs.push_back({{"name", name},
                    {"config", (out_dir / (name + ".config")).string()},
                    {"output", rc.get("output")}});
  };

  // survival curves (three laws and the exponential reference)
  for (const std::string which : {"toy", "tunneling", "power_tail", "exponential"}) {
    auto m = base_model(which);
    m["command"] = "survival";
    m["format"] = "csv";
    m["t_end"] = which == "power_tail" ? "16" : "5";
    m["points"] = std::to_string(line_points);
    execute("fig2_p_" + which, m);
  }

  // K3 lines, t3 = 2 t2, at t1 = 0 and t1 = tau
  for (const std::string which : {"toy", "tunneling", "power_tail"}) {
    for (int t1_is_tau : {0, 1}) {
      auto m = base_model(which);
      m["command"] = "scan-line";
      m["format"] = "csv";
      m["ratio"] = "2";
      m["t1"] = t1_is_tau ? "1" : "0";
      m["t2_start"] = t1_is_tau ? "1.02" : "0.01";
      m["t2_end"] = which == "power_tail" ? "16" : (t1_is_tau ? "4" : "3");
      m["points"] = std::to_string(line_points);
      execute(std::string("fig3_line_") + which + (t1_is_tau ? "_t1_tau" : "_t1_0"),
              m);
    }
  }

  // K3 - 1 landscape of the tunneling law at t1 = 0.1 tau
  for (const std::string fmt : {"csv", "json"}) {
    auto m = base_model("tunneling");
    m["command"] = "scan-grid";
    m["format"] = fmt;
    m["t1"] = "0.1";
    m["t2_start"] = "0.102";
    m["t2_end"] = "6";
    m["t3_start"] = "0.102";
    m["t3_end"] = "6";
    m["t2_points"] = std::to_string(grid_points);
    m["t3_points"] = std::to_string(grid_points);
    execute(std::string("fig4_grid_tunneling") + (fmt == "json" ? "_summary" : ""),
            m);
  }

  manifest["runs"] = runs;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int run_to_status(const RunConfig& config, const RunOptions& options) {
  try {
    run(config, options);
    return 0;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}

}  // namespace lglab
