// Command-line front end: a config file plus flags that mirror every config
// key (a flag overrides the file's value).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lglab/errors.hpp"
#include "lglab/io.hpp"
#include "lglab/version.hpp"

namespace {

const std::vector<std::string> k_mirrored_keys{
    // global
    "command", "model", "output", "format", "normalize", "fit_window_start",
    "fit_window_end", "fit_samples", "emit_timing",
    // model parameters
    "gamma", "alpha", "tau", "turnover", "tau_z", "z", "k", "t_a", "t_b",
    "accel", "depth", "accel_phys", "accel_scale", "depth_phys", "depth_scale",
    "s_cutoff", "tol", "t_max", "w_points", "direct", "p_points", "file",
    // command parameters
    "t_end", "points", "t1", "t2", "t3", "ontology", "ratio", "t2_start",
    "t2_end", "t2_points", "t3_start", "t3_end", "t3_points", "times",
    "trials", "seed", "fit_mode", "out_dir", "grid_points", "line_points"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(lglab::tool_name) +
               " - Leggett-Garg correlators for decay laws"};
  app.set_version_flag("--version", std::string(lglab::tool_name) + " " +
                                        lglab::tool_version);

  std::string config_file;
  app.add_option("config", config_file, "config file of key = value lines")
      ->check(CLI::ExistingFile);

  int threads = 1;
  app.add_option("--threads", threads, "worker threads (results are identical "
                                       "for any count)")
      ->check(CLI::PositiveNumber);
  std::string cache_dir;
  app.add_option("--cache-dir", cache_dir,
                 "W-table cache directory (overrides LGLAB_CACHE_DIR)");

  std::map<std::string, std::string> overrides;
  for (const std::string& key : k_mirrored_keys) {
    app.add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "config key '" + key + "'");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> entries;
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      std::stringstream buf;
      buf << f.rdbuf();
      entries = lglab::parse_config_syntax(buf.str());
    }
    for (const auto& [key, value] : overrides) entries[key] = value;
    if (entries.empty()) {
      std::fprintf(stderr, "config error: no config file or flags given\n");
      return 2;
    }
    lglab::RunConfig config = lglab::validate_config(std::move(entries));
    lglab::RunOptions options;
    options.threads = threads;
    if (!cache_dir.empty()) options.cache_dir = cache_dir;
    return lglab::run_to_status(config, options);
  } catch (const lglab::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
