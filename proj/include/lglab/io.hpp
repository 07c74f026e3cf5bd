#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "lglab/decay_model.hpp"

namespace lglab {

/// A validated run description: canonical key/value entries (the config echo
/// written into every output file) plus typed accessors. Construction goes
/// through parse_config / validate_config, which reject unknown keys and
/// out-of-range values with the offending key named.
struct RunConfig {
  std::map<std::string, std::string> entries;

  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  std::uint64_t get_uint_or(const std::string& key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  bool has(const std::string& key) const;
};

/// Syntax pass: `key = value` lines, '#' comments, errors carry line numbers.
std::map<std::string, std::string> parse_config_syntax(const std::string& text);

/// Semantic pass: whitelists per command and model kind, required keys,
/// ranges. Throws config_error naming the key.
RunConfig validate_config(std::map<std::string, std::string> entries);

RunConfig parse_config(const std::string& text);

/// Sorted `key = value` lines; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

struct RunOptions {
  int threads = 1;
  /// Overrides the LGLAB_CACHE_DIR environment variable when set.
  std::optional<std::filesystem::path> cache_dir;
  /// Appends timing to JSON output (breaks byte-reproducibility; off by
  /// default, mirrored by the emit_timing config key).
};

/// Executes a validated config, writing its output files. Throws on failure.
void run(const RunConfig& config, const RunOptions& options = {});

/// run() wrapped into the CLI exit-code contract: 0 success, 2 configuration
/// error, 3 numerical failure. Messages go to stderr.
int run_to_status(const RunConfig& config, const RunOptions& options = {});

/// Builds the model described by the config (used by run and by tests).
DecayModel model_from_config(const RunConfig& config, const RunOptions& options);

}  // namespace lglab
