#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbs/config.hpp"

namespace sbs {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Command-line overrides shared by the experiment recipes. Unset optionals
/// fall back to the config file.
struct ExperimentOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  // radar-mc
  std::optional<int> trials;
  std::optional<int> symbols;
  std::optional<int> subcarriers;
  std::optional<double> gamma_db_min;
  std::optional<double> gamma_db_max;
  std::optional<double> gamma_db_step;
  bool padded = false;  // use the configured M_D / N_IDFT instead of M / N

  // linkbudget
  double rho_step = 0.01;
  double x_min_m = 1.0;
  double x_max_m = 1000.0;
  double x_step_m = 1.0;

  // scan-period
  std::vector<BeamWidths> scan_widths{{2.0, 3.0}, {4.0, 6.0}};
  double scan_rho_step = 0.1;

  // frame-plan
  std::filesystem::path requests_csv;
};

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kToolkitVersion;
  std::string experiment;
  /// (file name, SHA-256 hex) sorted by file name.
  std::vector<std::pair<std::string, std::string>> outputs;

  std::string to_json() const;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"beamform", "linkbudget", "radar-mc", "scan-period", "frame-plan"};
  return names;
}

/// Runs one recipe, writes its CSV files plus manifest.json into
/// options.out_dir and returns the manifest. Output bytes depend only on the
/// config, the seed and the options (not on thread count).
RunManifest run_experiment(const ToolkitConfig& cfg, const std::string& experiment, const ExperimentOptions& options);

std::string sha256_hex(std::string_view data);

/// SHA-256 of dump_config(cfg).
std::string config_hash(const ToolkitConfig& cfg);

/// Reads `user_id,beam_id,demand` rows; a header row and `#` lines are skipped.
std::vector<UserRequest> read_user_requests(const std::filesystem::path& path);

}  // namespace sbs
