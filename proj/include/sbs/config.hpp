#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sbs/array_geometry.hpp"
#include "sbs/beamforming.hpp"
#include "sbs/frame_scheduler.hpp"
#include "sbs/link_budget.hpp"
#include "sbs/ofdm_isac.hpp"
#include "sbs/scanning.hpp"

namespace sbs {

/// Every experiment parameter, in linear / SI units. dB and dBm keys of the
/// text format are converted once, when the file is parsed.
struct ToolkitConfig {
  struct Array {
    int layers = 17;
    int log2_per_layer = 4;
    double spacing_m = 0.0;
  } array;

  struct Beam {
    double beta = 0.01;
    Direction fdb_dir{0.0, 45.0};
    std::vector<Direction> dcb_dirs;
    std::string grid = "cut";  // "cut" or "hemisphere"
    double grid_step_deg = 1.0;
    double pattern_step_deg = 0.1;
  } beam;

  double carrier_hz = 24e9;
  RadioParams radio;  // wavelength derived from carrier_hz

  struct Ofdm {
    int symbols = 256;
    int subcarriers = 1024;
    double subcarrier_spacing_hz = 90.909e3;
    int doppler_dft_len = 2560;
    int range_idft_len = 10240;
    double guard_s = 0.0;
    int qam_order = 4;
  } ofdm;

  struct Scene {
    double height_m = 10.0;
    double road_width_m = 20.0;
    double dwell_s = 0.010;
    double target_range_m = 200.0;
    double target_velocity_mps = 50.0;
    BeamWidths fdb_widths;
  } scene;

  struct Frame {
    double downlink_ms = 3.5;
    double guard_ms = 0.5;
    double uplink_ms = 1.0;
    int subframes = 20;
    int block_subcarriers = 64;
  } frame;

  struct MonteCarlo {
    int trials = 5000;
    std::uint64_t seed = 1;
    double gamma_db_min = -15.0;
    double gamma_db_max = 0.0;
    double gamma_db_step = 1.0;
    double clutter_fraction = 0.5;
  } mc;

  ArrayConfig array_config() const;
  BeamSpec beam_spec() const;
  DirectionGrid fitting_grid() const;
  OfdmConfig ofdm_config() const;
  SceneGeometry scene_geometry() const;  // sensing range from the radio section
  FrameConfig frame_config() const;
  int subcarrier_blocks() const;
};

/// Parses the line-oriented `section.key = value` format. Blank lines and
/// text after `#` are ignored. Every key is required; unknown keys, missing
/// keys, malformed values and out-of-range values raise ConfigError naming
/// the key and its unit.
ToolkitConfig parse_config(const std::string& text);
ToolkitConfig load_config(const std::filesystem::path& path);

/// Canonical text form (fixed key order, 17 significant digits); parsing it
/// reproduces the config.
std::string dump_config(const ToolkitConfig& cfg);

/// Names, units and descriptions of every key, in canonical order.
struct ConfigKeyInfo {
  std::string name;
  std::string unit;
};
std::vector<ConfigKeyInfo> config_keys();

}  // namespace sbs
