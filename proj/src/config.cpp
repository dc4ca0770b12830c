#include "sbs/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sbs {

namespace {

struct KeySpec {
  std::string name;
  std::string unit;
  std::function<void(ToolkitConfig&, const std::string&)> parse;
  std::function<std::string(const ToolkitConfig&)> format;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_real(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) throw std::invalid_argument("expected a real number");
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("expected an integer");
  return v;
}

Direction to_direction(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("expected phi:theta");
  return Direction::normalized(to_real(trim(s.substr(0, colon))), to_real(trim(s.substr(colon + 1))));
}

std::vector<Direction> to_direction_list(const std::string& s) {
  std::vector<Direction> out;
  if (s.empty() || s == "none") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_direction(trim(item)));
  return out;
}

std::string fmt_direction(const Direction& d) { return fmt_real(d.phi_deg) + ":" + fmt_real(d.theta_deg); }

void check_range(double v, double lo, double hi, bool lo_open, bool hi_open) {
  const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  if (!ok) {
    std::ostringstream os;
    os << "value " << v << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    throw std::out_of_range(os.str());
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Real-valued key with an optional conversion applied on load.
enum class Conv { kNone, kDb, kDbm };

template <typename Get>
KeySpec real_key(std::string name, std::string unit, Get get, Conv conv, double lo, double hi, bool lo_open = false,
                 bool hi_open = false) {
  KeySpec k;
  k.name = std::move(name);
  k.unit = std::move(unit);
  k.parse = [=](ToolkitConfig& c, const std::string& s) {
    const double raw = to_real(s);
    check_range(raw, lo, hi, lo_open, hi_open);
    double& dst = get(c);
    switch (conv) {
      case Conv::kNone: dst = raw; break;
      case Conv::kDb: dst = db_to_linear(raw); break;
      case Conv::kDbm: dst = dbm_to_watt(raw); break;
    }
  };
  k.format = [=](const ToolkitConfig& c) {
    const double v = get(c);
    switch (conv) {
      case Conv::kNone: return fmt_real(v);
      case Conv::kDb: return fmt_real(linear_to_db(v));
      case Conv::kDbm: return fmt_real(watt_to_dbm(v));
    }
    return fmt_real(v);
  };
  return k;
}

template <typename T, typename Get>
KeySpec int_key(std::string name, std::string unit, Get get, long long lo, long long hi) {
  KeySpec k;
  k.name = std::move(name);
  k.unit = std::move(unit);
  k.parse = [=](ToolkitConfig& c, const std::string& s) {
    const long long v = to_integer(s);
    if (v < lo || v > hi) {
      std::ostringstream os;
      os << "value " << v << " outside [" << lo << ", " << hi << "]";
      throw std::out_of_range(os.str());
    }
    get(c) = static_cast<T>(v);
  };
  k.format = [=](const ToolkitConfig& c) { return std::to_string(get(c)); };
  return k;
}

const std::vector<KeySpec>& key_table() {
  using C = ToolkitConfig;
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back(int_key<int>("array.p", "layers incl. reference element", [](auto& c) -> auto& { return c.array.layers; }, 1, 1000));
    t.push_back(int_key<int>("array.b", "log2 elements per layer", [](auto& c) -> auto& { return c.array.log2_per_layer; }, 1, 20));
    t.push_back(real_key("array.d_m", "m", [](auto& c) -> auto& { return c.array.spacing_m; }, Conv::kNone, 0, kInf, true));

    t.push_back(real_key("beam.beta", "dimensionless", [](auto& c) -> auto& { return c.beam.beta; }, Conv::kNone, 0, kInf));
    t.push_back({"beam.fdb_dir_deg", "deg as phi:theta",
                 [](C& c, const std::string& s) { c.beam.fdb_dir = to_direction(s); },
                 [](const C& c) { return fmt_direction(c.beam.fdb_dir); }});
    t.push_back({"beam.dcb_dirs_deg", "deg as comma-separated phi:theta list (or none)",
                 [](C& c, const std::string& s) { c.beam.dcb_dirs = to_direction_list(s); },
                 [](const C& c) {
                   if (c.beam.dcb_dirs.empty()) return std::string("none");
                   std::string out;
                   for (std::size_t i = 0; i < c.beam.dcb_dirs.size(); ++i) {
                     if (i) out += ", ";
                     out += fmt_direction(c.beam.dcb_dirs[i]);
                   }
                   return out;
                 }});
    t.push_back({"beam.grid", "cut | hemisphere",
                 [](C& c, const std::string& s) {
                   if (s != "cut" && s != "hemisphere") throw std::invalid_argument("expected cut or hemisphere");
                   c.beam.grid = s;
                 },
                 [](const C& c) { return c.beam.grid; }});
    t.push_back(real_key("beam.grid_step_deg", "deg", [](auto& c) -> auto& { return c.beam.grid_step_deg; }, Conv::kNone, 0, 90, true));
    t.push_back(real_key("beam.pattern_step_deg", "deg", [](auto& c) -> auto& { return c.beam.pattern_step_deg; }, Conv::kNone, 0, 90, true));

    t.push_back(real_key("radio.f_c_hz", "Hz", [](auto& c) -> auto& { return c.carrier_hz; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("radio.p_t_dbm", "dBm", [](auto& c) -> auto& { return c.radio.transmit_power_w; }, Conv::kDbm, -kInf, kInf));
    t.push_back(real_key("radio.rho", "fraction in [0, 1]", [](auto& c) -> auto& { return c.radio.rho; }, Conv::kNone, 0, 1));
    t.push_back(real_key("radio.g_t_db", "dB", [](auto& c) -> auto& { return c.radio.g_t; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.g_rc_db", "dB", [](auto& c) -> auto& { return c.radio.g_rc; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.g_rs_db", "dB", [](auto& c) -> auto& { return c.radio.g_rs; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.g_pc_db", "dB", [](auto& c) -> auto& { return c.radio.g_pc; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.g_ps_db", "dB", [](auto& c) -> auto& { return c.radio.g_ps; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.alpha", "path-loss exponent", [](auto& c) -> auto& { return c.radio.path_loss_exp; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("radio.k_factor", "linear Rician K", [](auto& c) -> auto& { return c.radio.rician_k; }, Conv::kNone, 0, kInf));
    t.push_back(real_key("radio.p_n_dbm", "dBm", [](auto& c) -> auto& { return c.radio.noise_power_w; }, Conv::kDbm, -kInf, kInf));
    t.push_back(real_key("radio.f_n_db", "dB", [](auto& c) -> auto& { return c.radio.noise_figure; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.xi_th_db", "dB", [](auto& c) -> auto& { return c.radio.snr_threshold; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.epsilon", "probability in (0, 1)", [](auto& c) -> auto& { return c.radio.outage_threshold; }, Conv::kNone, 0, 1, true, true));
    t.push_back(real_key("radio.sigma_rcs_m2", "m^2", [](auto& c) -> auto& { return c.radio.rcs_m2; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("radio.p_i_dbm", "dBm", [](auto& c) -> auto& { return c.radio.clutter_power_w; }, Conv::kDbm, -kInf, kInf));
    t.push_back(real_key("radio.gamma_min_db", "dB", [](auto& c) -> auto& { return c.radio.min_sensing_sinr; }, Conv::kDb, -kInf, kInf));
    t.push_back(real_key("radio.b_hz", "Hz", [](auto& c) -> auto& { return c.radio.bandwidth_hz; }, Conv::kNone, 0, kInf, true));

    t.push_back(int_key<int>("ofdm.m", "OFDM symbols", [](auto& c) -> auto& { return c.ofdm.symbols; }, 2, 1 << 20));
    t.push_back(int_key<int>("ofdm.n", "subcarriers", [](auto& c) -> auto& { return c.ofdm.subcarriers; }, 2, 1 << 20));
    t.push_back(real_key("ofdm.delta_f_hz", "Hz", [](auto& c) -> auto& { return c.ofdm.subcarrier_spacing_hz; }, Conv::kNone, 0, kInf, true));
    t.push_back(int_key<int>("ofdm.m_d", "Doppler DFT points", [](auto& c) -> auto& { return c.ofdm.doppler_dft_len; }, 2, 1 << 24));
    t.push_back(int_key<int>("ofdm.n_idft", "range IDFT points", [](auto& c) -> auto& { return c.ofdm.range_idft_len; }, 2, 1 << 24));
    t.push_back(real_key("ofdm.t_guard_s", "s", [](auto& c) -> auto& { return c.ofdm.guard_s; }, Conv::kNone, 0, kInf));
    t.push_back(int_key<int>("ofdm.qam_order", "constellation size, power of 4", [](auto& c) -> auto& { return c.ofdm.qam_order; }, 4, 1 << 16));

    t.push_back(real_key("scene.h_m", "m", [](auto& c) -> auto& { return c.scene.height_m; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("scene.w_r_m", "m", [](auto& c) -> auto& { return c.scene.road_width_m; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("scene.tau_s", "s", [](auto& c) -> auto& { return c.scene.dwell_s; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("scene.r_r_m", "m", [](auto& c) -> auto& { return c.scene.target_range_m; }, Conv::kNone, 0, kInf));
    t.push_back(real_key("scene.v_r_mps", "m/s", [](auto& c) -> auto& { return c.scene.target_velocity_mps; }, Conv::kNone, 0, kInf));
    t.push_back(real_key("scene.fdb_dtheta_deg", "deg", [](auto& c) -> auto& { return c.scene.fdb_widths.theta_deg; }, Conv::kNone, 0, 90, true));
    t.push_back(real_key("scene.fdb_dphi_deg", "deg", [](auto& c) -> auto& { return c.scene.fdb_widths.phi_deg; }, Conv::kNone, 0, 360, true));

    t.push_back(real_key("frame.t_d_ms", "ms", [](auto& c) -> auto& { return c.frame.downlink_ms; }, Conv::kNone, 0, 5));
    t.push_back(real_key("frame.t_g_ms", "ms", [](auto& c) -> auto& { return c.frame.guard_ms; }, Conv::kNone, 0, 5));
    t.push_back(real_key("frame.t_u_ms", "ms", [](auto& c) -> auto& { return c.frame.uplink_ms; }, Conv::kNone, 0, 5));
    t.push_back(int_key<int>("frame.subframes", "subframes per schedule window", [](auto& c) -> auto& { return c.frame.subframes; }, 1, 1 << 20));
    t.push_back(int_key<int>("frame.block_subcarriers", "subcarriers per block", [](auto& c) -> auto& { return c.frame.block_subcarriers; }, 1, 1 << 20));

    t.push_back(int_key<int>("mc.trials", "trials per SINR point", [](auto& c) -> auto& { return c.mc.trials; }, 1, 100'000'000));
    t.push_back({"mc.seed", "unsigned 64-bit integer",
                 [](C& c, const std::string& s) {
                   std::uint64_t v = 0;
                   const auto* end = s.data() + s.size();
                   const auto [ptr, ec] = std::from_chars(s.data(), end, v);
                   if (ec != std::errc{} || ptr != end) throw std::invalid_argument("expected an unsigned integer");
                   c.mc.seed = v;
                 },
                 [](const C& c) { return std::to_string(c.mc.seed); }});
    t.push_back(real_key("mc.gamma_db_min", "dB", [](auto& c) -> auto& { return c.mc.gamma_db_min; }, Conv::kNone, -kInf, kInf));
    t.push_back(real_key("mc.gamma_db_max", "dB", [](auto& c) -> auto& { return c.mc.gamma_db_max; }, Conv::kNone, -kInf, kInf));
    t.push_back(real_key("mc.gamma_db_step", "dB", [](auto& c) -> auto& { return c.mc.gamma_db_step; }, Conv::kNone, 0, kInf, true));
    t.push_back(real_key("mc.clutter_fraction", "fraction in [0, 1]", [](auto& c) -> auto& { return c.mc.clutter_fraction; }, Conv::kNone, 0, 1));
    return t;
  }();
  return table;
}

template <typename F>
void as_config_error(const char* what, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

void cross_validate(ToolkitConfig& c) {
  c.radio.wavelength_m = kSpeedOfLight / c.carrier_hz;
  as_config_error("array", [&] { c.array_config().validate(); });
  as_config_error("beam", [&] { c.beam_spec().validate(); });
  as_config_error("radio", [&] { c.radio.validate(); });
  as_config_error("ofdm", [&] { c.ofdm_config().validate(); });
  as_config_error("frame", [&] { c.frame_config().validate(); });
  int side = 1;
  while (side * side < c.ofdm.qam_order) side *= 2;
  if (side * side != c.ofdm.qam_order) throw ConfigError("ofdm.qam_order: expected a power of 4");
  if (c.ofdm.subcarriers % c.frame.block_subcarriers != 0) {
    throw ConfigError("frame.block_subcarriers: must divide ofdm.n");
  }
  if (c.mc.gamma_db_max < c.mc.gamma_db_min) throw ConfigError("mc.gamma_db_max: must be >= mc.gamma_db_min");
}

}  // namespace

ArrayConfig ToolkitConfig::array_config() const {
  return ArrayConfig{array.layers, array.log2_per_layer, array.spacing_m, kSpeedOfLight / carrier_hz};
}

BeamSpec ToolkitConfig::beam_spec() const { return BeamSpec{beam.fdb_dir, beam.dcb_dirs, beam.beta}; }

DirectionGrid ToolkitConfig::fitting_grid() const {
  return beam.grid == "hemisphere" ? DirectionGrid::hemisphere(beam.grid_step_deg)
                                   : DirectionGrid::azimuth_cut(beam.fdb_dir.theta_deg, beam.grid_step_deg);
}

OfdmConfig ToolkitConfig::ofdm_config() const {
  OfdmConfig o;
  o.symbols = ofdm.symbols;
  o.subcarriers = ofdm.subcarriers;
  o.subcarrier_spacing_hz = ofdm.subcarrier_spacing_hz;
  o.carrier_hz = carrier_hz;
  o.guard_s = ofdm.guard_s;
  o.doppler_dft_len = ofdm.doppler_dft_len;
  o.range_idft_len = ofdm.range_idft_len;
  return o;
}

SceneGeometry ToolkitConfig::scene_geometry() const {
  return SceneGeometry{scene.height_m, scene.road_width_m, max_sensing_range(radio), scene.dwell_s};
}

FrameConfig ToolkitConfig::frame_config() const {
  return FrameConfig::from_ms(frame.downlink_ms, frame.guard_ms, frame.uplink_ms);
}

int ToolkitConfig::subcarrier_blocks() const { return ofdm.subcarriers / frame.block_subcarriers; }

ToolkitConfig parse_config(const std::string& text) {
  std::map<std::string, const KeySpec*> by_name;
  for (const KeySpec& k : key_table()) by_name[k.name] = &k;

  ToolkitConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected `section.key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key `" + key + "`");
    if (!seen.insert(key).second) throw ConfigError("duplicate key `" + key + "`");
    try {
      it->second->parse(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError("key `" + key + "` (" + it->second->unit + "): " + e.what());
    }
  }

  std::string missing;
  for (const KeySpec& k : key_table()) {
    if (!seen.count(k.name)) missing += "\n  " + k.name + " [" + k.unit + "]";
  }
  if (!missing.empty()) throw ConfigError("missing keys:" + missing);

  cross_validate(cfg);
  return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ToolkitConfig& cfg) {
  std::string out;
  std::string section;
  for (const KeySpec& k : key_table()) {
    const std::string sec = k.name.substr(0, k.name.find('.'));
    if (sec != section) {
      if (!section.empty()) out += '\n';
      section = sec;
    }
    out += k.name + " = " + k.format(cfg) + "\n";
  }
  return out;
}

std::vector<ConfigKeyInfo> config_keys() {
  std::vector<ConfigKeyInfo> out;
  for (const KeySpec& k : key_table()) out.push_back({k.name, k.unit});
  return out;
}

}  // namespace sbs
