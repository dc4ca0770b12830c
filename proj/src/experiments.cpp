#include "sbs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace sbs {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string config_hash(const ToolkitConfig& cfg) { return sha256_hex(dump_config(cfg)); }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["toolkit_version"] = version;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["master_seed"] = seed;
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& [name, sum] : outputs) files[name] = sum;
  j["outputs"] = files;
  return j.dump(2) + "\n";
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(std::string name, const std::string& hash, std::uint64_t seed, const std::string& experiment)
      : name_(std::move(name)) {
    body_ << "# sbs " << kToolkitVersion << "\n# experiment=" << experiment << "\n# config_hash=" << hash
          << "\n# seed=" << seed << "\n";
  }
  void meta(const std::string& key, const std::string& value) { body_ << "# " << key << "=" << value << "\n"; }
  void row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) body_ << ',';
      body_ << c;
      first = false;
    }
    body_ << '\n';
  }
  const std::string& name() const { return name_; }
  std::string text() const { return body_.str(); }

 private:
  std::string name_;
  std::ostringstream body_;
};

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << text;
    sums_[name] = sha256_hex(text);
  }
  void write(const CsvFile& csv) { write(csv.name(), csv.text()); }

  std::vector<std::pair<std::string, std::string>> sums() const { return {sums_.begin(), sums_.end()}; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> sums_;
};

struct RunContext {
  const ToolkitConfig& cfg;
  const ExperimentOptions& opt;
  std::string hash;
  std::uint64_t seed;
  std::string experiment;
  OutputSet& out;

  CsvFile csv(std::string name) const { return CsvFile(std::move(name), hash, seed, experiment); }
};

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> v;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

double gain_at(const ArrayConfig& array, const CVector& w, const Direction& dir) {
  const Direction one[] = {dir};
  return beam_pattern(array, w, one).gain_db.front();
}

void run_beamform(const RunContext& ctx) {
  const ArrayConfig array = ctx.cfg.array_config();
  const BeamSpec spec = ctx.cfg.beam_spec();
  const JointBeamforming design = design_joint_beams(array, spec, ctx.cfg.fitting_grid());

  const DirectionGrid cut = DirectionGrid::azimuth_cut(spec.fdb_dir.theta_deg, ctx.cfg.beam.pattern_step_deg);
  const BeamPattern pattern = beam_pattern(array, design.solution.w_opt, cut.points);
  CsvFile pattern_csv = ctx.csv("pattern.csv");
  pattern_csv.row({"phi_deg", "theta_deg", "gain_db"});
  for (std::size_t i = 0; i < pattern.grid.size(); ++i) {
    pattern_csv.row({num(pattern.grid[i].phi_deg), num(pattern.grid[i].theta_deg), num(pattern.gain_db[i])});
  }
  ctx.out.write(pattern_csv);

  CsvFile summary = ctx.csv("summary.csv");
  summary.meta("objective_joint", num(design.solution.objective));
  summary.meta("objective_superposition", num(design.superposition_objective));
  summary.meta("normal_matrix_condition", num(design.solution.condition));
  summary.row({"beam", "phi_deg", "theta_deg", "gain_joint_db", "gain_superposition_db", "improvement_db",
               "delta_theta_deg", "delta_phi_deg"});
  const auto dirs = spec.all_directions();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double joint = gain_at(array, design.solution.w_opt, dirs[i]);
    const double base = gain_at(array, design.superposition, dirs[i]);
    const DirectionGrid cross = DirectionGrid::cross(dirs[i], 10.0, ctx.cfg.beam.pattern_step_deg);
    const Beamwidth bw = measure_beamwidth(beam_pattern(array, design.solution.w_opt, cross.points), dirs[i]);
    summary.row({i == 0 ? "fdb" : "dcb" + std::to_string(i), num(dirs[i].phi_deg), num(dirs[i].theta_deg), num(joint),
                 num(base), num(joint - base), num(bw.delta_theta_deg), num(bw.delta_phi_deg)});
  }
  ctx.out.write(summary);
}

void run_linkbudget(const RunContext& ctx) {
  const RadioParams base = ctx.cfg.radio;
  CsvFile ranges = ctx.csv("ranges.csv");
  if (const auto cross = range_crossover(base)) {
    ranges.meta("crossover_rho", num(cross->rho));
    ranges.meta("crossover_range_m", num(cross->range_m));
  } else {
    ranges.meta("crossover_rho", "none");
  }
  ranges.row({"rho", "r_max_comm_m", "r_max_sense_m"});
  for (double rho : arange(0.0, 1.0, ctx.opt.rho_step)) {
    RadioParams p = base;
    p.rho = std::min(1.0, rho);
    const double comm = p.rho > 0.0 ? max_comm_range(p) : 0.0;
    const double sense = p.rho < 1.0 ? max_sensing_range(p) : 0.0;
    ranges.row({num(p.rho), num(comm), num(sense)});
  }
  ctx.out.write(ranges);

  CsvFile capacity = ctx.csv("capacity.csv");
  capacity.meta("rho", num(base.rho));
  capacity.row({"x_m", "outage_prob", "capacity_bps"});
  for (double x : arange(ctx.opt.x_min_m, ctx.opt.x_max_m, ctx.opt.x_step_m)) {
    capacity.row({num(x), num(outage_probability(base, x)), num(outage_capacity(base, x))});
  }
  ctx.out.write(capacity);
}

void run_radar_mc(const RunContext& ctx) {
  RadarMcSettings s;
  s.ofdm = ctx.cfg.ofdm_config();
  s.ofdm.symbols = ctx.opt.symbols.value_or(s.ofdm.symbols);
  s.ofdm.subcarriers = ctx.opt.subcarriers.value_or(s.ofdm.subcarriers);
  if (!ctx.opt.padded) {
    s.ofdm.doppler_dft_len = s.ofdm.symbols;
    s.ofdm.range_idft_len = s.ofdm.subcarriers;
  }
  s.ofdm.validate();
  s.range_m = ctx.cfg.scene.target_range_m;
  s.velocity_mps = ctx.cfg.scene.target_velocity_mps;
  s.trials = ctx.opt.trials.value_or(ctx.cfg.mc.trials);
  s.seed = ctx.seed;
  s.qam_order = ctx.cfg.ofdm.qam_order;
  s.clutter_fraction = ctx.cfg.mc.clutter_fraction;
  s.threads = ctx.opt.threads;
  s.gamma_db = arange(ctx.opt.gamma_db_min.value_or(ctx.cfg.mc.gamma_db_min),
                      ctx.opt.gamma_db_max.value_or(ctx.cfg.mc.gamma_db_max),
                      ctx.opt.gamma_db_step.value_or(ctx.cfg.mc.gamma_db_step));
  const RadarMcResult result = run_radar_monte_carlo(s);

  CsvFile csv = ctx.csv("rmse.csv");
  csv.meta("symbols", std::to_string(s.ofdm.symbols));
  csv.meta("subcarriers", std::to_string(s.ofdm.subcarriers));
  csv.meta("doppler_dft_len", std::to_string(s.ofdm.doppler_dft_len));
  csv.meta("range_idft_len", std::to_string(s.ofdm.range_idft_len));
  csv.meta("trials", std::to_string(s.trials));
  csv.meta("true_range_m", num(result.true_range_m));
  csv.meta("true_velocity_mps", num(result.true_velocity_mps));
  csv.meta("p_correct_axis", "velocity");
  csv.row({"gamma_db", "rmse_range_mc", "rmse_range_theory", "rmse_vel_mc", "rmse_vel_theory", "p_correct_mc",
           "p_correct_theory"});
  for (const RadarMcPoint& pt : result.points) {
    csv.row({num(pt.gamma_db), num(pt.rmse_range_mc), num(pt.rmse_range_theory), num(pt.rmse_velocity_mc),
             num(pt.rmse_velocity_theory), num(pt.p_correct_velocity_mc()), num(pt.p_correct_velocity_theory)});
  }
  ctx.out.write(csv);
}

void run_scan_period(const RunContext& ctx) {
  CsvFile csv = ctx.csv("scan.csv");
  csv.row({"rho", "delta_theta_deg", "delta_phi_deg", "T_sc_s", "cells_visited"});
  for (const BeamWidths& widths : ctx.opt.scan_widths) {
    for (double rho : arange(0.0, 1.0, ctx.opt.scan_rho_step)) {
      if (rho >= 1.0 - 1e-12) continue;  // no sensing power
      RadioParams p = ctx.cfg.radio;
      p.rho = rho;
      SceneGeometry geom = ctx.cfg.scene_geometry();
      geom.max_sensing_range_m = max_sensing_range(p);
      const ScanResult scan = scanning_period(geom, widths, ctx.cfg.beam.dcb_dirs);
      csv.row({num(rho), num(widths.theta_deg), num(widths.phi_deg), num(scan.period_s), std::to_string(scan.dwells)});
    }
  }
  ctx.out.write(csv);
}

void run_frame_plan(const RunContext& ctx) {
  if (ctx.opt.requests_csv.empty()) throw ConfigError("frame-plan needs --requests PATH");
  const auto requests = read_user_requests(ctx.opt.requests_csv);
  const FrameConfig frame = ctx.cfg.frame_config();
  const SceneGeometry geom = ctx.cfg.scene_geometry();

  CsvFile timeline = ctx.csv("frame.csv");
  timeline.meta("guard_covers_max_sensing_echo", frame.guard_covers_echo(geom.max_sensing_range_m) ? "true" : "false");
  timeline.row({"half_frame", "interval", "start_ns", "end_ns", "sbsa1", "sbsa2"});
  for (const FrameInterval& iv : build_frame(frame)) {
    timeline.row({std::to_string(iv.half_frame), to_string(iv.kind), std::to_string(iv.start_ns),
                  std::to_string(iv.end_ns), to_string(iv.sbsa1), to_string(iv.sbsa2)});
  }
  ctx.out.write(timeline);

  ResourceGrid grid(static_cast<int>(ctx.cfg.beam.dcb_dirs.size()), ctx.cfg.frame.subframes,
                    ctx.cfg.subcarrier_blocks());
  const AllocationReport alloc = allocate(grid, requests);
  CsvFile allocation = ctx.csv("allocation.csv");
  allocation.row({"user_id", "beam_id", "subframe", "block"});
  for (const Assignment& a : alloc.granted) {
    allocation.row({std::to_string(a.user_id), std::to_string(a.beam_id), std::to_string(a.subframe),
                    std::to_string(a.block)});
  }
  ctx.out.write(allocation);

  const ScanResult scan = scanning_period(geom, ctx.cfg.scene.fdb_widths, ctx.cfg.beam.dcb_dirs);
  const InterferenceReport check =
      check_interference_free(grid, scan.cells, ctx.cfg.beam.dcb_dirs, ctx.cfg.scene.fdb_widths);
  std::ostringstream report;
  report << "interference_free: " << (check.ok ? "true" : "false") << "\n";
  for (const Violation& v : check.violations) report << "violation: " << v.describe() << "\n";
  for (const Shortfall& s : alloc.unmet) {
    report << "unmet: user " << s.user_id << " beam " << s.beam_id << " demanded " << s.demanded << " granted "
           << s.granted << " shortfall " << (s.demanded - s.granted) << "\n";
  }
  ctx.out.write("violations.txt", report.str());
}

}  // namespace

std::vector<UserRequest> read_user_requests(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open request file " + path.string());
  std::vector<UserRequest> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("user_id", 0) == 0) continue;
    UserRequest r;
    char c1 = 0;
    char c2 = 0;
    std::istringstream row(line);
    if (!(row >> r.user_id >> c1 >> r.beam_id >> c2 >> r.demand) || c1 != ',' || c2 != ',') {
      throw ConfigError("request file line " + std::to_string(line_no) + ": expected user_id,beam_id,demand");
    }
    out.push_back(r);
  }
  return out;
}

RunManifest run_experiment(const ToolkitConfig& cfg, const std::string& experiment, const ExperimentOptions& options) {
  OutputSet out(options.out_dir);
  RunContext ctx{cfg, options, config_hash(cfg), options.seed.value_or(cfg.mc.seed), experiment, out};
  if (experiment == "beamform") {
    run_beamform(ctx);
  } else if (experiment == "linkbudget") {
    run_linkbudget(ctx);
  } else if (experiment == "radar-mc") {
    run_radar_mc(ctx);
  } else if (experiment == "scan-period") {
    run_scan_period(ctx);
  } else if (experiment == "frame-plan") {
    run_frame_plan(ctx);
  } else {
    throw ConfigError("unknown experiment `" + experiment + "`");
  }
  RunManifest manifest;
  manifest.config_hash = ctx.hash;
  manifest.seed = ctx.seed;
  manifest.experiment = experiment;
  manifest.outputs = out.sums();
  std::ofstream(options.out_dir / "manifest.json", std::ios::binary) << manifest.to_json();
  return manifest;
}

}  // namespace sbs
