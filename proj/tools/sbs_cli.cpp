// sbs: sensing base station experiment runner.
//
// Exit codes: 0 success, 1 other failure, 2 config or usage error, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sbs/config.hpp"
#include "sbs/experiments.hpp"

namespace {

std::vector<sbs::BeamWidths> parse_widths(const std::string& text) {
  std::vector<sbs::BeamWidths> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw sbs::ConfigError("--widths expects dtheta:dphi[,dtheta:dphi...]");
    out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensing base station toolkit: beamforming, link budget, OFDM radar Monte Carlo, scanning and frame planning"};
  app.require_subcommand(1);

  std::string config_path = "config/paper.cfg";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  unsigned threads = 0;
  app.add_option("--config", config_path, "toolkit config file")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (defaults to mc.seed)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads for Monte Carlo (0 = all cores)");

  sbs::ExperimentOptions opt;

  app.add_subcommand("beamform", "joint FDB/DCB beamforming: pattern.csv, summary.csv");

  auto* link = app.add_subcommand("linkbudget", "range trade-off and outage capacity: ranges.csv, capacity.csv");
  link->add_option("--rho-step", opt.rho_step, "rho sweep step")->capture_default_str();
  link->add_option("--x-min", opt.x_min_m, "capacity sweep start, m")->capture_default_str();
  link->add_option("--x-max", opt.x_max_m, "capacity sweep end, m")->capture_default_str();
  link->add_option("--x-step", opt.x_step_m, "capacity sweep step, m")->capture_default_str();

  auto* radar = app.add_subcommand("radar-mc", "Monte Carlo range/velocity RMSE vs theory: rmse.csv");
  int trials = 0;
  int symbols = 0;
  int subcarriers = 0;
  double g_min = 0.0;
  double g_max = 0.0;
  double g_step = 0.0;
  auto* trials_opt = radar->add_option("--trials", trials, "trials per SINR point (defaults to mc.trials)");
  auto* m_opt = radar->add_option("--m", symbols, "OFDM symbols M");
  auto* n_opt = radar->add_option("--n", subcarriers, "subcarriers N");
  auto* gmin_opt = radar->add_option("--gamma-min", g_min, "SINR sweep start, dB");
  auto* gmax_opt = radar->add_option("--gamma-max", g_max, "SINR sweep end, dB");
  auto* gstep_opt = radar->add_option("--gamma-step", g_step, "SINR sweep step, dB");
  radar->add_flag("--padded", opt.padded, "use the configured zero-padded transform lengths");

  auto* scan = app.add_subcommand("scan-period", "FDB scanning period vs rho and beamwidth: scan.csv");
  std::string widths = "2:3,4:6";
  scan->add_option("--widths", widths, "beamwidth pairs dtheta:dphi in deg")->capture_default_str();
  scan->add_option("--rho-step", opt.scan_rho_step, "rho sweep step")->capture_default_str();

  auto* frame = app.add_subcommand("frame-plan", "TDD frame and TSF-DMA allocation: frame.csv, allocation.csv, violations.txt");
  std::string requests;
  frame->add_option("--requests", requests, "CSV of user_id,beam_id,demand")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; any other usage error counts as a config error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const sbs::ToolkitConfig cfg = sbs::load_config(config_path);
    opt.out_dir = out_dir;
    opt.threads = threads;
    if (*seed_opt) opt.seed = seed;
    if (*trials_opt) opt.trials = trials;
    if (*m_opt) opt.symbols = symbols;
    if (*n_opt) opt.subcarriers = subcarriers;
    if (*gmin_opt) opt.gamma_db_min = g_min;
    if (*gmax_opt) opt.gamma_db_max = g_max;
    if (*gstep_opt) opt.gamma_db_step = g_step;
    opt.scan_widths = parse_widths(widths);
    opt.requests_csv = requests;

    const std::string name = app.get_subcommands().front()->get_name();
    const sbs::RunManifest manifest = sbs::run_experiment(cfg, name, opt);
    for (const auto& [file, sum] : manifest.outputs) {
      std::cout << (opt.out_dir / file).string() << "  sha256=" << sum << "\n";
    }
    return 0;
  } catch (const sbs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sbs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const sbs::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
