#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sbs/common.hpp"

namespace sbs {

/// M x N modulation-symbol matrix: row m is OFDM symbol m, column n is subcarrier n.
using SymbolMatrix = Eigen::MatrixXcd;

struct OfdmConfig {
  int symbols = 256;                 // M
  int subcarriers = 1024;            // N
  double subcarrier_spacing_hz = 90.909e3;
  double carrier_hz = 24e9;
  double guard_s = 0.0;              // cyclic guard of one OFDM symbol
  int doppler_dft_len = 256;         // M_D >= M
  int range_idft_len = 1024;         // N_IDFT >= N

  /// Guard set to one eighth of the elementary symbol and no zero padding.
  static OfdmConfig unpadded(int symbols, int subcarriers, double spacing_hz, double carrier_hz);

  double elementary_symbol_s() const { return 1.0 / subcarrier_spacing_hz; }
  double symbol_duration_s() const { return elementary_symbol_s() + guard_s; }
  double bandwidth_hz() const { return subcarriers * subcarrier_spacing_hz; }

  /// Velocity spacing of the logical (unpadded) Doppler grid, c / (2 T M f_c).
  double velocity_resolution_mps() const;
  /// Range spacing of the logical grid, c / (2 B).
  double range_resolution_m() const;
  /// Width of one bin of the (possibly padded) Doppler transform.
  double velocity_bin_mps() const;
  /// Width of one bin of the (possibly padded) range transform.
  double range_bin_m() const;

  void validate() const;
};

/// Echo of a single point target plus noise and clutter, symbol domain.
struct EchoModel {
  double amplitude = 1.0;     // A_s
  double range_m = 0.0;       // R_r
  double velocity_mps = 0.0;  // V_r
  double noise_std = 0.0;     // per-quadrature sigma_n
  double clutter_std = 0.0;   // per-quadrature sigma_i

  /// gamma = A_s^2 / (2 (sigma_n^2 + sigma_i^2)); +inf when noiseless.
  double sinr() const;

  /// Unit amplitude echo whose interference is split between noise and
  /// clutter by `clutter_fraction` of the total power, at SINR `gamma`.
  static EchoModel at_sinr(double gamma, double range_m, double velocity_mps, double clutter_fraction = 0.5);

  void validate() const;
};

/// Equiprobable square QAM symbols with unit average power. `order` must be a
/// power of 4 (4, 16, 64, ...).
SymbolMatrix generate_symbols(const OfdmConfig& cfg, int order, std::uint64_t seed);

/// rx(m, n) = A_s tx(m, n) k_r(n) k_v(m) + noise + clutter, with
///   k_r(n) = exp(-j 4 pi n df R / c),  k_v(m) = exp(-j 4 pi m T V f_c / c).
SymbolMatrix synthesize_echo(const OfdmConfig& cfg, const SymbolMatrix& tx, const EchoModel& echo,
                             std::uint64_t seed);

/// Element-wise rx / tx. With `unit_modulus` set, divides by the transmitted
/// phase only (rx * conj(tx) / |tx|), which keeps the interference power per
/// cell constant for non-constant-modulus constellations.
SymbolMatrix divide(const SymbolMatrix& tx, const SymbolMatrix& rx, bool unit_modulus = false);

/// Noise-free division grid A_s k_v(m) k_r(n).
SymbolMatrix ideal_division_grid(const OfdmConfig& cfg, const EchoModel& echo);

struct AxisEstimate {
  /// Peak index of each transformed line (one per subcarrier for velocity,
  /// one per OFDM symbol for range).
  std::vector<int> bins;
  /// Lower edge of each line's quantization interval.
  std::vector<double> values;
  double mean = 0.0;
  /// Most frequent peak index (lowest on ties).
  int mode_bin = 0;
};

/// Doppler processing along the symbol axis of every subcarrier with a
/// length-M_D zero-padded transform. Bin i maps to [i, i+1) * velocity_bin_mps.
AxisEstimate estimate_velocity(const SymbolMatrix& division, const OfdmConfig& cfg);

/// Range processing along the subcarrier axis of every OFDM symbol with a
/// length-N_IDFT zero-padded IDFT. Bin i maps to [i, i+1) * range_bin_m.
AxisEstimate estimate_range(const SymbolMatrix& division, const OfdmConfig& cfg);

struct Estimate {
  double v_hat = 0.0;
  double r_hat = 0.0;
  int v_bin = 0;
  int r_bin = 0;
};

Estimate estimate_target(const SymbolMatrix& division, const OfdmConfig& cfg);

/// Probability that a length-L peak search picks the true bin:
/// (1 - exp(-4 pi^2 gamma))^(L-1).
double p_correct_bin(double gamma, int length);

/// Probability of one particular wrong bin: exp(-4 pi^2 gamma).
double p_wrong_bin(double gamma);

/// V sqrt(1 - (1 - exp(-4 pi^2 gamma))^(2(M-1))).
double rmse_velocity_theory(double velocity_mps, double gamma, int symbols);

/// R sqrt(1 - (1 - exp(-4 pi^2 gamma))^(2(N-1))).
double rmse_range_theory(double range_m, double gamma, int subcarriers);

/// Rounds a velocity / range to the nearest point of the logical grid.
double snap_velocity(const OfdmConfig& cfg, double velocity_mps);
double snap_range(const OfdmConfig& cfg, double range_m);

struct RadarMcSettings {
  OfdmConfig ofdm;
  double range_m = 200.0;
  double velocity_mps = 50.0;
  std::vector<double> gamma_db;
  int trials = 5000;
  std::uint64_t seed = 1;
  int qam_order = 4;
  double clutter_fraction = 0.5;
  /// Snap truth onto the logical grid so only decision errors are measured.
  bool snap_truth = true;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct RadarMcPoint {
  double gamma_db = 0.0;
  double gamma = 0.0;
  long velocity_lines = 0;
  long velocity_correct = 0;
  long range_lines = 0;
  long range_correct = 0;
  double rmse_velocity_mc = 0.0;
  double rmse_range_mc = 0.0;
  double rmse_velocity_theory = 0.0;
  double rmse_range_theory = 0.0;
  double p_correct_velocity_theory = 0.0;
  double p_correct_range_theory = 0.0;

  double p_correct_velocity_mc() const;
  double p_correct_range_mc() const;
};

struct RadarMcResult {
  double true_range_m = 0.0;
  double true_velocity_mps = 0.0;
  std::vector<RadarMcPoint> points;
};

/// Per-line Monte Carlo of both estimators over an SINR sweep. Every line
/// (subcarrier for velocity, symbol for range) counts as one peak decision;
/// RMSE pools the squared error of every per-line estimate. Deterministic for
/// a given seed regardless of `threads`.
RadarMcResult run_radar_monte_carlo(const RadarMcSettings& settings);

}  // namespace sbs
