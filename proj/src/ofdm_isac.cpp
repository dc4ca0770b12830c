#include "sbs/ofdm_isac.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "sbs/fft.hpp"
#include "sbs/rng.hpp"

namespace sbs {

using Complex = std::complex<double>;

OfdmConfig OfdmConfig::unpadded(int symbols, int subcarriers, double spacing_hz, double carrier_hz) {
  OfdmConfig cfg;
  cfg.symbols = symbols;
  cfg.subcarriers = subcarriers;
  cfg.subcarrier_spacing_hz = spacing_hz;
  cfg.carrier_hz = carrier_hz;
  cfg.guard_s = 1.0 / spacing_hz / 8.0;
  cfg.doppler_dft_len = symbols;
  cfg.range_idft_len = subcarriers;
  cfg.validate();
  return cfg;
}

double OfdmConfig::velocity_resolution_mps() const {
  return kSpeedOfLight / (2.0 * symbol_duration_s() * symbols * carrier_hz);
}

double OfdmConfig::range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz()); }

double OfdmConfig::velocity_bin_mps() const {
  return kSpeedOfLight / (2.0 * symbol_duration_s() * doppler_dft_len * carrier_hz);
}

double OfdmConfig::range_bin_m() const {
  return kSpeedOfLight / (2.0 * bandwidth_hz() * (static_cast<double>(range_idft_len) / subcarriers));
}

void OfdmConfig::validate() const {
  if (symbols < 1 || subcarriers < 1) throw DomainError("symbol and subcarrier counts must be positive");
  if (!(subcarrier_spacing_hz > 0.0) || !(carrier_hz > 0.0)) {
    throw DomainError("subcarrier spacing and carrier frequency must be positive");
  }
  if (!(guard_s >= 0.0)) throw DomainError("guard duration must be >= 0");
  if (doppler_dft_len < symbols) throw DomainError("Doppler DFT length must be >= number of symbols");
  if (range_idft_len < subcarriers) throw DomainError("range IDFT length must be >= number of subcarriers");
}

double EchoModel::sinr() const {
  const double interference = noise_std * noise_std + clutter_std * clutter_std;
  if (interference == 0.0) return std::numeric_limits<double>::infinity();
  return amplitude * amplitude / (2.0 * interference);
}

EchoModel EchoModel::at_sinr(double gamma, double range_m, double velocity_mps, double clutter_fraction) {
  if (!(gamma > 0.0)) throw DomainError("SINR must be positive");
  if (!(clutter_fraction >= 0.0 && clutter_fraction <= 1.0)) throw DomainError("clutter fraction outside [0, 1]");
  const double variance = 1.0 / (2.0 * gamma);  // sigma_n^2 + sigma_i^2
  return EchoModel{1.0, range_m, velocity_mps, std::sqrt(variance * (1.0 - clutter_fraction)),
                   std::sqrt(variance * clutter_fraction)};
}

void EchoModel::validate() const {
  if (!(amplitude >= 0.0) || !(noise_std >= 0.0) || !(clutter_std >= 0.0)) {
    throw DomainError("echo amplitude and noise deviations must be >= 0");
  }
}

SymbolMatrix generate_symbols(const OfdmConfig& cfg, int order, std::uint64_t seed) {
  cfg.validate();
  int side = 1;
  while (side * side < order) side *= 2;
  if (order < 4 || side * side != order) throw DomainError("QAM order must be a power of 4");
  const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, side - 1);
  SymbolMatrix tx(cfg.symbols, cfg.subcarriers);
  for (Eigen::Index n = 0; n < tx.cols(); ++n) {
    for (Eigen::Index m = 0; m < tx.rows(); ++m) {
      const double re = 2 * level(rng) - (side - 1);
      const double im = 2 * level(rng) - (side - 1);
      tx(m, n) = Complex(re * scale, im * scale);
    }
  }
  return tx;
}

namespace {

Eigen::VectorXcd range_ramp(const OfdmConfig& cfg, double range_m) {
  Eigen::VectorXcd kr(cfg.subcarriers);
  for (int n = 0; n < cfg.subcarriers; ++n) {
    kr(n) = std::polar(1.0, -4.0 * kPi * n * cfg.subcarrier_spacing_hz * range_m / kSpeedOfLight);
  }
  return kr;
}

Eigen::VectorXcd doppler_ramp(const OfdmConfig& cfg, double velocity_mps) {
  Eigen::VectorXcd kv(cfg.symbols);
  const double t = cfg.symbol_duration_s();
  for (int m = 0; m < cfg.symbols; ++m) {
    kv(m) = std::polar(1.0, -4.0 * kPi * m * t * velocity_mps * cfg.carrier_hz / kSpeedOfLight);
  }
  return kv;
}

}  // namespace

SymbolMatrix ideal_division_grid(const OfdmConfig& cfg, const EchoModel& echo) {
  cfg.validate();
  return echo.amplitude * (doppler_ramp(cfg, echo.velocity_mps) * range_ramp(cfg, echo.range_m).transpose());
}

SymbolMatrix synthesize_echo(const OfdmConfig& cfg, const SymbolMatrix& tx, const EchoModel& echo,
                             std::uint64_t seed) {
  echo.validate();
  if (tx.rows() != cfg.symbols || tx.cols() != cfg.subcarriers) {
    throw DomainError("transmit symbol matrix does not match the OFDM configuration");
  }
  SymbolMatrix rx = tx.cwiseProduct(ideal_division_grid(cfg, echo));
  if (echo.noise_std == 0.0 && echo.clutter_std == 0.0) return rx;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, echo.noise_std > 0.0 ? echo.noise_std : 1.0);
  std::normal_distribution<double> clutter(0.0, echo.clutter_std > 0.0 ? echo.clutter_std : 1.0);
  const bool has_noise = echo.noise_std > 0.0;
  const bool has_clutter = echo.clutter_std > 0.0;
  for (Eigen::Index n = 0; n < rx.cols(); ++n) {
    for (Eigen::Index m = 0; m < rx.rows(); ++m) {
      Complex add{};
      if (has_noise) add += Complex(noise(rng), noise(rng));
      if (has_clutter) add += Complex(clutter(rng), clutter(rng));
      rx(m, n) += add;
    }
  }
  return rx;
}

SymbolMatrix divide(const SymbolMatrix& tx, const SymbolMatrix& rx, bool unit_modulus) {
  if (tx.rows() != rx.rows() || tx.cols() != rx.cols()) throw DomainError("symbol matrices differ in shape");
  SymbolMatrix out(tx.rows(), tx.cols());
  for (Eigen::Index n = 0; n < tx.cols(); ++n) {
    for (Eigen::Index m = 0; m < tx.rows(); ++m) {
      const Complex s = tx(m, n);
      if (s == Complex{}) {
        std::ostringstream os;
        os << "zero transmit symbol at (" << m << ", " << n << ")";
        throw DomainError(os.str());
      }
      out(m, n) = unit_modulus ? rx(m, n) * std::conj(s) / std::abs(s) : rx(m, n) / s;
    }
  }
  return out;
}

namespace {

int argmax_magnitude(const std::vector<Complex>& spectrum) {
  int best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double mag = std::norm(spectrum[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = static_cast<int>(i);
    }
  }
  return best;
}

AxisEstimate summarize(std::vector<int> bins, double bin_width) {
  AxisEstimate est;
  est.values.reserve(bins.size());
  std::map<int, int> counts;
  double sum = 0.0;
  for (int b : bins) {
    est.values.push_back(b * bin_width);
    sum += b * bin_width;
    ++counts[b];
  }
  est.mean = bins.empty() ? 0.0 : sum / static_cast<double>(bins.size());
  int best_count = 0;
  for (const auto& [bin, count] : counts) {
    if (count > best_count) {
      best_count = count;
      est.mode_bin = bin;
    }
  }
  est.bins = std::move(bins);
  return est;
}

// Both phase ramps rotate as exp(-j 2 pi k i / L) for an on-grid target at
// bin k, so a positive-exponent kernel puts the peak at index k on both axes.
std::vector<int> velocity_bins(const SymbolMatrix& division, PaddedDft& dft) {
  std::vector<Complex> spectrum(dft.length());
  std::vector<int> bins(static_cast<std::size_t>(division.cols()));
  for (Eigen::Index n = 0; n < division.cols(); ++n) {
    dft.transform({division.col(n).data(), static_cast<std::size_t>(division.rows())}, spectrum);
    bins[static_cast<std::size_t>(n)] = argmax_magnitude(spectrum);
  }
  return bins;
}

std::vector<int> range_bins(const SymbolMatrix& division, PaddedDft& idft) {
  std::vector<Complex> line(static_cast<std::size_t>(division.cols()));
  std::vector<Complex> spectrum(idft.length());
  std::vector<int> bins(static_cast<std::size_t>(division.rows()));
  for (Eigen::Index m = 0; m < division.rows(); ++m) {
    for (Eigen::Index n = 0; n < division.cols(); ++n) line[static_cast<std::size_t>(n)] = division(m, n);
    idft.transform(line, spectrum);
    bins[static_cast<std::size_t>(m)] = argmax_magnitude(spectrum);
  }
  return bins;
}

void check_grid(const SymbolMatrix& division, const OfdmConfig& cfg) {
  cfg.validate();
  if (division.rows() != cfg.symbols || division.cols() != cfg.subcarriers) {
    throw DomainError("division grid does not match the OFDM configuration");
  }
}

}  // namespace

AxisEstimate estimate_velocity(const SymbolMatrix& division, const OfdmConfig& cfg) {
  check_grid(division, cfg);
  if (cfg.symbols < 2) throw DomainError("velocity estimation needs at least two symbols");
  PaddedDft dft(static_cast<std::size_t>(cfg.doppler_dft_len), PaddedDft::Sign::kPositive);
  return summarize(velocity_bins(division, dft), cfg.velocity_bin_mps());
}

AxisEstimate estimate_range(const SymbolMatrix& division, const OfdmConfig& cfg) {
  check_grid(division, cfg);
  if (cfg.subcarriers < 2) throw DomainError("range estimation needs at least two subcarriers");
  PaddedDft idft(static_cast<std::size_t>(cfg.range_idft_len), PaddedDft::Sign::kPositive);
  return summarize(range_bins(division, idft), cfg.range_bin_m());
}

Estimate estimate_target(const SymbolMatrix& division, const OfdmConfig& cfg) {
  const AxisEstimate v = estimate_velocity(division, cfg);
  const AxisEstimate r = estimate_range(division, cfg);
  return {v.mean, r.mean, v.mode_bin, r.mode_bin};
}

double p_wrong_bin(double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("SINR must be >= 0");
  return std::exp(-4.0 * kPi * kPi * gamma);
}

double p_correct_bin(double gamma, int length) {
  if (length < 2) throw DomainError("transform length must be >= 2");
  const double miss = p_wrong_bin(gamma);
  if (miss >= 1.0) return 0.0;
  return std::exp((length - 1) * std::log1p(-miss));
}

namespace {
double rmse_theory(double truth, double gamma, int length) {
  const double p = p_correct_bin(gamma, length);
  return truth * std::sqrt(std::max(0.0, 1.0 - p * p));
}
}  // namespace

double rmse_velocity_theory(double velocity_mps, double gamma, int symbols) {
  return rmse_theory(velocity_mps, gamma, symbols);
}

double rmse_range_theory(double range_m, double gamma, int subcarriers) {
  return rmse_theory(range_m, gamma, subcarriers);
}

double snap_velocity(const OfdmConfig& cfg, double velocity_mps) {
  const double step = cfg.velocity_resolution_mps();
  return std::round(velocity_mps / step) * step;
}

double snap_range(const OfdmConfig& cfg, double range_m) {
  const double step = cfg.range_resolution_m();
  return std::round(range_m / step) * step;
}

double RadarMcPoint::p_correct_velocity_mc() const {
  return velocity_lines > 0 ? static_cast<double>(velocity_correct) / velocity_lines : 0.0;
}

double RadarMcPoint::p_correct_range_mc() const {
  return range_lines > 0 ? static_cast<double>(range_correct) / range_lines : 0.0;
}

namespace {

struct TrialRecord {
  long velocity_correct = 0;
  long range_correct = 0;
  double velocity_sq_err = 0.0;
  double range_sq_err = 0.0;
};

}  // namespace

RadarMcResult run_radar_monte_carlo(const RadarMcSettings& s) {
  s.ofdm.validate();
  if (s.trials < 1) throw DomainError("Monte Carlo needs at least one trial");
  const OfdmConfig& cfg = s.ofdm;

  RadarMcResult result;
  result.true_velocity_mps = s.snap_truth ? snap_velocity(cfg, s.velocity_mps) : s.velocity_mps;
  result.true_range_m = s.snap_truth ? snap_range(cfg, s.range_m) : s.range_m;
  // Bins holding the truth on the padded transforms.
  const auto true_v_bin = static_cast<int>(std::llround(result.true_velocity_mps / cfg.velocity_bin_mps()));
  const auto true_r_bin = static_cast<int>(std::llround(result.true_range_m / cfg.range_bin_m()));

  unsigned threads = s.threads != 0 ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(s.trials));

  for (std::size_t point = 0; point < s.gamma_db.size(); ++point) {
    const double gamma = db_to_linear(s.gamma_db[point]);
    const EchoModel echo =
        EchoModel::at_sinr(gamma, result.true_range_m, result.true_velocity_mps, s.clutter_fraction);

    std::vector<TrialRecord> records(static_cast<std::size_t>(s.trials));
    std::atomic<int> next{0};
    auto worker = [&]() {
      PaddedDft dft(static_cast<std::size_t>(cfg.doppler_dft_len), PaddedDft::Sign::kPositive);
      PaddedDft idft(static_cast<std::size_t>(cfg.range_idft_len), PaddedDft::Sign::kPositive);
      for (int t = next.fetch_add(1); t < s.trials; t = next.fetch_add(1)) {
        const std::uint64_t base = derive_seed(s.seed, point, static_cast<std::uint64_t>(t));
        const SymbolMatrix tx = generate_symbols(cfg, s.qam_order, mix64(base ^ 1));
        const SymbolMatrix rx = synthesize_echo(cfg, tx, echo, mix64(base ^ 2));
        const SymbolMatrix grid = divide(tx, rx, s.qam_order > 4);
        TrialRecord rec;
        for (int bin : velocity_bins(grid, dft)) {
          rec.velocity_correct += bin == true_v_bin;
          const double err = bin * cfg.velocity_bin_mps() - result.true_velocity_mps;
          rec.velocity_sq_err += err * err;
        }
        for (int bin : range_bins(grid, idft)) {
          rec.range_correct += bin == true_r_bin;
          const double err = bin * cfg.range_bin_m() - result.true_range_m;
          rec.range_sq_err += err * err;
        }
        records[static_cast<std::size_t>(t)] = rec;
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    RadarMcPoint out;
    out.gamma_db = s.gamma_db[point];
    out.gamma = gamma;
    double v_sq = 0.0;
    double r_sq = 0.0;
    for (const TrialRecord& rec : records) {  // fixed order keeps sums reproducible
      out.velocity_correct += rec.velocity_correct;
      out.range_correct += rec.range_correct;
      v_sq += rec.velocity_sq_err;
      r_sq += rec.range_sq_err;
    }
    out.velocity_lines = static_cast<long>(s.trials) * cfg.subcarriers;
    out.range_lines = static_cast<long>(s.trials) * cfg.symbols;
    out.rmse_velocity_mc = std::sqrt(v_sq / static_cast<double>(out.velocity_lines));
    out.rmse_range_mc = std::sqrt(r_sq / static_cast<double>(out.range_lines));
    out.rmse_velocity_theory = rmse_velocity_theory(result.true_velocity_mps, gamma, cfg.symbols);
    out.rmse_range_theory = rmse_range_theory(result.true_range_m, gamma, cfg.subcarriers);
    out.p_correct_velocity_theory = p_correct_bin(gamma, cfg.symbols);
    out.p_correct_range_theory = p_correct_bin(gamma, cfg.subcarriers);
    result.points.push_back(out);
  }
  return result;
}

}  // namespace sbs
