#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "sbs/fft.hpp"
#include "sbs/ofdm_isac.hpp"
#include "sbs/rng.hpp"

using namespace sbs;
using Complex = std::complex<double>;

namespace {

OfdmConfig small(int m = 64, int n = 128) { return OfdmConfig::unpadded(m, n, 90909.0, 24e9); }

}  // namespace

TEST_CASE("config") {
  const OfdmConfig cfg = small();
  CHECK(cfg.guard_s == doctest::Approx(cfg.elementary_symbol_s() / 8.0));
  CHECK(cfg.range_resolution_m() == doctest::Approx(kSpeedOfLight / (2.0 * cfg.bandwidth_hz())));
  CHECK(cfg.velocity_resolution_mps() ==
        doctest::Approx(kSpeedOfLight / (2.0 * cfg.symbol_duration_s() * cfg.symbols * cfg.carrier_hz)));
  OfdmConfig padded = cfg;
  padded.doppler_dft_len = 640;
  padded.range_idft_len = 1280;
  CHECK(padded.velocity_bin_mps() == doctest::Approx(cfg.velocity_resolution_mps() / 10.0));
  CHECK(padded.range_bin_m() == doctest::Approx(cfg.range_resolution_m() / 10.0));
  OfdmConfig bad = cfg;
  bad.doppler_dft_len = cfg.symbols - 1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("seed splitting") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("QAM symbols") {
  const OfdmConfig cfg = small();
  const SymbolMatrix s4 = generate_symbols(cfg, 4, 17);
  CHECK(s4.rows() == cfg.symbols);
  CHECK(s4.cols() == cfg.subcarriers);
  CHECK((s4.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(s4 == generate_symbols(cfg, 4, 17));
  CHECK(s4 != generate_symbols(cfg, 4, 18));
  CHECK_THROWS_AS(generate_symbols(cfg, 8, 1), DomainError);

  // 10^6 16-QAM draws: each of the 16 points within 3 sigma of n/16, and the
  // chi-square statistic below the 99.9% quantile for 15 dof (37.70).
  const OfdmConfig big = OfdmConfig::unpadded(1000, 1000, 90909.0, 24e9);
  const SymbolMatrix s16 = generate_symbols(big, 16, 99);
  std::map<std::pair<long, long>, long> counts;
  double power = 0.0;
  for (Eigen::Index i = 0; i < s16.size(); ++i) {
    const Complex z = s16.data()[i];
    power += std::norm(z);
    counts[std::make_pair(std::lround(z.real() * 1e6), std::lround(z.imag() * 1e6))]++;
  }
  REQUIRE(counts.size() == 16);
  const double n = static_cast<double>(s16.size());
  const double expect = n / 16.0;
  const double sigma = std::sqrt(n * (1.0 / 16.0) * (15.0 / 16.0));
  double chi2 = 0.0;
  for (const auto& [key, c] : counts) {
    CHECK(std::abs(c - expect) < 3.0 * sigma);
    chi2 += (c - expect) * (c - expect) / expect;
  }
  CHECK(chi2 < 37.70);
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.005));
}

TEST_CASE("echo synthesis") {
  const OfdmConfig cfg = small();
  const SymbolMatrix tx = generate_symbols(cfg, 4, 3);
  EchoModel still;
  CHECK(synthesize_echo(cfg, tx, still, 1) == tx);

  EchoModel moving{0.7, 123.0, 31.0, 0.0, 0.0};
  const SymbolMatrix rx = synthesize_echo(cfg, tx, moving, 1);
  CHECK((rx.cwiseAbs() - 0.7 * tx.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);

  // Noise plus clutter power 2 (sn^2 + si^2) over 10^6 samples.
  const OfdmConfig big = OfdmConfig::unpadded(1000, 1000, 90909.0, 24e9);
  const SymbolMatrix txb = generate_symbols(big, 4, 5);
  EchoModel noise{0.0, 0.0, 0.0, 0.3, 0.4};
  const SymbolMatrix rxb = synthesize_echo(big, txb, noise, 6);
  const double p = rxb.squaredNorm() / static_cast<double>(rxb.size());
  CHECK(p == doctest::Approx(2.0 * (0.09 + 0.16)).epsilon(0.02));
  CHECK(noise.sinr() == 0.0);
  const EchoModel at = EchoModel::at_sinr(0.5, 1.0, 2.0);
  CHECK(at.sinr() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at.noise_std == doctest::Approx(at.clutter_std));
}

TEST_CASE("division") {
  const OfdmConfig cfg = small();
  const SymbolMatrix tx = generate_symbols(cfg, 4, 3);
  CHECK((divide(tx, tx).array() - Complex(1.0, 0.0)).abs().maxCoeff() < 1e-15);

  const EchoModel echo{0.8, 77.0, -13.0, 0.0, 0.0};
  const SymbolMatrix rx = synthesize_echo(cfg, tx, echo, 2);
  const SymbolMatrix g = divide(tx, rx);
  // Rank-one structure: outer product of the Doppler column and range row.
  const SymbolMatrix ideal = ideal_division_grid(cfg, echo);
  CHECK((g - ideal).cwiseAbs().maxCoeff() < 1e-12);
  for (int m = 0; m < cfg.symbols; m += 7) {
    for (int n = 0; n < cfg.subcarriers; n += 11) {
      const Complex kv = std::polar(1.0, -4.0 * kPi * m * cfg.symbol_duration_s() * echo.velocity_mps *
                                             cfg.carrier_hz / kSpeedOfLight);
      const Complex kr = std::polar(1.0, -4.0 * kPi * n * cfg.subcarrier_spacing_hz * echo.range_m / kSpeedOfLight);
      CHECK(std::abs(g(m, n) - 0.8 * kv * kr) < 1e-12);
    }
  }
  CHECK((g.cwiseProduct(tx) - rx).cwiseAbs().maxCoeff() < 1e-14);

  SymbolMatrix zero = tx;
  zero(3, 4) = 0.0;
  CHECK_THROWS_AS(divide(zero, rx), DomainError);

  // Unit-modulus division keeps per-cell interference power for 16-QAM.
  const SymbolMatrix tx16 = generate_symbols(cfg, 16, 8);
  const SymbolMatrix um = divide(tx16, synthesize_echo(cfg, tx16, echo, 2), true);
  CHECK((um.cwiseAbs() - tx16.cwiseAbs() * 0.8).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unitary padded transform") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  std::vector<Complex> in(100), out(100), out_pad(1000);
  for (auto& z : in) z = {n01(rng), n01(rng)};
  double e_in = 0.0;
  for (auto z : in) e_in += std::norm(z);

  PaddedDft dft(100, PaddedDft::Sign::kPositive);
  dft.transform(in, out);
  double e_out = 0.0;
  for (auto z : out) e_out += std::norm(z);
  CHECK(e_out == doctest::Approx(e_in).epsilon(1e-9));

  // Direct sum for one bin.
  Complex direct = 0.0;
  for (int k = 0; k < 100; ++k) direct += in[k] * std::polar(1.0, 2.0 * kPi * k * 7 / 100.0);
  CHECK(std::abs(out[7] - direct / 10.0) < 1e-12);

  PaddedDft neg(100, PaddedDft::Sign::kNegative);
  std::vector<Complex> back(100);
  neg.transform(out, back);
  for (int k = 0; k < 100; ++k) CHECK(std::abs(back[k] - in[k]) < 1e-12);

  PaddedDft pad(1000, PaddedDft::Sign::kPositive);
  pad.transform(in, out_pad);
  for (int k = 0; k < 100; ++k) CHECK(std::abs(out_pad[10 * k] - out[k] * std::sqrt(100.0 / 1000.0)) < 1e-12);
}

TEST_CASE("noiseless on-grid recovery") {
  const OfdmConfig cfg = small();
  const SymbolMatrix tx = generate_symbols(cfg, 4, 1);

  const Estimate zero = estimate_target(divide(tx, synthesize_echo(cfg, tx, EchoModel{}, 1)), cfg);
  CHECK(zero.v_bin == 0);
  CHECK(zero.r_bin == 0);

  for (int k : {1, 5, 17, 40}) {
    const EchoModel echo{1.0, k * cfg.range_resolution_m(), k * cfg.velocity_resolution_mps(), 0.0, 0.0};
    const SymbolMatrix g = divide(tx, synthesize_echo(cfg, tx, echo, 1));
    const AxisEstimate v = estimate_velocity(g, cfg);
    const AxisEstimate r = estimate_range(g, cfg);
    REQUIRE(static_cast<int>(v.bins.size()) == cfg.subcarriers);
    REQUIRE(static_cast<int>(r.bins.size()) == cfg.symbols);
    for (int b : v.bins) CHECK(b == k);
    for (int b : r.bins) CHECK(b == k);
    CHECK(v.mode_bin == k);
    CHECK(r.mode_bin == k);
    CHECK(v.mean == doctest::Approx(k * cfg.velocity_bin_mps()));
    CHECK(r.mean == doctest::Approx(k * cfg.range_bin_m()));
  }

  // Padded transforms place an on-grid target at ratio * k.
  OfdmConfig padded = cfg;
  padded.doppler_dft_len = cfg.symbols * 4;
  padded.range_idft_len = cfg.subcarriers * 4;
  const EchoModel echo{1.0, 9 * cfg.range_resolution_m(), 3 * cfg.velocity_resolution_mps(), 0.0, 0.0};
  const Estimate e = estimate_target(divide(tx, synthesize_echo(padded, tx, echo, 1)), padded);
  CHECK(e.v_bin == 12);
  CHECK(e.r_bin == 36);
}

TEST_CASE("reference scene recovered at 0 dB") {
  OfdmConfig cfg = OfdmConfig::unpadded(256, 1024, 90909.0, 24e9);
  const double r = snap_range(cfg, 200.0);
  const double v = snap_velocity(cfg, 50.0);
  CHECK(std::abs(r - 200.0) <= cfg.range_resolution_m() / 2.0);
  CHECK(std::abs(v - 50.0) <= cfg.velocity_resolution_mps() / 2.0);
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const SymbolMatrix tx = generate_symbols(cfg, 4, derive_seed(42, 0, trial));
    const EchoModel echo = EchoModel::at_sinr(1.0, r, v);
    const SymbolMatrix rx = synthesize_echo(cfg, tx, echo, derive_seed(42, 1, trial));
    const Estimate e = estimate_target(divide(tx, rx), cfg);
    CHECK(std::abs(e.r_hat - r) <= cfg.range_bin_m());
    CHECK(std::abs(e.v_hat - v) <= cfg.velocity_bin_mps());
  }
}

TEST_CASE("theory formulas") {
  CHECK(p_correct_bin(0.0, 64) == 0.0);
  CHECK(p_correct_bin(1e6, 64) == 1.0);
  CHECK(p_correct_bin(std::log(2.0) / (4.0 * kPi * kPi), 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p_wrong_bin(0.0) == 1.0);
  CHECK(p_wrong_bin(1e6) == 0.0);
  for (double g : {0.001, 0.01, 0.05, 0.2}) {
    for (int l : {2, 16, 256}) {
      if (p_correct_bin(g, l) < 1e-300) continue;  // underflow
      CHECK(p_wrong_bin(g) == doctest::Approx(1.0 - std::pow(p_correct_bin(g, l), 1.0 / (l - 1))).epsilon(1e-9));
    }
  }
  CHECK(rmse_velocity_theory(50.0, 0.0, 256) == 50.0);
  CHECK(rmse_range_theory(200.0, 0.0, 1024) == 200.0);
  CHECK(rmse_velocity_theory(50.0, 1e6, 256) == 0.0);
  CHECK(rmse_range_theory(200.0, 1e6, 1024) == 0.0);

  double prev_p = 0.0, prev_v = 1e9, prev_r = 1e9;
  for (int i = 0; i <= 300; ++i) {
    const double g = db_to_linear(-30.0 + 0.1 * i);
    const double p = p_correct_bin(g, 256);
    CHECK(p >= prev_p);
    CHECK(p_correct_bin(g, 512) <= p);
    CHECK(rmse_velocity_theory(50.0, g, 256) <= prev_v);
    CHECK(rmse_range_theory(200.0, g, 1024) <= prev_r);
    prev_p = p;
    prev_v = rmse_velocity_theory(50.0, g, 256);
    prev_r = rmse_range_theory(200.0, g, 1024);
  }
}

TEST_CASE("Monte Carlo at 0 dB matches the correct-bin probability") {
  RadarMcSettings s;
  s.ofdm = OfdmConfig::unpadded(256, 4, 90909.0, 24e9);
  s.gamma_db = {0.0};
  s.trials = 5000;
  s.seed = 12;
  const RadarMcResult res = run_radar_monte_carlo(s);
  const RadarMcPoint& pt = res.points.at(0);
  const double p = pt.p_correct_velocity_theory;
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(pt.velocity_lines));
  CHECK(std::abs(pt.p_correct_velocity_mc() - p) <= 3.0 * sigma + 1e-12);
}

TEST_CASE("Monte Carlo is independent of thread count") {
  RadarMcSettings s;
  s.ofdm = OfdmConfig::unpadded(16, 32, 90909.0, 24e9);
  s.gamma_db = {-12.0, -6.0};
  s.trials = 50;
  s.seed = 77;
  s.threads = 1;
  const RadarMcResult a = run_radar_monte_carlo(s);
  s.threads = 4;
  const RadarMcResult b = run_radar_monte_carlo(s);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].velocity_correct == b.points[i].velocity_correct);
    CHECK(a.points[i].range_correct == b.points[i].range_correct);
    CHECK(a.points[i].rmse_velocity_mc == b.points[i].rmse_velocity_mc);
    CHECK(a.points[i].rmse_range_mc == b.points[i].rmse_range_mc);
  }
}
