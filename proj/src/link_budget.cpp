#include "sbs/link_budget.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace sbs {

namespace {

constexpr double kFourPi = 4.0 * kPi;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("radio parameter constraint violated: ") + what);
}

void require_distance(double x_m) {
  if (!(x_m > 0.0) || !std::isfinite(x_m)) throw DomainError("distance must be positive and finite");
}

// Scaled exponent of the squared Marcum argument: 2 (4pi)^2 xi_th (1+K) P_n F_n
// over rho P_t G_com g_pc lambda^2, to be multiplied by x^alpha.
double outage_scale(const RadioParams& p) {
  return 2.0 * kFourPi * kFourPi * p.snr_threshold * (1.0 + p.rician_k) * p.noise_power_w * p.noise_figure /
         (p.rho * p.transmit_power_w * p.g_com() * p.g_pc * p.wavelength_m * p.wavelength_m);
}

double log_bessel_i0(double z) {
  if (z < 700.0) return std::log(std::cyl_bessel_i(0.0, z));
  // Large-argument expansion; relative error below 1e-7 here.
  return z - 0.5 * std::log(2.0 * kPi * z) + std::log1p(1.0 / (8.0 * z) + 9.0 / (128.0 * z * z));
}

}  // namespace

RadioParams RadioParams::reference() {
  RadioParams p;
  p.transmit_power_w = dbm_to_watt(20.0);
  p.rho = 0.0;
  p.g_t = db_to_linear(20.0);
  p.g_rc = db_to_linear(6.0);
  p.g_rs = db_to_linear(20.0);
  p.g_pc = db_to_linear(10.0);
  p.g_ps = db_to_linear(54.2);
  p.wavelength_m = kSpeedOfLight / 24e9;
  p.path_loss_exp = 2.6;
  p.rician_k = 10.0;
  p.noise_power_w = dbm_to_watt(-94.0);
  p.noise_figure = db_to_linear(6.0);
  p.snr_threshold = db_to_linear(5.0);
  p.outage_threshold = 0.1;
  p.rcs_m2 = 0.1;
  p.clutter_power_w = dbm_to_watt(-90.0);
  p.min_sensing_sinr = db_to_linear(10.0);
  p.bandwidth_hz = 93.1e6;
  return p;
}

void RadioParams::validate() const {
  require(transmit_power_w > 0.0, "transmit power > 0");
  require(rho >= 0.0 && rho <= 1.0, "0 <= rho <= 1");
  require(g_t > 0.0 && g_rc > 0.0 && g_rs > 0.0 && g_pc > 0.0 && g_ps > 0.0, "beam and processing gains > 0");
  require(wavelength_m > 0.0, "wavelength > 0");
  require(path_loss_exp > 0.0, "path-loss exponent > 0");
  require(rician_k >= 0.0, "Rician K >= 0");
  require(noise_power_w > 0.0 && noise_figure > 0.0, "noise power and noise figure > 0");
  require(snr_threshold > 0.0, "SNR threshold > 0");
  require(outage_threshold > 0.0 && outage_threshold < 1.0, "0 < epsilon < 1");
  require(rcs_m2 > 0.0, "cross section > 0");
  require(clutter_power_w >= 0.0, "clutter power >= 0");
  require(min_sensing_sinr > 0.0, "minimum sensing SINR > 0");
  require(bandwidth_hz > 0.0, "bandwidth > 0");
}

double received_comm_power(const RadioParams& p, double x_m) {
  p.validate();
  require_distance(x_m);
  return p.rho * p.transmit_power_w * p.g_com() * p.g_pc * p.wavelength_m * p.wavelength_m /
         (kFourPi * kFourPi * std::pow(x_m, p.path_loss_exp));
}

double mean_comm_snr(const RadioParams& p, double x_m) {
  return received_comm_power(p, x_m) / (p.noise_power_w * p.noise_figure);
}

double rician_snr_pdf(const RadioParams& p, double x_m, double w) {
  if (!(w >= 0.0)) throw DomainError("SNR value must be >= 0");
  const double mean = mean_comm_snr(p, x_m);
  if (!(mean > 0.0)) throw DomainError("density undefined without communication power");
  const double k = p.rician_k;
  const double u = (k + 1.0) * w / mean;
  const double log_pdf = std::log((k + 1.0) / mean) - u - k + log_bessel_i0(2.0 * std::sqrt(k * u));
  return std::exp(log_pdf);
}

double outage_probability(const RadioParams& p, double x_m) {
  p.validate();
  require_distance(x_m);
  if (p.rho == 0.0) return 1.0;
  const double b = std::sqrt(outage_scale(p) * std::pow(x_m, p.path_loss_exp));
  return 1.0 - marcum_q(std::sqrt(2.0 * p.rician_k), b);
}

double success_probability(const RadioParams& p, double x_m) { return 1.0 - outage_probability(p, x_m); }

double max_comm_range(const RadioParams& p) {
  p.validate();
  if (p.rho == 0.0) throw DomainError("no communication range without communication power (rho = 0)");
  const double b = inv_marcum_q(std::sqrt(2.0 * p.rician_k), 1.0 - p.outage_threshold);
  return std::pow(b * b / outage_scale(p), 1.0 / p.path_loss_exp);
}

double outage_capacity(const RadioParams& p, double x_m) {
  return p.bandwidth_hz * std::log2(1.0 + p.snr_threshold) * success_probability(p, x_m);
}

namespace {
double sensing_numerator(const RadioParams& p) {
  return (1.0 - p.rho) * p.transmit_power_w * p.g_t * p.g_rs * p.g_ps * p.rcs_m2 * p.wavelength_m *
         p.wavelength_m;
}
double sensing_interference(const RadioParams& p) {
  return kFourPi * kFourPi * kFourPi * (p.noise_power_w * p.noise_figure + p.clutter_power_w);
}
}  // namespace

double max_sensing_range(const RadioParams& p) {
  p.validate();
  if (p.rho == 1.0) throw DomainError("no sensing range without sensing power (rho = 1)");
  return std::pow(sensing_numerator(p) / (sensing_interference(p) * p.min_sensing_sinr), 0.25);
}

double sensing_sinr(const RadioParams& p, double range_m) {
  p.validate();
  require_distance(range_m);
  return sensing_numerator(p) / (sensing_interference(p) * std::pow(range_m, 4));
}

std::optional<RangeCrossover> range_crossover(const RadioParams& p) {
  p.validate();
  auto gap = [&](double rho) {
    RadioParams q = p;
    q.rho = rho;
    return max_comm_range(q) - max_sensing_range(q);
  };
  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  if (!(gap(lo) < 0.0 && gap(hi) > 0.0)) return std::nullopt;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  RadioParams q = p;
  q.rho = 0.5 * (lo + hi);
  return RangeCrossover{q.rho, max_sensing_range(q)};
}

}  // namespace sbs
