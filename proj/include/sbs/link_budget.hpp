#pragma once

#include <optional>

#include "sbs/common.hpp"
#include "sbs/marcum.hpp"

namespace sbs {

/// Link-budget scalars, all linear / SI. rho is the fraction of transmit
/// power given to communication; sensing gets (1 - rho).
struct RadioParams {
  double transmit_power_w = 0.1;
  double rho = 0.0;
  double g_t = 100.0;   // transmit beam gain
  double g_rc = 1.0;    // communication receive beam gain
  double g_rs = 1.0;    // sensing receive beam gain
  double g_pc = 1.0;    // communication processing gain
  double g_ps = 1.0;    // sensing processing gain
  double wavelength_m = kSpeedOfLight / 24e9;
  double path_loss_exp = 2.0;
  double rician_k = 10.0;
  double noise_power_w = 1e-12;
  double noise_figure = 1.0;
  double snr_threshold = 1.0;      // xi_th
  double outage_threshold = 0.1;   // epsilon
  double rcs_m2 = 0.1;
  double clutter_power_w = 0.0;    // P_I
  double min_sensing_sinr = 10.0;  // Gamma_min
  double bandwidth_hz = 93.1e6;

  double g_com() const { return g_t * g_rc; }

  /// Table III values with P_I = -90 dBm, xi_th = 5 dB and rho = 0.
  static RadioParams reference();

  /// Throws DomainError naming the first violated constraint.
  void validate() const;
};

/// Mean received communication power at distance x (unit mean fading).
double received_comm_power(const RadioParams& p, double x_m);

/// Average SNR at distance x: received power over P_n F_n.
double mean_comm_snr(const RadioParams& p, double x_m);

/// Rician density of the instantaneous SNR at distance x, evaluated at w >= 0.
double rician_snr_pdf(const RadioParams& p, double x_m, double w);

/// P[SNR < xi_th] at distance x. 1 when rho = 0.
double outage_probability(const RadioParams& p, double x_m);

double success_probability(const RadioParams& p, double x_m);

/// Distance at which outage_probability equals epsilon. Throws DomainError for rho = 0.
double max_comm_range(const RadioParams& p);

/// B log2(1 + xi_th) times the success probability.
double outage_capacity(const RadioParams& p, double x_m);

/// Radar-equation range at which the echo SINR falls to Gamma_min.
/// Throws DomainError for rho = 1.
double max_sensing_range(const RadioParams& p);

/// Echo SINR of the radar equation at range r (inverse of max_sensing_range).
double sensing_sinr(const RadioParams& p, double range_m);

struct RangeCrossover {
  double rho = 0.0;
  double range_m = 0.0;
};

/// Communication fraction at which max_comm_range == max_sensing_range,
/// by bisection on (0, 1). std::nullopt when the curves do not cross.
std::optional<RangeCrossover> range_crossover(const RadioParams& p);

}  // namespace sbs
