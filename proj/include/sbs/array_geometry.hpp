#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbs/common.hpp"

namespace sbs {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Beam or arrival direction. Azimuth `phi_deg` in [-180, 180), pitch
/// `theta_deg` in [0, 90] measured from the array normal (boresight).
struct Direction {
  double phi_deg = 0.0;
  double theta_deg = 0.0;

  /// Wraps azimuth into [-180, 180); throws DomainError for pitch outside [0, 90].
  static Direction normalized(double phi_deg, double theta_deg);

  friend bool operator==(const Direction&, const Direction&) = default;
};

/// Wraps an azimuth difference into [-180, 180).
double wrap_azimuth_deg(double deg);

/// Separation used for "same direction" tests: the larger of the wrapped
/// azimuth difference and the pitch difference, in degrees.
double direction_distance_deg(const Direction& a, const Direction& b);

/// Double circular uniform array. Layer 0 holds the single phase reference
/// element at the origin; layers 1..layers-1 each hold 2^log2_per_layer
/// elements on evenly spaced polar angles at radius m * spacing.
struct ArrayConfig {
  int layers = 17;
  int log2_per_layer = 4;
  double spacing_m = 0.0;
  double wavelength_m = 0.0;

  /// Half-wavelength spacing derived from the carrier frequency.
  static ArrayConfig from_carrier(int layers, int log2_per_layer, double carrier_hz);

  int per_layer() const { return 1 << log2_per_layer; }
  int element_count() const { return (layers - 1) * per_layer() + 1; }
  double polar_pitch_rad() const { return 2.0 * kPi / per_layer(); }
  double polar_pitch_deg() const { return 360.0 / per_layer(); }

  /// Flat index of element (m, n) in steering/weight vectors (layer-major).
  int flat_index(int m, int n) const;

  /// Throws DomainError unless layers >= 1, log2_per_layer >= 1, spacing and
  /// wavelength positive.
  void validate() const;
};

struct SpacingReport {
  bool valid = false;
  std::string diagnostic;
};

/// Planar offset [x, y] of element n on layer m from the reference element.
Eigen::Vector2d element_position(const ArrayConfig& cfg, int m, int n);

/// Far-field phase of element (m, n) relative to the reference element for a
/// plane wave from `dir`: exp(-j 2pi/lambda q^T v).
Complex phase_term(const ArrayConfig& cfg, int m, int n, const Direction& dir);

/// Length-N_t steering vector, entry 0 is exactly 1.
CVector steering_vector(const ArrayConfig& cfg, const Direction& dir);

/// N_t x dirs.size() matrix whose i-th column is steering_vector(dirs[i]).
CMatrix steering_matrix(const ArrayConfig& cfg, std::span<const Direction> dirs);

/// Phase-ambiguity check: d <= lambda/2 and 2 d sin(pitch/2) <= lambda/2.
SpacingReport validate_spacing(const ArrayConfig& cfg);

}  // namespace sbs
