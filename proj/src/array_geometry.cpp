#include "sbs/array_geometry.hpp"

#include <algorithm>
#include <sstream>

namespace sbs {

Direction Direction::normalized(double phi_deg, double theta_deg) {
  if (!std::isfinite(phi_deg) || !std::isfinite(theta_deg)) {
    throw DomainError("direction angles must be finite");
  }
  if (theta_deg < 0.0 || theta_deg > 90.0) {
    std::ostringstream os;
    os << "pitch angle " << theta_deg << " deg outside [0, 90]";
    throw DomainError(os.str());
  }
  return Direction{wrap_azimuth_deg(phi_deg), theta_deg};
}

double wrap_azimuth_deg(double deg) {
  double wrapped = std::fmod(deg + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  wrapped -= 180.0;
  // fmod can land exactly on +180 after the shift for tiny negative inputs
  if (wrapped >= 180.0) wrapped -= 360.0;
  return wrapped;
}

double direction_distance_deg(const Direction& a, const Direction& b) {
  // Azimuth is degenerate at the pole.
  const double dphi = (a.theta_deg == 0.0 && b.theta_deg == 0.0)
                          ? 0.0
                          : std::abs(wrap_azimuth_deg(a.phi_deg - b.phi_deg));
  return std::max(dphi, std::abs(a.theta_deg - b.theta_deg));
}

ArrayConfig ArrayConfig::from_carrier(int layers, int log2_per_layer, double carrier_hz) {
  if (!(carrier_hz > 0.0)) throw DomainError("carrier frequency must be positive");
  const double lambda = kSpeedOfLight / carrier_hz;
  ArrayConfig cfg{layers, log2_per_layer, lambda / 2.0, lambda};
  cfg.validate();
  return cfg;
}

int ArrayConfig::flat_index(int m, int n) const {
  if (m < 0 || m >= layers) throw DomainError("layer index out of range");
  if (m == 0) {
    if (n != 0) throw DomainError("layer 0 holds only element 0");
    return 0;
  }
  if (n < 0 || n >= per_layer()) throw DomainError("element index out of range");
  return 1 + (m - 1) * per_layer() + n;
}

void ArrayConfig::validate() const {
  if (layers < 1) throw DomainError("array needs at least one layer");
  if (log2_per_layer < 1 || log2_per_layer > 20) {
    throw DomainError("log2 elements per layer must be in [1, 20]");
  }
  if (!(spacing_m > 0.0)) throw DomainError("element spacing must be positive");
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
}

Eigen::Vector2d element_position(const ArrayConfig& cfg, int m, int n) {
  cfg.flat_index(m, n);  // range check
  const double psi = n * cfg.polar_pitch_rad();
  const double radius = m * cfg.spacing_m;
  return {std::cos(psi) * radius, std::sin(psi) * radius};
}

namespace {

Eigen::Vector2d polar_mapping(const Direction& dir) {
  const double phi = deg_to_rad(dir.phi_deg);
  const double theta = deg_to_rad(dir.theta_deg);
  return {std::cos(phi) * std::sin(theta), std::sin(phi) * std::sin(theta)};
}

}  // namespace

Complex phase_term(const ArrayConfig& cfg, int m, int n, const Direction& dir) {
  const Eigen::Vector2d q = element_position(cfg, m, n);
  const double arg = -2.0 * kPi / cfg.wavelength_m * q.dot(polar_mapping(dir));
  return std::polar(1.0, arg);
}

CVector steering_vector(const ArrayConfig& cfg, const Direction& dir) {
  cfg.validate();
  CVector a(cfg.element_count());
  a(0) = Complex(1.0, 0.0);
  const Eigen::Vector2d v = polar_mapping(dir);
  const double k = 2.0 * kPi / cfg.wavelength_m;
  const int per_layer = cfg.per_layer();
  for (int m = 1; m < cfg.layers; ++m) {
    const double radius = m * cfg.spacing_m;
    for (int n = 0; n < per_layer; ++n) {
      const double psi = n * cfg.polar_pitch_rad();
      const double proj = radius * (std::cos(psi) * v.x() + std::sin(psi) * v.y());
      a(1 + (m - 1) * per_layer + n) = std::polar(1.0, -k * proj);
    }
  }
  return a;
}

CMatrix steering_matrix(const ArrayConfig& cfg, std::span<const Direction> dirs) {
  if (dirs.empty()) throw DomainError("steering matrix needs at least one direction");
  CMatrix d(cfg.element_count(), static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    d.col(static_cast<Eigen::Index>(i)) = steering_vector(cfg, dirs[i]);
  }
  return d;
}

SpacingReport validate_spacing(const ArrayConfig& cfg) {
  cfg.validate();
  const double half_lambda = cfg.wavelength_m / 2.0;
  const double chord = 2.0 * cfg.spacing_m * std::sin(cfg.polar_pitch_rad() / 2.0);
  std::ostringstream os;
  bool ok = true;
  if (cfg.spacing_m > half_lambda) {
    ok = false;
    os << "layer spacing " << cfg.spacing_m << " m exceeds lambda/2 = " << half_lambda << " m";
  }
  if (chord > half_lambda) {
    if (!ok) os << "; ";
    ok = false;
    os << "in-layer chord 2d sin(pitch/2) = " << chord << " m exceeds lambda/2 = " << half_lambda
       << " m";
  }
  if (ok) os << "spacing free of phase ambiguity";
  return {ok, os.str()};
}

}  // namespace sbs
