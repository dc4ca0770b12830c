#pragma once

#include <span>
#include <vector>

#include "sbs/array_geometry.hpp"

namespace sbs {

struct SceneGeometry {
  double height_m = 10.0;
  double road_width_m = 20.0;
  double max_sensing_range_m = 500.0;
  double dwell_s = 0.010;

  void validate() const;
};

/// FDB half-power widths in degrees.
struct BeamWidths {
  double theta_deg = 2.0;
  double phi_deg = 3.0;
};

/// Elliptical road footprint of one FDB dwell.
struct Footprint {
  double x0_m = 0.0;
  double y0_m = 0.0;
  double semi_major_m = 0.0;
  double semi_minor_m = 0.0;
};

/// Footprint centre (h tan(theta) cos(phi), h tan(theta) sin(phi)); semi-major
/// h dtheta / cos^2(theta) (small-angle form) and semi-minor
/// h tan(dphi) / (2 cos(theta)). Throws DomainError for theta outside (0, 90).
Footprint footprint(const SceneGeometry& geom, const Direction& beam_dir, const BeamWidths& widths);

/// Cross-traffic road region: inside either road strip (0 <= x <= W or
/// -W <= y <= 0) and within the sensing sphere.
bool in_road_region(const SceneGeometry& geom, double x_m, double y_m);

/// True when some DCB lies within max(dtheta, dphi)/2 of `dir`.
bool dcb_occupies(const Direction& dir, std::span<const Direction> dcb_dirs, const BeamWidths& widths);

/// One FDB dwell position whose footprint centre fell inside the road region.
struct ScanCell {
  double phi_deg = 0.0;    // [0, 360) as the scan advances
  double theta_deg = 0.0;
  double x0_m = 0.0;
  double y0_m = 0.0;
  bool dcb_blocked = false;  // skipped because a DCB points there
};

struct ScanResult {
  long dwells = 0;
  double period_s = 0.0;  // dwells * dwell_s
  long iterations = 0;
  std::vector<ScanCell> cells;
};

inline constexpr long kDefaultScanIterationCap = 50'000'000;

/// Raster scan of the FDB: azimuth advances by dphi, wrapping past 360 deg
/// with pitch += dtheta, starting from (0, dtheta). A dwell is counted when
/// the footprint centre is in the road region and no DCB occupies the
/// direction. Runs while the centre stays within the sensing sphere.
/// Throws DomainError if the loop exceeds `iteration_cap`.
ScanResult scanning_period(const SceneGeometry& geom, const BeamWidths& widths, std::span<const Direction> dcb_dirs,
                           long iteration_cap = kDefaultScanIterationCap);

}  // namespace sbs
