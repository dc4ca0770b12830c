#include "sbs/scanning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sbs {

void SceneGeometry::validate() const {
  if (!(height_m > 0.0) || !(road_width_m > 0.0) || !(max_sensing_range_m > 0.0) || !(dwell_s > 0.0)) {
    throw DomainError("scene height, road width, sensing range and dwell must be positive");
  }
}

namespace {

// cos/sin of an angle in degrees, exact at multiples of 90 so that footprint
// centres on the axes land exactly on the road-strip boundaries.
void cos_sin_deg(double deg, double& c, double& s) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r == 0.0) { c = 1.0; s = 0.0; return; }
  if (r == 90.0) { c = 0.0; s = 1.0; return; }
  if (r == 180.0) { c = -1.0; s = 0.0; return; }
  if (r == 270.0) { c = 0.0; s = -1.0; return; }
  c = std::cos(deg_to_rad(r));
  s = std::sin(deg_to_rad(r));
}

}  // namespace

Footprint footprint(const SceneGeometry& geom, const Direction& beam_dir, const BeamWidths& widths) {
  geom.validate();
  if (!(beam_dir.theta_deg > 0.0 && beam_dir.theta_deg < 90.0)) {
    throw DomainError("footprint needs a pitch strictly between 0 and 90 deg");
  }
  const double theta = deg_to_rad(beam_dir.theta_deg);
  const double reach = geom.height_m * std::tan(theta);
  const double cos_t = std::cos(theta);
  double cos_p = 0.0;
  double sin_p = 0.0;
  cos_sin_deg(beam_dir.phi_deg, cos_p, sin_p);
  Footprint fp;
  fp.x0_m = reach * cos_p;
  fp.y0_m = reach * sin_p;
  fp.semi_major_m = geom.height_m * deg_to_rad(widths.theta_deg) / (cos_t * cos_t);
  fp.semi_minor_m = geom.height_m * std::tan(deg_to_rad(widths.phi_deg)) / (2.0 * cos_t);
  return fp;
}

bool in_road_region(const SceneGeometry& geom, double x_m, double y_m) {
  const bool on_road = (x_m >= 0.0 && x_m <= geom.road_width_m) || (y_m >= -geom.road_width_m && y_m <= 0.0);
  const double r2 = x_m * x_m + y_m * y_m + geom.height_m * geom.height_m;
  return on_road && r2 <= geom.max_sensing_range_m * geom.max_sensing_range_m;
}

bool dcb_occupies(const Direction& dir, std::span<const Direction> dcb_dirs, const BeamWidths& widths) {
  const double radius = std::max(widths.theta_deg, widths.phi_deg) / 2.0;
  return std::any_of(dcb_dirs.begin(), dcb_dirs.end(),
                     [&](const Direction& d) { return direction_distance_deg(dir, d) <= radius + 1e-12; });
}

ScanResult scanning_period(const SceneGeometry& geom, const BeamWidths& widths, std::span<const Direction> dcb_dirs,
                           long iteration_cap) {
  geom.validate();
  if (!(widths.theta_deg > 0.0) || !(widths.phi_deg > 0.0)) throw DomainError("beam widths must be positive");

  const double h2 = geom.height_m * geom.height_m;
  const double r2 = geom.max_sensing_range_m * geom.max_sensing_range_m;
  // Squared centre distance from the SBS; the horizon counts as outside.
  auto slant2 = [&](double theta_deg) {
    if (theta_deg >= 90.0) return std::numeric_limits<double>::infinity();
    const double reach = geom.height_m * std::tan(deg_to_rad(theta_deg));
    return reach * reach + h2;
  };

  ScanResult out;
  double phi = 0.0;
  double theta = widths.theta_deg;
  while (slant2(theta) <= r2) {
    if (++out.iterations > iteration_cap) {
      std::ostringstream os;
      os << "scan exceeded the iteration cap of " << iteration_cap << " steps for widths (" << widths.theta_deg
         << ", " << widths.phi_deg << ") deg";
      throw DomainError(os.str());
    }
    phi += widths.phi_deg;
    if (phi >= 360.0) {
      theta += widths.theta_deg;
      phi -= 360.0;
    }
    if (theta >= 90.0) break;
    const double reach = geom.height_m * std::tan(deg_to_rad(theta));
    const double x0 = reach * std::cos(deg_to_rad(phi));
    const double y0 = reach * std::sin(deg_to_rad(phi));
    if (!in_road_region(geom, x0, y0)) continue;
    const Direction dir{wrap_azimuth_deg(phi), theta};
    const bool blocked = dcb_occupies(dir, dcb_dirs, widths);
    out.cells.push_back({phi, theta, x0, y0, blocked});
    if (!blocked) ++out.dwells;
  }
  out.period_s = static_cast<double>(out.dwells) * geom.dwell_s;
  return out;
}

}  // namespace sbs
