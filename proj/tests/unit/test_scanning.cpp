#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sbs/link_budget.hpp"
#include "sbs/scanning.hpp"

using namespace sbs;

namespace {

SceneGeometry scene(double r = 500.0) { return SceneGeometry{10.0, 20.0, r, 0.010}; }

long dwells_in_ticks(const ScanResult& r, double tau) { return std::lround(r.period_s / tau); }

}  // namespace

TEST_CASE("footprint") {
  const SceneGeometry g = scene();
  const Footprint near = footprint(g, {30.0, 0.5}, {2.0, 3.0});
  CHECK(std::hypot(near.x0_m, near.y0_m) < 0.1);
  const Footprint side = footprint(g, {90.0, 30.0}, {2.0, 3.0});
  CHECK(side.x0_m == 0.0);
  CHECK(side.y0_m == doctest::Approx(10.0 * std::tan(deg_to_rad(30.0))));

  // h = 10, theta = 45, (2, 3) deg: centre (10, 0); semi-major
  // 10 * 0.0349066 / 0.5; semi-minor 10 * tan(3 deg) / (2 * 0.7071068).
  const Footprint f = footprint(g, {0.0, 45.0}, {2.0, 3.0});
  CHECK(f.x0_m == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(std::abs(f.y0_m) < 1e-12);
  CHECK(f.semi_major_m == doctest::Approx(0.6981317007977318).epsilon(1e-12));
  CHECK(f.semi_minor_m == doctest::Approx(0.370578961179663).epsilon(1e-12));
  CHECK(f.semi_major_m >= f.semi_minor_m);

  CHECK_THROWS_AS(footprint(g, {0.0, 90.0}, {2.0, 3.0}), DomainError);
  CHECK_THROWS_AS(footprint(g, {0.0, 0.0}, {2.0, 3.0}), DomainError);
}

TEST_CASE("road region") {
  const SceneGeometry g = scene();
  CHECK(in_road_region(g, 0.0, 0.0));
  CHECK(in_road_region(g, 15.0, 300.0));
  CHECK(in_road_region(g, -300.0, -15.0));
  CHECK_FALSE(in_road_region(g, 21.0, 1.0));
  CHECK_FALSE(in_road_region(g, -5.0, 5.0));
  CHECK_FALSE(in_road_region(g, 10.0, 499.99));
}

TEST_CASE("period is a whole number of dwells") {
  const std::vector<Direction> none;
  for (BeamWidths w : {BeamWidths{2.0, 3.0}, BeamWidths{4.0, 6.0}, BeamWidths{1.0, 1.0}, BeamWidths{3.3, 7.1}}) {
    const ScanResult r = scanning_period(scene(), w, none);
    CHECK(r.dwells > 0);
    CHECK(r.period_s == doctest::Approx(r.dwells * 0.010).epsilon(1e-15));
    CHECK(std::abs(r.period_s / 0.010 - std::round(r.period_s / 0.010)) < 1e-9);
    long counted = 0;
    for (const auto& c : r.cells) counted += c.dcb_blocked ? 0 : 1;
    CHECK(counted == r.dwells);
  }
}

TEST_CASE("wider beams scan faster") {
  const std::vector<Direction> none;
  CHECK(scanning_period(scene(), {4.0, 6.0}, none).period_s <= scanning_period(scene(), {2.0, 3.0}, none).period_s);
  double prev = 1e18;
  for (double w = 0.5; w <= 8.0; w *= 2.0) {
    const double t = scanning_period(scene(), {w, 1.5 * w}, none).period_s;
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("period is weakly decreasing in rho") {
  const std::vector<Direction> none;
  RadioParams p = RadioParams::reference();
  double prev = 1e18;
  for (int i = 0; i < 10; ++i) {
    p.rho = 0.1 * i;
    SceneGeometry g = scene(max_sensing_range(p));
    const double t = scanning_period(g, {2.0, 3.0}, none).period_s;
    CHECK(t <= prev);
    prev = t;
  }
  // A short sensing range cuts the scan.
  CHECK(scanning_period(scene(30.0), {2.0, 3.0}, none).period_s <
        scanning_period(scene(500.0), {2.0, 3.0}, none).period_s);
}

TEST_CASE("a DCB removes exactly one dwell") {
  const std::vector<Direction> none;
  const ScanResult base = scanning_period(scene(), {2.0, 3.0}, none);
  // Pick a counted cell and park a DCB on it.
  const ScanCell& target = base.cells.at(base.cells.size() / 2);
  const std::vector<Direction> one{Direction::normalized(target.phi_deg, target.theta_deg)};
  const ScanResult blocked = scanning_period(scene(), {2.0, 3.0}, one);
  CHECK(dwells_in_ticks(blocked, 0.010) == dwells_in_ticks(base, 0.010) - 1);
  CHECK(dcb_occupies(one[0], one, {2.0, 3.0}));
  CHECK_FALSE(dcb_occupies(Direction::normalized(target.phi_deg + 3.0, target.theta_deg), one, {2.0, 3.0}));
}

TEST_CASE("termination and cap") {
  const std::vector<Direction> none;
  CHECK_NOTHROW(scanning_period(scene(), {0.1, 0.1}, none));
  CHECK_THROWS_AS(scanning_period(scene(), {0.1, 0.1}, none, 1000), DomainError);
  CHECK_THROWS_AS(scanning_period(scene(), {0.0, 3.0}, none), DomainError);
}
