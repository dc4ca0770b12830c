#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "sbs/link_budget.hpp"
#include "sbs/marcum.hpp"

using namespace sbs;

namespace {

RadioParams at_rho(double rho) {
  RadioParams p = RadioParams::reference();
  p.rho = rho;
  return p;
}

// Integral of the SNR density over [lo, hi], split into panels.
double integrate_pdf(const RadioParams& p, double x, double lo, double hi, int panels = 16) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double sum = 0.0;
  const double h = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i) {
    sum += GK::integrate([&](double w) { return rician_snr_pdf(p, x, w); }, lo + i * h, lo + (i + 1) * h, 8,
                         1e-10);
  }
  return sum;
}

}  // namespace

TEST_CASE("reference parameters") {
  const RadioParams p = RadioParams::reference();
  CHECK(p.transmit_power_w == doctest::Approx(0.1));
  CHECK(p.g_com() == doctest::Approx(std::pow(10.0, 2.6)));
  CHECK(p.clutter_power_w == doctest::Approx(1e-12));
  CHECK(p.snr_threshold == doctest::Approx(std::pow(10.0, 0.5)));
  CHECK_NOTHROW(p.validate());
  RadioParams bad = p;
  bad.rho = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.outage_threshold = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("received communication power") {
  const RadioParams p = at_rho(1.0);
  CHECK(received_comm_power(p, 100.0) == doctest::Approx(2.4819852394471488e-09).epsilon(1e-12));
  RadioParams sq = p;
  sq.path_loss_exp = 2.0;
  CHECK(received_comm_power(sq, 200.0) == doctest::Approx(received_comm_power(sq, 100.0) / 4.0).epsilon(1e-14));
  CHECK(received_comm_power(at_rho(0.0), 50.0) == 0.0);
  CHECK_THROWS_AS(received_comm_power(p, 0.0), DomainError);
  CHECK(mean_comm_snr(p, 100.0) == doctest::Approx(1566.0268157206108).epsilon(1e-12));
}

TEST_CASE("outage and success") {
  const RadioParams p = at_rho(0.25);
  CHECK(outage_probability(p, 300.0) == doctest::Approx(0.0019257660612658212).epsilon(1e-8));
  CHECK(outage_probability(at_rho(1.0), 800.0) == doctest::Approx(0.07215385186951562).epsilon(1e-8));
  CHECK(outage_probability(p, 1e-3) < 1e-12);
  CHECK(outage_probability(p, 1e6) == doctest::Approx(1.0));
  CHECK(outage_probability(at_rho(0.0), 10.0) == 1.0);
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = 2.0 * i;
    const double o = outage_probability(p, x);
    CHECK(o >= prev);
    CHECK(success_probability(p, x) == 1.0 - o);
    prev = o;
  }
}

TEST_CASE("max communication range") {
  const RadioParams p = at_rho(1.0);
  const double r = max_comm_range(p);
  CHECK(r == doctest::Approx(833.9903843551756).epsilon(1e-8));
  CHECK(outage_probability(p, r) == doctest::Approx(p.outage_threshold).epsilon(1e-6));
  RadioParams scaled = p;
  scaled.transmit_power_w *= std::pow(2.0, p.path_loss_exp);
  CHECK(max_comm_range(scaled) == doctest::Approx(2.0 * r).epsilon(1e-9));
  CHECK_THROWS_AS(max_comm_range(at_rho(0.0)), DomainError);
}

TEST_CASE("max sensing range") {
  const RadioParams p = at_rho(0.0);
  const double r = max_sensing_range(p);
  CHECK(r == doctest::Approx(531.8469608640038).epsilon(1e-12));
  CHECK(sensing_sinr(p, r) == doctest::Approx(p.min_sensing_sinr).epsilon(1e-9));
  RadioParams scaled = p;
  scaled.rcs_m2 *= 16.0;
  CHECK(max_sensing_range(scaled) == doctest::Approx(2.0 * r).epsilon(1e-12));
  double prev = 1e9;
  for (double pi_dbm = -120.0; pi_dbm <= -60.0; pi_dbm += 1.0) {
    RadioParams q = p;
    q.clutter_power_w = dbm_to_watt(pi_dbm);
    const double rr = max_sensing_range(q);
    CHECK(rr < prev);
    prev = rr;
  }
  CHECK_THROWS_AS(max_sensing_range(at_rho(1.0)), DomainError);
}

TEST_CASE("range crossover") {
  const auto c = range_crossover(RadioParams::reference());
  REQUIRE(c.has_value());
  CHECK(c->rho == doctest::Approx(0.25614893428681407).epsilon(1e-8));
  CHECK(c->range_m == doctest::Approx(493.9217823058642).epsilon(1e-8));

  // Comm range increasing, sensing range decreasing in rho.
  double rc = 0.0, rs = 1e9;
  for (int i = 1; i < 100; ++i) {
    const RadioParams p = at_rho(0.01 * i);
    CHECK(max_comm_range(p) > rc);
    CHECK(max_sensing_range(p) < rs);
    rc = max_comm_range(p);
    rs = max_sensing_range(p);
  }

  // Constructed so the two ranges coincide at rho = 0.5: pick the sensing
  // processing gain that makes R_s(0.5) equal R_c(0.5).
  RadioParams sym = at_rho(0.5);
  const double target = max_comm_range(sym);
  const double ratio = std::pow(target / max_sensing_range(sym), 4.0);
  sym.g_ps *= ratio;
  const auto c2 = range_crossover(sym);
  REQUIRE(c2.has_value());
  CHECK(c2->rho == doctest::Approx(0.5).epsilon(1e-9));

  // Comm range vanishes at rho -> 0 and sensing range at rho -> 1, so a
  // crossing exists for any valid parameters; a huge sensing gain pushes it
  // towards rho = 1.
  RadioParams far = RadioParams::reference();
  far.g_ps *= 1e12;
  const auto c3 = range_crossover(far);
  REQUIRE(c3.has_value());
  CHECK(c3->rho > 0.99);
}

TEST_CASE("outage capacity") {
  const RadioParams p = at_rho(0.25);
  const double ceiling = p.bandwidth_hz * std::log2(1.0 + p.snr_threshold);
  CHECK(ceiling == doctest::Approx(191541445.72129261).epsilon(1e-12));
  CHECK(outage_capacity(p, 1e-3) == doctest::Approx(ceiling).epsilon(1e-12));
  double prev = ceiling;
  for (int i = 1; i <= 1000; ++i) {
    const double c = outage_capacity(p, i);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("rician density") {
  const RadioParams p = at_rho(0.25);
  for (double x : {50.0, 200.0, 600.0}) {
    const double mean = mean_comm_snr(p, x);
    const double hi = mean * 8.0;
    CHECK(integrate_pdf(p, x, 0.0, hi) == doctest::Approx(1.0).epsilon(1e-4));
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double m1 = 0.0;
    for (int i = 0; i < 64; ++i) {
      m1 += GK::integrate([&](double w) { return w * rician_snr_pdf(p, x, w); }, hi * i / 64, hi * (i + 1) / 64, 8,
                          1e-10);
    }
    CHECK(m1 == doctest::Approx(mean).epsilon(1e-3));
  }
  // Rayleigh limit.
  RadioParams ray = p;
  ray.rician_k = 0.0;
  const double mean = mean_comm_snr(ray, 100.0);
  for (double w : {0.0, 0.5 * mean, mean, 3.0 * mean}) {
    CHECK(rician_snr_pdf(ray, 100.0, w) == doctest::Approx(std::exp(-w / mean) / mean).epsilon(1e-12));
  }
  // Large K stays finite.
  RadioParams big = p;
  big.rician_k = 5000.0;
  const double mb = mean_comm_snr(big, 100.0);
  CHECK(std::isfinite(rician_snr_pdf(big, 100.0, mb)));
  CHECK(rician_snr_pdf(big, 100.0, mb) > 0.0);
}

TEST_CASE("outage equals the integrated density") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(20.0, 1200.0), urho(0.05, 1.0), uk(0.0, 20.0), uxi(0.0, 10.0);
  for (int i = 0; i < 20; ++i) {
    RadioParams p = RadioParams::reference();
    p.rho = urho(rng);
    p.rician_k = uk(rng);
    p.snr_threshold = db_to_linear(uxi(rng));
    const double x = ux(rng);
    const double integral = integrate_pdf(p, x, 0.0, p.snr_threshold);
    CHECK(std::abs(integral - outage_probability(p, x)) < 1e-4);
  }
}
