#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sbs/marcum.hpp"

using sbs::inv_marcum_q;
using sbs::marcum_q;

TEST_CASE("closed-form identities") {
  for (double a : {0.0, 0.3, 1.0, 4.0, 15.0, 60.0}) CHECK(marcum_q(a, 0.0) == 1.0);
  for (double b : {0.0, 0.1, 1.0, 2.5, 6.0, 12.0}) {
    CHECK(marcum_q(0.0, b) == doctest::Approx(std::exp(-0.5 * b * b)).epsilon(1e-13));
  }
}

TEST_CASE("frozen reference values") {
  // Non-central chi-square survival function, two degrees of freedom.
  CHECK(std::abs(marcum_q(1.0, 2.0) - 0.26901206003591) < 1e-12);
  CHECK(std::abs(marcum_q(1.0, 1.0) - 0.7328798037968203) < 1e-12);
  CHECK(std::abs(marcum_q(2.0, 3.0) - 0.21436208816264943) < 1e-12);
  CHECK(std::abs(marcum_q(0.5, 2.0) - 0.16914063850946723) < 1e-12);
  CHECK(std::abs(marcum_q(5.0, 4.0) - 0.8670497950779259) < 1e-12);
  CHECK(std::abs(marcum_q(10.0, 12.0) - 0.025329474297941492) < 1e-12);
  CHECK(std::abs(marcum_q(30.0, 28.0) - 0.9781653718649269) < 1e-12);
}

TEST_CASE("agrees with quadrature of the defining integral") {
  CHECK(std::abs(marcum_q(1.0, 2.0) - oracle::marcum_q_quadrature(1.0, 2.0)) < 1e-8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 25.0);
  for (int i = 0; i < 40; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(std::abs(marcum_q(a, b) - oracle::marcum_q_quadrature(a, b)) < 1e-9);
  }
}

TEST_CASE("monotone decreasing in b") {
  for (double a : {0.0, 1.0, std::sqrt(20.0), 10.0}) {
    double prev = 1.0;
    for (int i = 1; i <= 400; ++i) {
      const double q = marcum_q(a, 0.05 * i);
      CHECK(q <= prev + 1e-15);  // rounding noise where Q is 1 to double precision
      CHECK(q >= 0.0);
      prev = q;
    }
  }
}

TEST_CASE("inverse") {
  CHECK(inv_marcum_q(std::sqrt(20.0), 0.9) == doctest::Approx(3.321399375122788).epsilon(1e-9));
  CHECK(inv_marcum_q(2.0, 1.0 - 1e-12) < 1e-3);
  CHECK_THROWS_AS(inv_marcum_q(1.0, 0.0), sbs::DomainError);
  CHECK_THROWS_AS(inv_marcum_q(1.0, 1.0), sbs::DomainError);
  CHECK_THROWS_AS(inv_marcum_q(1.0, 1.5), sbs::DomainError);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ua(0.0, 20.0), uq(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 200; ++i) {
    const double a = ua(rng), q = uq(rng);
    CHECK(std::abs(marcum_q(a, inv_marcum_q(a, q)) - q) < 1e-9);
  }
}
