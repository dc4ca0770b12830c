#include "sbs/marcum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "sbs/common.hpp"

namespace sbs {

namespace {

constexpr double kTailTolerance = 1e-16;

double log_poisson(long k, double mean) {
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

double marcum_q(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
    throw DomainError("Marcum Q arguments must be finite and non-negative");
  }
  if (b == 0.0) return 1.0;
  const double lambda = a * a / 2.0;
  const double x = b * b / 2.0;
  if (lambda == 0.0) return std::exp(-x);

  // Start a few standard deviations below the mixing-Poisson mode; the mass
  // skipped below k0 is under exp(-(k-lambda)^2 / (2 lambda)) ~ 1e-40.
  const double spread = 14.0 * std::sqrt(lambda) + 14.0;
  const long k0 = std::max(0L, static_cast<long>(std::floor(lambda - spread)));

  // cdf = P[Pois(x) <= k], advanced by one Poisson(x) term per step.
  double cdf = boost::math::gamma_q(static_cast<double>(k0) + 1.0, x);
  double sum = 0.0;
  for (long k = k0;; ++k) {
    if (k > k0) cdf = std::min(1.0, cdf + std::exp(log_poisson(k, x)));
    const double weight = std::exp(log_poisson(k, lambda));
    sum += weight * cdf;
    if (static_cast<double>(k) + 1.0 > lambda) {
      // Poisson tail beyond k is bounded by a geometric series with ratio
      // lambda / (k + 2).
      const double ratio = lambda / (static_cast<double>(k) + 2.0);
      const double tail = weight * ratio / (1.0 - ratio);
      if (tail < kTailTolerance) break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

double inv_marcum_q(double a, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("inverse Marcum Q needs 0 < q < 1");
  if (!std::isfinite(a) || a < 0.0) throw DomainError("Marcum Q first argument must be finite and >= 0");
  double lo = 0.0;
  double hi = a + 40.0;
  // Q is decreasing in b: Q(lo) >= q >= Q(hi).
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (marcum_q(a, mid) > q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace sbs
