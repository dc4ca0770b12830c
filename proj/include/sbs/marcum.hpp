#pragma once

namespace sbs {

/// First-order Marcum Q-function Q_1(a, b), absolute accuracy better than
/// 1e-10 for finite a, b >= 0.
///
/// Evaluated as the Poisson mixture
///   Q_1(a, b) = sum_k Pois(k; a^2/2) * P[Pois(b^2/2) <= k],
/// which has only non-negative terms. The sum runs outward from the Poisson
/// mode so it stays finite for large a; it stops once the remaining Poisson
/// mass (an upper bound on the tail, since each CDF factor is <= 1) drops
/// below 1e-16.
double marcum_q(double a, double b);

/// b such that Q_1(a, b) = q, by bisection on [0, a + 40]; |Q_1(a, b) - q| <= 1e-9.
/// Throws DomainError unless 0 < q < 1.
double inv_marcum_q(double a, double q);

}  // namespace sbs
