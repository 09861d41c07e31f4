#include "sketchlab/rangefinder.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sketchlab::rf {

BoundReport theoretical_error_bound(Index m, Index n, Index r, Index l, double kappa_B, BoundKind kind) {
  if (m < 1 || n < 1 || r < 1 || l < 1) throw InvalidArgument("theoretical_error_bound: sizes must be positive");
  if (r > n || l > n) throw InvalidArgument("theoretical_error_bound: need r <= n and l <= n");
  if (!(kappa_B >= 1.0)) throw InvalidArgument("theoretical_error_bound: kappa(B) must be >= 1");
  const Index p = l - r;
  if (p < 1) throw InvalidArgument("theoretical_error_bound: expectation undefined for p = l - r < 1");
  if (kind == BoundKind::Dual && m <= r) throw InvalidArgument("theoretical_error_bound: dual bound needs m > r");

  constexpr double e = std::numbers::e;
  const double dn = static_cast<double>(n), dl = static_cast<double>(l), dr = static_cast<double>(r);
  const double dp = static_cast<double>(p), dm = static_cast<double>(m);
  BoundReport b;
  b.m = m;
  b.n = n;
  b.r = r;
  b.l = l;
  b.p = p;
  b.kappa_B = kappa_B;
  b.expected_f = (1.0 + std::sqrt(dn) + std::sqrt(dl)) * (e / dp) * std::sqrt(8.0 * (dn - dr) * dr * dl);
  b.expected_f_dual = m > r ? e * e * std::sqrt(8.0 * (dn - dr) * dl) * kappa_B * dr / ((dm - dr) * dp)
                            : std::numeric_limits<double>::quiet_NaN();
  if (kind == BoundKind::Dual)
    b.note = "dual factor decreases like 1/(m - r); the error approaches sigma_{r+1}(M) as m grows";
  return b;
}

}  // namespace sketchlab::rf
