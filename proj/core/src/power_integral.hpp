#pragma once

#include <cmath>
#include <stdexcept>

namespace burkholder::detail {

/// Integral of r^e over [lo, hi]; hi may be infinite and lo may be 0 when
/// the integral converges there.
inline double power_integral(double e, double lo, double hi) {
  if (lo == hi) return 0.0;
  if (e == -1.0) return std::log(hi / lo);
  const double e1 = e + 1.0;
  if ((std::isinf(hi) && e1 >= 0.0) || (lo == 0.0 && e1 <= 0.0)) {
    throw std::domain_error("divergent power integral");
  }
  const double top = std::isinf(hi) ? 0.0 : std::pow(hi, e1);
  const double bottom = lo == 0.0 ? 0.0 : std::pow(lo, e1);
  return (top - bottom) / e1;
}

}  // namespace burkholder::detail
