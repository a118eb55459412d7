#pragma once

#include <cmath>

namespace sprt {

inline double phi_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014326779;
}

// erfc-based cdf/sf keep full relative accuracy in the tails; the naive
// 1 - cdf(z) form loses everything past z ~ 8.
inline double phi_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }
inline double phi_sf(double z) { return 0.5 * std::erfc(z * M_SQRT1_2); }

// P(a <= Z <= b) for standard normal Z, accurate when [a,b] sits far out in
// either tail: same-tail values are subtracted, never 1-and-something.
inline double phi_interval(double a, double b) {
  if (a >= b) return 0.0;
  if (a >= 0.0) return phi_sf(a) - phi_sf(b);
  return phi_cdf(b) - phi_cdf(a);
}

}  // namespace sprt
