#pragma once

#include <cmath>

namespace occ {

/// Standard normal CDF. Evaluated through erfc in extended precision so the
/// result is accurate to well below 1e-10 over the whole real line.
inline double normal_cdf(double x) {
    const long double inv_sqrt2 = 0.70710678118654752440L;
    return static_cast<double>(0.5L * erfcl(-static_cast<long double>(x) * inv_sqrt2));
}

}  // namespace occ
