#pragma once

#include <cmath>
#include <stdexcept>

namespace conecalc {

/// Natural log of Gamma(x) for x > 0, Lanczos approximation (g=7, n=9).
/// Relative accuracy is better than 1e-13 over the positive axis.
double log_gamma(double x);

/// Gamma(x) for real x, poles excluded. Negative non-integer arguments
/// go through the reflection formula.
double gamma_fn(double x);

/// 1 - exp(-u) without cancellation, exact limits at 0 and +inf.
inline double one_minus_exp(double u) {
    if (u < 1e-4) {
        // u - u^2/2 + u^3/6 - u^4/24, error below 1e-21 relative
        return u * (1.0 - u * (0.5 - u * (1.0 / 6.0 - u / 24.0)));
    }
    return -std::expm1(-u);
}

/// exp(-u) - 1 + u, the compensated branching kernel, cancellation-safe.
inline double compensated_exp(double u) {
    if (u < 1e-4) {
        // u^2/2 - u^3/6 + u^4/24 - u^5/120
        return u * u * (0.5 - u * (1.0 / 6.0 - u * (1.0 / 24.0 - u / 120.0)));
    }
    return std::expm1(-u) + u;
}

}  // namespace conecalc
