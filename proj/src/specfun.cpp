#include "conecalc/specfun.hpp"

#include <cmath>

namespace conecalc {

namespace {

// Lanczos coefficients, g = 7, n = 9 (Godfrey's values).
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2

double lanczos_sum(double x) {
    // x >= 1 here; series in 1/(x-1+k)
    double s = kLanczos[0];
    for (int k = 1; k < 9; ++k) s += kLanczos[k] / (x - 1.0 + k);
    return s;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
    if (x < 0.5) {
        // reflection keeps the Lanczos argument away from 0
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    const double t = x + kLanczosG - 0.5;
    return kHalfLog2Pi + (x - 0.5) * std::log(t) - t + std::log(lanczos_sum(x));
}

double gamma_fn(double x) {
    if (x > 0.0) {
        if (x > 171.6) return INFINITY;
        return std::exp(log_gamma(x));
    }
    if (x == std::floor(x)) throw std::domain_error("gamma_fn: pole at nonpositive integer");
    // Gamma(x) = pi / (sin(pi x) * Gamma(1 - x))
    return M_PI / (std::sin(M_PI * x) * std::exp(log_gamma(1.0 - x)));
}

}  // namespace conecalc
