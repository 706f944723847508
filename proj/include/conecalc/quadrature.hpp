#pragma once

#include <functional>

namespace conecalc {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

/// One 15-point Gauss-Kronrod panel on [a, b]; error from the embedded
/// 7-point Gauss rule.
QuadResult gk15_panel(const std::function<double(double)>& f, double a, double b);

/// Adaptive Gauss-Kronrod on the finite interval [a, b]: bisect the worst
/// panel until the summed error estimate meets rel_tol (floored by abs_tol).
/// Throws std::runtime_error if the subdivision budget is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-9, double abs_tol = 1e-14,
                              int max_panels = 4000);

/// Integral over (0, inf) by adaptive GK on dyadic panels [2^k, 2^(k+1)]
/// expanding both ways from 2^k0 until three consecutive panels on a side
/// are negligible. Suited to integrands that decay at 0+ and at infinity
/// fast enough to be integrable.
QuadResult integrate_positive_axis(const std::function<double(double)>& f,
                                   double scale_hint = 1.0, double rel_tol = 1e-9,
                                   double abs_tol = 1e-14);

}  // namespace conecalc
