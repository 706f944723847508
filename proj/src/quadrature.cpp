#include "conecalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace conecalc {

namespace {

// 15-point Kronrod nodes on [-1, 1] (nonnegative half) and weights,
// with the embedded 7-point Gauss weights. QUADPACK dqk15 values.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        res_k += kWgk[j] * fsum;
        if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
    }
    const double value = res_k * h;
    double err = std::abs((res_k - res_g) * h);
    // QUADPACK-style sharpening of the raw difference
    if (err > 0.0) err = std::min(err, 200.0 * err * std::sqrt(err / (std::abs(value) + 1e-300)));
    return {a, b, value, err};
}

}  // namespace

QuadResult gk15_panel(const std::function<double(double)>& f, double a, double b) {
    Panel p = eval_panel(f, a, b);
    return {p.value, p.error};
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int max_panels) {
    if (!(b > a)) return {0.0, 0.0};
    std::priority_queue<Panel> heap;
    Panel first = eval_panel(f, a, b);
    double total = first.value;
    double err = first.error;
    heap.push(first);
    int n = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (n >= max_panels) throw std::runtime_error("integrate_adaptive: panel budget exhausted");
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable in double precision; accept it
            err -= worst.error;
            continue;
        }
        Panel left = eval_panel(f, worst.a, mid);
        Panel right = eval_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    return {total, err};
}

QuadResult integrate_positive_axis(const std::function<double(double)>& f, double scale_hint,
                                   double rel_tol, double abs_tol) {
    if (!(scale_hint > 0.0) || !std::isfinite(scale_hint)) scale_hint = 1.0;
    const int k0 = static_cast<int>(std::floor(std::log2(scale_hint)));
    const int kMin = k0 - 1100;  // reaches denormal range; loop exits on negligible panels
    const int kMax = k0 + 1100;
    const double panel_rel = 0.1 * rel_tol;

    double total = 0.0, err = 0.0;
    auto add_panel = [&](int k) {
        const double a = std::ldexp(1.0, k);
        const double b = std::ldexp(1.0, k + 1);
        if (a <= 0.0 || !std::isfinite(a) || a == b) return 0.0;  // under/overflow guard
        QuadResult r = integrate_adaptive(f, a, b, panel_rel, 0.125 * abs_tol, 2000);
        total += r.value;
        err += r.error;
        return std::abs(r.value);
    };

    // upward sweep
    int quiet = 0;
    for (int k = k0; k < kMax && quiet < 3; ++k) {
        const double c = add_panel(k);
        quiet = (c <= std::max(abs_tol, panel_rel * std::abs(total))) ? quiet + 1 : 0;
    }
    // downward sweep
    quiet = 0;
    for (int k = k0 - 1; k > kMin && quiet < 3; --k) {
        const double c = add_panel(k);
        quiet = (c <= std::max(abs_tol, panel_rel * std::abs(total))) ? quiet + 1 : 0;
    }
    return {total, err};
}

}  // namespace conecalc
