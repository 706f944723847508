#include "conecalc/checker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "conecalc/parallel.hpp"

namespace conecalc {

namespace {

constexpr double kTau = 1e-7;
constexpr double kTiny = 1e-300;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
    }
    return "?";
}

Eigen::ArrayXd log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
    return Eigen::ArrayXd::LinSpaced(n, std::log(lo), std::log(hi)).exp();
}

Eigen::ArrayXd default_check_grid() { return log_grid(1e-2, 1e2, 25); }

DerivEstimate estimate_derivative(const std::function<double(double)>& f, double q, int n,
                                  double noise_rel) {
    if (!(q > 0.0)) throw std::domain_error("estimate_derivative: q must be positive");
    if (n == 0) {
        const double v = f(q);
        if (!std::isfinite(v))
            throw std::runtime_error("estimate_derivative: evaluator returned non-finite value");
        return {v, noise_rel * std::abs(v)};
    }
    const double h = std::min(q * std::pow(noise_rel, 1.0 / (n + 2)), 0.9 * q / n);
    double max_abs = 0.0;
    auto stencil = [&](double step) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double v = f(q + (0.5 * n - j) * step);
            if (!std::isfinite(v))
                throw std::runtime_error("estimate_derivative: evaluator returned non-finite value");
            max_abs = std::max(max_abs, std::abs(v));
            s += ((j % 2 == 0) ? 1.0 : -1.0) * binom(n, j) * v;
        }
        return s / std::pow(step, n);
    };
    const double d1 = stencil(h);
    const double d2 = stencil(2.0 * h);
    const double value = (4.0 * d1 - d2) / 3.0;
    const double err_round = noise_rel * max_abs * std::pow(2.0, n) / std::pow(h, n);
    const double err_trunc = std::abs(d1 - d2) / 3.0;
    return {value, err_trunc + 2.0 * err_round};
}

namespace {

struct CellViolation {
    double severity;  // violation in units of scale, after the error margin
    Witness witness;
};

// Shared sign-test core. For each grid point and derivative order m in
// [m_lo, K], the estimate of f^(m) must satisfy sign_of(m)·f^(m) >= -(τ·scale
// + 4·err). sign_parity 0 tests (−1)^m (CM), 1 tests (−1)^(m−1) (Bernstein).
std::optional<CellViolation> worst_violation(const FunctionHandle& f, int K, int m_lo,
                                             int sign_parity, const Eigen::ArrayXd& grid,
                                             double noise_rel) {
    if (K > 10) throw std::domain_error("cone check: order K must be <= 10");
    std::vector<std::optional<CellViolation>> per_point(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double q = grid[i];
        std::optional<CellViolation> worst;
        for (int m = m_lo; m <= K; ++m) {
            const DerivEstimate est = estimate_derivative(f.eval, q, m, noise_rel);
            const double sign = ((m - sign_parity) % 2 == 0) ? 1.0 : -1.0;
            const double v = sign * est.value;
            const double scale =
                std::max({std::abs(f.eval(q)), std::abs(est.value) * std::pow(q, m), kTiny});
            const double margin = kTau * scale + 4.0 * est.error;
            if (v < -margin) {
                const double sev = (-v - 4.0 * est.error) / scale;
                if (!worst || sev > worst->severity) worst = {sev, {q, m, est.value}};
            }
        }
        per_point[i] = worst;
    });
    std::optional<CellViolation> worst;
    for (const auto& w : per_point)
        if (w && (!worst || w->severity > worst->severity)) worst = w;
    return worst;
}

ConeCertificate make_cert(int K, const Eigen::ArrayXd& grid,
                          const std::optional<CellViolation>& worst) {
    ConeCertificate cert;
    cert.order_checked = K;
    cert.grid = grid;
    cert.tolerance = kTau;
    if (worst) {
        cert.verdict = Verdict::FAIL;
        cert.witness = worst->witness;
    }
    return cert;
}

}  // namespace

ConeCertificate check_cm(const FunctionHandle& f, int K, const Eigen::ArrayXd& grid) {
    return make_cert(K, grid, worst_violation(f, K, 0, 0, grid, 8.8e-16));
}

ConeCertificate check_bernstein(const FunctionHandle& f, int K, const Eigen::ArrayXd& grid) {
    return make_cert(K, grid, worst_violation(f, K, 0, 1, grid, 8.8e-16));
}

ConeCertificate check_branching(const FunctionHandle& f, int K, const Eigen::ArrayXd& grid) {
    // vanishing limit along q = 2^{-k}, Aitken-extrapolated
    std::vector<double> s;
    for (int k = 0; k <= 20; ++k) {
        const double v = f.eval(std::ldexp(1.0, -k));
        if (!std::isfinite(v)) throw std::runtime_error("check_branching: non-finite evaluation");
        s.push_back(v);
    }
    std::vector<double> a = s;
    for (int pass = 0; pass < 6 && a.size() >= 3; ++pass) {
        std::vector<double> nxt;
        for (std::size_t i = 0; i + 2 < a.size(); ++i) {
            const double d2 = a[i + 2] - 2 * a[i + 1] + a[i];
            nxt.push_back(d2 == 0.0 ? a[i + 2]
                                    : a[i + 2] - (a[i + 2] - a[i + 1]) * (a[i + 2] - a[i + 1]) / d2);
        }
        a = std::move(nxt);
    }
    const double limit = a.back();
    const double scale = std::max({std::abs(f.eval(1.0)), 1.0});
    if (std::abs(limit) > 1e-6 * scale) {
        ConeCertificate cert = make_cert(K, grid, std::nullopt);
        cert.verdict = Verdict::FAIL;
        cert.witness = Witness{std::ldexp(1.0, -20), 0, limit};
        cert.note = "limit at 0+ does not vanish";
        return cert;
    }
    // f >= 0, f' >= 0, and CM signs on f'' and beyond
    auto worst0 = worst_violation(f, 1, 0, 1, grid, 8.8e-16);      // f, f' nonnegative
    auto worst2 = worst_violation(f, K, 2, 0, grid, 8.8e-16);      // (−1)^m f^(m), m >= 2
    std::optional<CellViolation> worst = worst0;
    if (worst2 && (!worst || worst2->severity > worst->severity)) worst = worst2;
    return make_cert(K, grid, worst);
}

DriftEstimate drift_coefficient(const FunctionHandle& f) {
    std::vector<double> s;
    for (int k = 10; k <= 30; ++k) {
        const double q = std::ldexp(1.0, k);
        const double v = f.eval(q);
        if (!std::isfinite(v)) throw std::runtime_error("drift_coefficient: non-finite evaluation");
        s.push_back(v / q);
    }
    std::vector<double> a = s;
    double last_correction = std::abs(a.front() - a.back());
    for (int pass = 0; pass < 8 && a.size() >= 3; ++pass) {
        std::vector<double> nxt;
        for (std::size_t i = 0; i + 2 < a.size(); ++i) {
            const double d2 = a[i + 2] - 2 * a[i + 1] + a[i];
            nxt.push_back(d2 == 0.0 ? a[i + 2]
                                    : a[i + 2] - (a[i + 2] - a[i + 1]) * (a[i + 2] - a[i + 1]) / d2);
        }
        last_correction = std::abs(nxt.back() - a.back());
        a = std::move(nxt);
    }
    const double value = a.back();
    const double err = last_correction + 1e-13 * std::abs(value);
    if (!(err <= 1e-6 * std::max(1.0, std::abs(value))))
        throw std::runtime_error("drift_coefficient: extrapolation did not converge");
    return {std::max(0.0, value), err};
}

// ---------------------------------------------------------------------------
// Gaver–Stehfest

namespace {

std::vector<long double> stehfest_table(int n_terms) {
    const int M = n_terms / 2;
    long double fact[40];
    fact[0] = 1.0L;
    for (int i = 1; i < 40; ++i) fact[i] = fact[i - 1] * i;
    std::vector<long double> V(n_terms);
    for (int k = 1; k <= n_terms; ++k) {
        long double s = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, M); ++j) {
            long double jm = 1.0L;
            for (int e = 0; e < M; ++e) jm *= j;
            s += jm * fact[2 * j] /
                 (fact[M - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k]);
        }
        V[k - 1] = (((k + M) % 2 == 0) ? 1.0L : -1.0L) * s;
    }
    return V;
}

}  // namespace

double gaver_stehfest(const std::function<double(double)>& laplace_transform, double t,
                      int n_terms) {
    if (!(t > 0.0)) throw std::domain_error("gaver_stehfest: t must be positive");
    if (n_terms != 12 && n_terms != 16 && n_terms != 18)
        throw std::domain_error("gaver_stehfest: supported term counts are 12, 16, 18");
    static const std::vector<long double> v12 = stehfest_table(12);
    static const std::vector<long double> v16 = stehfest_table(16);
    static const std::vector<long double> v18 = stehfest_table(18);
    const std::vector<long double>& V = n_terms == 12 ? v12 : (n_terms == 16 ? v16 : v18);
    const long double ln2t = 0.693147180559945309417L / static_cast<long double>(t);
    long double sum = 0.0L;
    for (int k = 1; k <= n_terms; ++k) {
        const double Fk = laplace_transform(static_cast<double>(k * ln2t));
        if (!std::isfinite(Fk)) throw std::runtime_error("gaver_stehfest: non-finite transform value");
        sum += V[k - 1] * static_cast<long double>(Fk);
    }
    return static_cast<double>(ln2t * sum);
}

ConeCertificate check_stieltjes_derivative(const FunctionHandle& f) {
    // f' handle: analytic when provided, Richardson differences otherwise
    const bool analytic = static_cast<bool>(f.derivative);
    std::function<double(double)> fprime;
    if (analytic)
        fprime = f.derivative;
    else
        fprime = [f](double q) { return estimate_derivative(f.eval, q, 1).value; };
    const double fp_noise = analytic ? 8.8e-16 : 1e-10;

    FunctionHandle fph{fprime, {}, f.q_min, f.q_max, f.label + "'"};
    auto worst = worst_violation(fph, 8, 0, 0, default_check_grid(), fp_noise);
    if (worst) {
        ConeCertificate cert = make_cert(8, default_check_grid(), worst);
        cert.note = "f' is not completely monotone";
        return cert;
    }

    // recover h = inverse Laplace of f' on a coarse grid; cross-order gates
    const Eigen::ArrayXd tg = log_grid(0.2, 2.0, 9);
    Eigen::ArrayXd h12(tg.size()), h16(tg.size()), h18(tg.size());
    for (Eigen::Index i = 0; i < tg.size(); ++i) {
        h12[i] = gaver_stehfest(fprime, tg[i], 12);
        h16[i] = gaver_stehfest(fprime, tg[i], 16);
        h18[i] = gaver_stehfest(fprime, tg[i], 18);
    }
    const double hscale = std::max(h16.abs().maxCoeff(), kTiny);
    auto norm_diff = [&](const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
        double worst_d = 0.0;
        int at = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double d = std::abs(x[i] - y[i]) / std::max(std::abs(y[i]), 0.01 * hscale);
            if (d > worst_d) {
                worst_d = d;
                at = static_cast<int>(i);
            }
        }
        return std::pair<double, int>(worst_d, at);
    };
    const auto [instab, at_i] = norm_diff(h12, h16);
    ConeCertificate cert;
    cert.order_checked = 8;
    cert.grid = tg;
    cert.tolerance = 1e-4;
    if (instab > 1e-2) {
        cert.verdict = Verdict::INCONCLUSIVE;
        cert.witness = Witness{tg[at_i], -1, instab};
        cert.note = "Laplace inversion unstable across orders (low vs mid)";
        return cert;
    }
    const auto [cons, at_c] = norm_diff(h16, h18);
    if (cons > 1e-4) {
        cert.verdict = Verdict::FAIL;
        cert.witness = Witness{tg[at_c], -1, cons};
        cert.note = "Laplace inversion inconsistent across orders (mid vs high)";
        return cert;
    }

    // h itself must be completely monotone (coarse, low order, noisy data)
    FunctionHandle hh{[fprime](double t) { return gaver_stehfest(fprime, t, 16); },
                      {},
                      0.05,
                      8.0,
                      f.label + " inverse-laplace density"};
    auto worst_h = worst_violation(hh, 3, 0, 0, log_grid(0.3, 1.5, 7), 1e-5);
    if (worst_h) {
        ConeCertificate c2 = make_cert(3, log_grid(0.3, 1.5, 7), worst_h);
        c2.note = "recovered density is not completely monotone";
        return c2;
    }
    cert.verdict = Verdict::PASS;
    return cert;
}

std::string ConeCertificate::to_json() const {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(verdict);
    j["K"] = order_checked;
    if (witness)
        j["witness"] = {{"q", witness->q}, {"n", witness->n}, {"value", witness->value}};
    j["grid"] = std::vector<double>(grid.data(), grid.data() + grid.size());
    j["tolerance"] = tolerance;
    if (!note.empty()) j["note"] = note;
    return j.dump();
}

}  // namespace conecalc
