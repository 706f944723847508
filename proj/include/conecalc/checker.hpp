#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

namespace conecalc {

/// Black-box positive-real function with an optional analytic first
/// derivative (used where numeric differencing would poison downstream
/// numerics, e.g. Laplace inversion).
struct FunctionHandle {
    std::function<double(double)> eval;
    std::function<double(double)> derivative;  // may be empty
    double q_min = 1e-8;
    double q_max = 1e8;
    std::string label;
};

enum class Verdict { PASS, FAIL, INCONCLUSIVE };

const char* to_string(Verdict v);

struct Witness {
    double q;
    int n;         // derivative order of the violated sign condition
    double value;  // the offending derivative estimate
};

/// Outcome of a numeric cone-membership semi-decision: PASS means "no
/// violation found up to order K on this grid", never a proof.
struct ConeCertificate {
    Verdict verdict = Verdict::PASS;
    int order_checked = 0;
    std::optional<Witness> witness;  // always present on FAIL
    Eigen::ArrayXd grid;
    double tolerance = 0.0;
    std::string note;

    bool pass() const { return verdict == Verdict::PASS; }
    std::string to_json() const;
};

Eigen::ArrayXd log_grid(double lo, double hi, int n);
Eigen::ArrayXd default_check_grid();  // 25 log points in [1e-2, 1e2]

struct DerivEstimate {
    double value;
    double error;  // absolute bound: Richardson residual + roundoff
};

/// f^(n)(q) by Richardson-extrapolated central differences, step
/// h ≈ q·ε^(1/(n+2)) capped so the stencil stays positive. noise_rel is
/// the relative noise level of f evaluations (machine ε for analytic
/// evaluators, larger for numerically recovered functions).
DerivEstimate estimate_derivative(const std::function<double(double)>& f, double q, int n,
                                  double noise_rel = 8.8e-16);

/// Sign tests at tolerance τ = 1e-7, scale-free via
/// scale(q,n) = max(|f(q)|, |f^(n)(q)|·qⁿ, 1e-300); a violation must also
/// exceed the derivative-estimate error bound.
ConeCertificate check_cm(const FunctionHandle& f, int K = 8,
                         const Eigen::ArrayXd& grid = default_check_grid());
ConeCertificate check_bernstein(const FunctionHandle& f, int K = 8,
                                const Eigen::ArrayXd& grid = default_check_grid());
ConeCertificate check_branching(const FunctionHandle& f, int K = 8,
                                const Eigen::ArrayXd& grid = default_check_grid());

struct DriftEstimate {
    double value;
    double error;
};

/// b = lim f(q)/q along q = 2^k, k = 10..30, by iterated Aitken
/// extrapolation; throws on a non-convergent sequence.
DriftEstimate drift_coefficient(const FunctionHandle& f);

/// Gaver–Stehfest inverse Laplace transform with n_terms ∈ {12, 16, 18};
/// long-double accumulation, exact rational coefficients.
double gaver_stehfest(const std::function<double(double)>& laplace_transform, double t,
                      int n_terms);

/// Stieltjes-transform test for f': (i) f' is CM, (ii) the density h
/// recovered from f' by Gaver–Stehfest is itself CM, with cross-order
/// consistency 1e-4 and an instability gate at 1e-2 (INCONCLUSIVE).
ConeCertificate check_stieltjes_derivative(const FunctionHandle& f);

}  // namespace conecalc
