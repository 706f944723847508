#include "conecalc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "conecalc/quadrature.hpp"
#include "conecalc/specfun.hpp"

namespace conecalc {

namespace {

constexpr double kRelTol = 1e-9;
constexpr double kAbsFloor = 1e-14;

// ---------------------------------------------------------------------------
// Kernels the measure is integrated against.

struct Kernel {
    enum class Type {
        one,            // 1
        exp_decay,      // e^{-qx}
        x_exp_decay,    // x e^{-qx}
        xx_exp_decay,   // x^2 e^{-qx}
        one_minus_exp,  // 1 - e^{-qx}
        compensated,    // e^{-qx} - 1 + qx
        w_one_min_inv,  // 1 ∧ 1/x
        w_x_min_one,    // x ∧ 1
        w_x_min_xsq     // x ∧ x^2
    };
    Type type;
    double q = 0.0;

    double operator()(double x) const {
        switch (type) {
            case Type::one: return 1.0;
            case Type::exp_decay: return std::exp(-q * x);
            case Type::x_exp_decay: return x * std::exp(-q * x);
            case Type::xx_exp_decay: return x * x * std::exp(-q * x);
            case Type::one_minus_exp: return one_minus_exp(q * x);
            case Type::compensated: return compensated_exp(q * x);
            case Type::w_one_min_inv: return std::min(1.0, 1.0 / x);
            case Type::w_x_min_one: return std::min(x, 1.0);
            case Type::w_x_min_xsq: return std::min(x, x * x);
        }
        return 0.0;
    }

    // kernel ~ C x^p as x -> 0+
    double origin_power() const {
        switch (type) {
            case Type::one: case Type::exp_decay: case Type::w_one_min_inv: return 0.0;
            case Type::x_exp_decay: case Type::one_minus_exp: case Type::w_x_min_one: return 1.0;
            case Type::xx_exp_decay: case Type::compensated: case Type::w_x_min_xsq: return 2.0;
        }
        return 0.0;
    }
    // kernel ~ C x^p as x -> inf (exp-decaying kernels kill any power tail)
    double tail_power() const {
        switch (type) {
            case Type::one: case Type::one_minus_exp: case Type::w_x_min_one: return 0.0;
            case Type::compensated: case Type::w_x_min_xsq: return 1.0;
            case Type::w_one_min_inv: return -1.0;
            default: return 0.0;
        }
    }
    bool exp_killed_tail() const {
        return type == Type::exp_decay || type == Type::x_exp_decay || type == Type::xx_exp_decay;
    }
    double scale() const { return (q > 0.0 && exp_killed_tail()) ? 1.0 / q : 1.0; }
};

bool origin_ok(double density_exponent, const Kernel& k) {
    return density_exponent + k.origin_power() > -1.0;
}
// tail of a density with power exponent st (ignored when exp_tail/cutoff apply)
bool tail_ok(double st, bool exp_tail, bool bounded, const Kernel& k) {
    if (bounded || exp_tail || k.exp_killed_tail()) return true;
    return st + k.tail_power() < -1.0;
}

// Geometric panel sweep of f over (lo, hi) centred near `center`.
double sweep_integrate(const std::function<double(double)>& f, double lo, double hi, double center,
                       double rel_tol) {
    center = std::clamp(center, std::max(lo, 1e-300), std::min(hi, 1e280));
    double total = 0.0;
    auto panel = [&](double a, double b) {
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (!(b > a)) return 0.0;
        QuadResult r = integrate_adaptive(f, a, b, 0.1 * rel_tol, 0.125 * kAbsFloor, 2000);
        total += r.value;
        return std::abs(r.value);
    };
    int quiet = 0;
    for (int k = 0; k < 2200 && quiet < 3; ++k) {
        const double a = center * std::ldexp(1.0, k);
        if (a >= hi) break;
        const double c = panel(a, a * 2.0);
        quiet = (c <= std::max(kAbsFloor, 0.1 * rel_tol * std::abs(total))) ? quiet + 1 : 0;
    }
    quiet = 0;
    for (int k = -1; k > -2200 && quiet < 3; --k) {
        const double b = center * std::ldexp(1.0, k + 1);
        if (b <= lo || b < 1e-300) break;
        const double c = panel(b * 0.5, b);
        quiet = (c <= std::max(kAbsFloor, 0.1 * rel_tol * std::abs(total))) ? quiet + 1 : 0;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Named-family integrals: closed forms where exact, sweeps otherwise.

double family_numeric(const NamedFamily& fam, const Kernel& k, double rel_tol) {
    const double center = std::min({k.scale(), fam.rate > 0.0 ? 1.0 / fam.rate : 1.0,
                                    std::isfinite(fam.cutoff) ? fam.cutoff : 1.0});
    return sweep_integrate([&](double x) { return fam.density(x) * k(x); }, 0.0, fam.cutoff,
                           center, rel_tol);
}

double integrate_family(const NamedFamily& fam, const Kernel& k, double rel_tol) {
    if (fam.scale == 0.0) return 0.0;
    const bool bounded = std::isfinite(fam.cutoff);
    if (!origin_ok(fam.origin_exponent(), k)) return kInf;
    if (!tail_ok(fam.tail_exponent(), fam.has_exp_tail(), bounded, k)) return kInf;

    using T = Kernel::Type;
    const double c = fam.scale, q = k.q;
    if (fam.kind == NamedFamily::Kind::stable_tail && !bounded) {
        const double a = fam.alpha;
        switch (k.type) {
            case T::one_minus_exp: return c * gamma_fn(1.0 - a) / a * std::pow(q, a);
            case T::exp_decay: return kInf;  // origin-divergent, caught above anyway
            case T::x_exp_decay: return c * gamma_fn(1.0 - a) * std::pow(q, a - 1.0);
            case T::xx_exp_decay: return c * gamma_fn(2.0 - a) * std::pow(q, a - 2.0);
            case T::w_x_min_one: return c * (1.0 / (1.0 - a) + 1.0 / a);
            default: break;
        }
    }
    if (fam.kind == NamedFamily::Kind::exponential && !bounded) {
        const double r = fam.rate;
        switch (k.type) {
            case T::one: return c / r;
            case T::exp_decay: return c / (r + q);
            case T::x_exp_decay: return c / ((r + q) * (r + q));
            case T::xx_exp_decay: return 2.0 * c / std::pow(r + q, 3);
            case T::one_minus_exp: return c * q / (r * (r + q));
            case T::compensated: return c * q * q / (r * r * (r + q));
            default: break;
        }
    }
    if (fam.kind == NamedFamily::Kind::power_exp && !bounded) {
        const double p = fam.power, r = fam.rate;
        if (r > 0.0) {
            switch (k.type) {
                case T::one: return c * std::exp(log_gamma(p + 1.0) - (p + 1.0) * std::log(r));
                case T::exp_decay:
                    return c * std::exp(log_gamma(p + 1.0) - (p + 1.0) * std::log(r + q));
                case T::x_exp_decay:
                    return c * std::exp(log_gamma(p + 2.0) - (p + 2.0) * std::log(r + q));
                case T::xx_exp_decay:
                    return c * std::exp(log_gamma(p + 3.0) - (p + 3.0) * std::log(r + q));
                default: break;
            }
        } else {
            switch (k.type) {
                case T::exp_decay: return c * std::exp(log_gamma(p + 1.0) - (p + 1.0) * std::log(q));
                case T::x_exp_decay:
                    return c * std::exp(log_gamma(p + 2.0) - (p + 2.0) * std::log(q));
                case T::xx_exp_decay:
                    return c * std::exp(log_gamma(p + 3.0) - (p + 3.0) * std::log(q));
                case T::one_minus_exp:  // convergent iff -2 < p < -1
                    return -c * gamma_fn(p + 1.0) * std::pow(q, -p - 1.0);
                case T::compensated:  // convergent iff -3 < p < -2
                    return c * gamma_fn(p + 1.0) * std::pow(q, -p - 1.0);
                case T::w_one_min_inv: return c * (1.0 / (p + 1.0) - 1.0 / p);
                case T::w_x_min_one: return c * (1.0 / (p + 2.0) - 1.0 / (p + 1.0));
                case T::w_x_min_xsq: return c * (1.0 / (p + 3.0) - 1.0 / (p + 2.0));
                case T::one: break;  // never convergent without cutoff
            }
        }
    }
    return family_numeric(fam, k, rel_tol);
}

// ---------------------------------------------------------------------------
// Tabulated-density integrals: head and tail extrapolation sections plus
// per-segment quadrature inside the grid.

double integrate_table(const TabulatedDensity& tab, const Kernel& k, double rel_tol) {
    if (!origin_ok(tab.origin_exponent(), k)) return kInf;
    if (!tail_ok(tab.tail_exponent(), false, false, k)) return kInf;

    const auto& g = tab.grid();
    const auto& v = tab.values();
    const auto n = g.size();
    double total = 0.0;

    // head (0, g0]: power density, geometric panels down from g0
    total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, 0.0, g[0],
                             0.5 * g[0], rel_tol);

    // in-grid segments
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        QuadResult r = integrate_adaptive([&](double x) { return tab.density(x) * k(x); }, g[i],
                                          g[i + 1], 0.1 * rel_tol, 0.125 * kAbsFloor, 400);
        total += r.value;
    }

    // tail [gN, inf): density vN (x/gN)^st
    const double X = g[n - 1], D = v[n - 1], st = tab.tail_exponent();
    using T = Kernel::Type;
    auto power_tail = [&](double from, double kernel_power, double coef) {
        // coef * ∫_from^inf D (x/X)^st x^kernel_power dx, convergence pre-checked
        const double e = st + kernel_power;
        return coef * D * std::pow(from / X, st) * from * std::pow(from, kernel_power) / (-e - 1.0);
    };
    switch (k.type) {
        case T::one: total += power_tail(X, 0.0, 1.0); break;
        case T::w_one_min_inv: total += power_tail(std::max(X, 1.0), -1.0, 1.0);
            if (X < 1.0)
                total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, X, 1.0,
                                         std::sqrt(X), rel_tol);
            break;
        case T::w_x_min_one: total += power_tail(std::max(X, 1.0), 0.0, 1.0);
            if (X < 1.0)
                total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, X, 1.0,
                                         std::sqrt(X), rel_tol);
            break;
        case T::w_x_min_xsq: total += power_tail(std::max(X, 1.0), 1.0, 1.0);
            if (X < 1.0)
                total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, X, 1.0,
                                         std::sqrt(X), rel_tol);
            break;
        case T::one_minus_exp: {
            const double Xq = std::max(X, 45.0 / k.q);  // e^{-qx} negligible beyond
            total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, X, Xq,
                                     std::min(X * 2.0, Xq), rel_tol);
            total += power_tail(Xq, 0.0, 1.0);
            break;
        }
        case T::compensated: {
            const double Xq = std::max(X, 45.0 / k.q);
            total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, X, Xq,
                                     std::min(X * 2.0, Xq), rel_tol);
            total += k.q * power_tail(Xq, 1.0, 1.0) - power_tail(Xq, 0.0, 1.0);
            break;
        }
        default:  // exp-killed kernels: plain sweep
            total += sweep_integrate([&](double x) { return tab.density(x) * k(x); }, X, kInf,
                                     std::max(X, k.scale()), rel_tol);
    }
    return total;
}

double integrate_measure(const RadonMeasure& mu, const Kernel& k, double rel_tol = kRelTol) {
    double total = 0.0;
    for (const Atom& a : mu.atoms()) total += a.m * k(a.x);
    for (const NamedFamily& f : mu.families()) {
        const double part = integrate_family(f, k, rel_tol);
        if (std::isinf(part)) return kInf;
        total += part;
    }
    if (mu.table()) {
        const double part = integrate_table(*mu.table(), k, rel_tol);
        if (std::isinf(part)) return kInf;
        total += part;
    }
    return total;
}

bool measure_integral_finite(const RadonMeasure& mu, const Kernel& k) {
    for (const NamedFamily& f : mu.families()) {
        if (f.scale == 0.0) continue;
        if (!origin_ok(f.origin_exponent(), k)) return false;
        if (!tail_ok(f.tail_exponent(), f.has_exp_tail(), std::isfinite(f.cutoff), k)) return false;
    }
    if (mu.table()) {
        if (!origin_ok(mu.table()->origin_exponent(), k)) return false;
        if (!tail_ok(mu.table()->tail_exponent(), false, false, k)) return false;
    }
    return true;
}

Kernel weight_kernel(WeightKind w) {
    switch (w) {
        case WeightKind::one_min_inv: return {Kernel::Type::w_one_min_inv};
        case WeightKind::x_min_one: return {Kernel::Type::w_x_min_one};
        case WeightKind::x_min_xsq: return {Kernel::Type::w_x_min_xsq};
    }
    return {Kernel::Type::one};
}

}  // namespace

// ---------------------------------------------------------------------------
// NamedFamily

double NamedFamily::density(double x) const {
    if (!(x > 0.0) || x > cutoff) return 0.0;
    switch (kind) {
        case Kind::stable_tail: return scale * std::pow(x, -1.0 - alpha);
        case Kind::exponential: return scale * std::exp(-rate * x);
        case Kind::power_exp: return scale * std::pow(x, power) * std::exp(-rate * x);
    }
    return 0.0;
}

double NamedFamily::origin_exponent() const {
    switch (kind) {
        case Kind::stable_tail: return -1.0 - alpha;
        case Kind::exponential: return 0.0;
        case Kind::power_exp: return power;
    }
    return 0.0;
}

double NamedFamily::tail_exponent() const {
    switch (kind) {
        case Kind::stable_tail: return -1.0 - alpha;
        case Kind::exponential: return 0.0;  // unused: has_exp_tail() covers it
        case Kind::power_exp: return power;
    }
    return 0.0;
}

bool NamedFamily::nonincreasing() const {
    switch (kind) {
        case Kind::stable_tail: return true;
        case Kind::exponential: return true;
        case Kind::power_exp: return power <= 0.0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// TabulatedDensity

TabulatedDensity::TabulatedDensity(Eigen::ArrayXd grid, Eigen::ArrayXd values,
                                   double tail_exponent)
    : grid_(std::move(grid)), values_(std::move(values)), tail_exponent_(tail_exponent) {
    const auto n = grid_.size();
    if (n < 2 || values_.size() != n)
        throw std::invalid_argument("TabulatedDensity: grid/values size mismatch or too short");
    if (!(grid_[0] > 0.0)) throw std::invalid_argument("TabulatedDensity: grid must be positive");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(grid_[i] > grid_[i - 1]))
            throw std::invalid_argument("TabulatedDensity: grid must be strictly increasing");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
            throw std::invalid_argument("TabulatedDensity: values must be finite and nonnegative");
    if (!std::isfinite(tail_exponent_))
        throw std::invalid_argument("TabulatedDensity: tail exponent must be finite");

    if ((values_ > 0.0).all()) {
        loglog_.emplace(grid_.log(), values_.log());
        head_exponent_ =
            (std::log(values_[1]) - std::log(values_[0])) / (std::log(grid_[1]) - std::log(grid_[0]));
    } else {
        head_exponent_ = 0.0;
    }
}

double TabulatedDensity::density(double x) const {
    if (!(x > 0.0)) return 0.0;
    const auto n = grid_.size();
    if (x < grid_[0]) return values_[0] * std::pow(x / grid_[0], head_exponent_);
    if (x > grid_[n - 1]) return values_[n - 1] * std::pow(x / grid_[n - 1], tail_exponent_);
    if (loglog_) return std::exp((*loglog_)(std::log(x)));
    // linear fallback when zeros are present
    const auto* begin = grid_.data();
    auto it = std::upper_bound(begin, begin + n, x);
    const auto i = std::clamp<Eigen::Index>(it - begin - 1, 0, n - 2);
    const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

bool TabulatedDensity::nonincreasing() const {
    for (Eigen::Index i = 1; i < values_.size(); ++i)
        if (values_[i] > values_[i - 1] * (1.0 + 1e-12)) return false;
    return tail_exponent_ <= 0.0;
}

// ---------------------------------------------------------------------------
// RadonMeasure

namespace {
void validate_atom(double x, double m) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("RadonMeasure: atom location must be strictly positive");
    if (!(m >= 0.0) || !std::isfinite(m))
        throw std::invalid_argument("RadonMeasure: atom mass must be nonnegative");
}
}  // namespace

RadonMeasure RadonMeasure::atom(double x, double m) {
    validate_atom(x, m);
    RadonMeasure mu;
    mu.atoms_.push_back({x, m});
    return mu;
}

RadonMeasure RadonMeasure::stable_tail(double alpha, double scale) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("stable_tail: alpha must be in (0,1)");
    if (!(scale >= 0.0)) throw std::invalid_argument("stable_tail: scale must be nonnegative");
    RadonMeasure mu;
    mu.families_.push_back({NamedFamily::Kind::stable_tail, alpha, 0.0, 0.0, scale, kInf});
    return mu;
}

RadonMeasure RadonMeasure::exponential(double rate, double scale) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
    if (!(scale >= 0.0)) throw std::invalid_argument("exponential: scale must be nonnegative");
    RadonMeasure mu;
    mu.families_.push_back({NamedFamily::Kind::exponential, 0.0, 0.0, rate, scale, kInf});
    return mu;
}

RadonMeasure RadonMeasure::power_exp(double power, double rate, double scale, double cutoff) {
    if (!(rate >= 0.0)) throw std::invalid_argument("power_exp: rate must be nonnegative");
    if (!(scale >= 0.0)) throw std::invalid_argument("power_exp: scale must be nonnegative");
    if (!(cutoff > 0.0)) throw std::invalid_argument("power_exp: cutoff must be positive");
    RadonMeasure mu;
    mu.families_.push_back({NamedFamily::Kind::power_exp, 0.0, power, rate, scale, cutoff});
    return mu;
}

RadonMeasure RadonMeasure::tabulated(Eigen::ArrayXd grid, Eigen::ArrayXd values,
                                     double tail_exponent) {
    RadonMeasure mu;
    mu.table_.emplace(std::move(grid), std::move(values), tail_exponent);
    return mu;
}

RadonMeasure RadonMeasure::tabulated_from(const std::function<double(double)>& fn, double x_min,
                                          double x_max, int n, double tail_exponent) {
    Eigen::ArrayXd grid =
        Eigen::ArrayXd::LinSpaced(n, std::log(x_min), std::log(x_max)).exp();
    Eigen::ArrayXd values(n);
    for (int i = 0; i < n; ++i) values[i] = fn(grid[i]);
    return tabulated(std::move(grid), std::move(values), tail_exponent);
}

RadonMeasure RadonMeasure::merged(const RadonMeasure& other) const {
    RadonMeasure out = *this;
    out.atoms_.insert(out.atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    out.families_.insert(out.families_.end(), other.families_.begin(), other.families_.end());
    if (other.table_) {
        if (out.table_) throw std::invalid_argument("RadonMeasure: cannot merge two tables");
        out.table_ = other.table_;
    }
    return out;
}

RadonMeasure RadonMeasure::scaled(double c) const {
    if (!(c >= 0.0)) throw std::invalid_argument("RadonMeasure: scale factor must be nonnegative");
    RadonMeasure out = *this;
    for (Atom& a : out.atoms_) a.m *= c;
    for (NamedFamily& f : out.families_) f.scale *= c;
    if (out.table_)
        out.table_.emplace(out.table_->grid(), out.table_->values() * c,
                           out.table_->tail_exponent());
    return out;
}

RadonMeasure RadonMeasure::multiplied_by_x() const {
    RadonMeasure out;
    for (const Atom& a : atoms_) out.atoms_.push_back({a.x, a.x * a.m});
    for (const NamedFamily& f : families_) {
        NamedFamily g = f;
        switch (f.kind) {
            case NamedFamily::Kind::stable_tail:
                g.kind = NamedFamily::Kind::power_exp;
                g.power = -f.alpha;
                g.alpha = 0.0;
                g.rate = 0.0;
                break;
            case NamedFamily::Kind::exponential:
                g.kind = NamedFamily::Kind::power_exp;
                g.power = 1.0;
                break;
            case NamedFamily::Kind::power_exp: g.power = f.power + 1.0; break;
        }
        out.families_.push_back(g);
    }
    if (table_)
        out.table_.emplace(table_->grid(), table_->values() * table_->grid(),
                           table_->tail_exponent() + 1.0);
    return out;
}

RadonMeasure RadonMeasure::divided_by_x() const {
    RadonMeasure out;
    for (const Atom& a : atoms_) out.atoms_.push_back({a.x, a.m / a.x});
    for (const NamedFamily& f : families_) {
        NamedFamily g = f;
        switch (f.kind) {
            case NamedFamily::Kind::stable_tail:
                g.kind = NamedFamily::Kind::power_exp;
                g.power = -2.0 - f.alpha;
                g.alpha = 0.0;
                break;
            case NamedFamily::Kind::exponential:
                g.kind = NamedFamily::Kind::power_exp;
                g.power = -1.0;
                break;
            case NamedFamily::Kind::power_exp: {
                // canonicalise pure powers back to stable_tail when they fit
                const double p = f.power - 1.0;
                if (f.rate == 0.0 && !std::isfinite(f.cutoff) && p > -2.0 && p < -1.0) {
                    g.kind = NamedFamily::Kind::stable_tail;
                    g.alpha = -1.0 - p;
                    g.power = 0.0;
                } else {
                    g.power = p;
                }
                break;
            }
        }
        out.families_.push_back(g);
    }
    if (table_)
        out.table_.emplace(table_->grid(), table_->values() / table_->grid(),
                           table_->tail_exponent() - 1.0);
    return out;
}

bool RadonMeasure::is_zero() const {
    for (const Atom& a : atoms_)
        if (a.m > 0.0) return false;
    for (const NamedFamily& f : families_)
        if (f.scale > 0.0) return false;
    if (table_ && (table_->values() > 0.0).any()) return false;
    return true;
}

bool RadonMeasure::density_nonincreasing() const {
    if (has_atoms()) return false;
    for (const NamedFamily& f : families_)
        if (f.scale > 0.0 && !f.nonincreasing()) return false;
    if (table_ && !table_->nonincreasing()) return false;
    return true;
}

double RadonMeasure::total_density(double x) const {
    double v = 0.0;
    for (const NamedFamily& f : families_) v += f.density(x);
    if (table_) v += table_->density(x);
    return v;
}

// ---------------------------------------------------------------------------
// Tail-function measure (Proposition 2 machinery)

namespace {

// 512-point grid pinned for tail tables
RadonMeasure tabulate_component_tail(const std::function<double(double)>& density, double support_hi,
                                     double tail_exp_out) {
    const int n = 512;
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(n, std::log(1e-6), std::log(1e6)).exp();
    // cumulative from above: T(y_i) = ∫_{y_i}^{inf} density
    Eigen::ArrayXd tails(n);
    double acc = 0.0;
    if (support_hi > grid[n - 1]) {
        acc = sweep_integrate(density, grid[n - 1], support_hi, grid[n - 1] * 2.0, 1e-10);
    }
    tails[n - 1] = acc;
    for (int i = n - 2; i >= 0; --i) {
        acc += integrate_adaptive(density, grid[i], std::min(grid[i + 1], support_hi), 1e-10,
                                  kAbsFloor, 400)
                   .value;
        tails[i] = acc;
    }
    return RadonMeasure::tabulated(std::move(grid), std::move(tails), tail_exp_out);
}

}  // namespace

RadonMeasure RadonMeasure::tail_function_density() const {
    RadonMeasure out;
    for (const Atom& a : atoms_)
        out = out.merged(RadonMeasure::power_exp(0.0, 0.0, a.m, a.x));
    for (const NamedFamily& f : families_) {
        if (f.scale == 0.0) continue;
        if (f.kind == NamedFamily::Kind::stable_tail && !std::isfinite(f.cutoff)) {
            out = out.merged(RadonMeasure::power_exp(-f.alpha, 0.0, f.scale / f.alpha));
        } else if (f.kind == NamedFamily::Kind::exponential && !std::isfinite(f.cutoff)) {
            out = out.merged(RadonMeasure::exponential(f.rate, f.scale / f.rate));
        } else if (f.kind == NamedFamily::Kind::power_exp && f.rate == 0.0 &&
                   !std::isfinite(f.cutoff) && f.power < -1.0) {
            out = out.merged(RadonMeasure::power_exp(f.power + 1.0, 0.0, f.scale / (-f.power - 1.0)));
        } else {
            if (!f.has_exp_tail() && !std::isfinite(f.cutoff) && f.tail_exponent() >= -1.0)
                throw std::domain_error("tail_function_density: tail mass diverges");
            const double tail_out =
                f.has_exp_tail() ? -30.0 : (std::isfinite(f.cutoff) ? -60.0 : f.tail_exponent() + 1.0);
            out = out.merged(tabulate_component_tail([f](double x) { return f.density(x); },
                                                     f.cutoff, tail_out));
        }
    }
    if (table_) {
        if (table_->tail_exponent() >= -1.0)
            throw std::domain_error("tail_function_density: tail mass diverges");
        const TabulatedDensity tab = *table_;
        out = out.merged(tabulate_component_tail([tab](double x) { return tab.density(x); }, kInf,
                                                 tab.tail_exponent() + 1.0));
    }
    return out;
}

RadonMeasure RadonMeasure::differentiated_tail() const {
    if (has_atoms())
        throw std::domain_error("differentiated_tail: representation must be atom-free");
    if (!density_nonincreasing())
        throw std::domain_error("differentiated_tail: density must be nonincreasing");
    RadonMeasure out;
    for (const NamedFamily& f : families_) {
        if (f.scale == 0.0) continue;
        switch (f.kind) {
            case NamedFamily::Kind::stable_tail:
                out = out.merged(RadonMeasure::power_exp(-2.0 - f.alpha, 0.0,
                                                         f.scale * (1.0 + f.alpha), f.cutoff));
                break;
            case NamedFamily::Kind::exponential:
                out = out.merged(RadonMeasure::exponential(f.rate, f.rate * f.scale));
                break;
            case NamedFamily::Kind::power_exp: {
                if (f.rate != 0.0)
                    throw std::domain_error(
                        "differentiated_tail: power_exp with positive rate unsupported");
                if (f.power != 0.0) {
                    const double p = f.power - 1.0;
                    if (p > -2.0 && p < -1.0 && !std::isfinite(f.cutoff)) {
                        out = out.merged(
                            RadonMeasure::stable_tail(-1.0 - p, -f.power * f.scale));
                    } else {
                        out = out.merged(
                            RadonMeasure::power_exp(p, 0.0, -f.power * f.scale, f.cutoff));
                    }
                }
                break;
            }
        }
        if (std::isfinite(f.cutoff)) {
            const double jump = f.density(f.cutoff);  // mass of the recovered atom
            if (jump > 0.0) out = out.merged(RadonMeasure::atom(f.cutoff, jump));
        }
    }
    if (table_) {
        // -d/dy of the interpolated tail, tabulated on the same grid
        const TabulatedDensity& tab = *table_;
        const auto& g = tab.grid();
        Eigen::ArrayXd vals(g.size());
        const double h = 1e-4;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const double y = g[i];
            vals[i] = std::max(0.0, -(tab.density(y * (1 + h)) - tab.density(y * (1 - h))) /
                                        (2 * h * y));
        }
        out = out.merged(RadonMeasure::tabulated(g, std::move(vals), tab.tail_exponent() - 1.0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transforms

double weighted_mass(const RadonMeasure& mu, WeightKind w) {
    return integrate_measure(mu, weight_kernel(w));
}

double laplace(const RadonMeasure& mu, double q) {
    if (!(q > 0.0)) throw std::domain_error("laplace: q must be positive");
    return integrate_measure(mu, {Kernel::Type::exp_decay, q});
}

double partial_levy_transform(const RadonMeasure& mu, double q) {
    if (!(q > 0.0)) throw std::domain_error("partial_levy_transform: q must be positive");
    if (!measure_integral_finite(mu, weight_kernel(WeightKind::x_min_one)))
        throw std::domain_error("partial_levy_transform: integrability ∫(x∧1)Λ(dx)<∞ fails");
    return integrate_measure(mu, {Kernel::Type::one_minus_exp, q});
}

double compensated_levy_transform(const RadonMeasure& mu, double q) {
    if (!(q > 0.0)) throw std::domain_error("compensated_levy_transform: q must be positive");
    if (!measure_integral_finite(mu, weight_kernel(WeightKind::x_min_xsq)))
        throw std::domain_error("compensated_levy_transform: integrability ∫(x∧x²)Π(dx)<∞ fails");
    return integrate_measure(mu, {Kernel::Type::compensated, q});
}

double laplace_x(const RadonMeasure& mu, double q) {
    if (!(q > 0.0)) throw std::domain_error("laplace_x: q must be positive");
    return integrate_measure(mu, {Kernel::Type::x_exp_decay, q});
}

double laplace_xx(const RadonMeasure& mu, double q) {
    if (!(q > 0.0)) throw std::domain_error("laplace_xx: q must be positive");
    return integrate_measure(mu, {Kernel::Type::xx_exp_decay, q});
}

// ---------------------------------------------------------------------------
// JSON schema:
// {"atoms":[{"x":..,"m":..}],
//  "families":[{"kind":"stable_tail","alpha":..,"scale":..} |
//              {"kind":"exponential","rate":..,"scale":..} |
//              {"kind":"power_exp","power":..,"rate":..,"scale":..,"cutoff":..}],
//  "table":{"grid":[..],"values":[..],"tail_exponent":..}}

std::string RadonMeasure::to_json() const {
    nlohmann::ordered_json j;
    if (!atoms_.empty()) {
        auto& arr = j["atoms"] = nlohmann::ordered_json::array();
        for (const Atom& a : atoms_) arr.push_back({{"x", a.x}, {"m", a.m}});
    }
    if (!families_.empty()) {
        auto& arr = j["families"] = nlohmann::ordered_json::array();
        for (const NamedFamily& f : families_) {
            nlohmann::ordered_json e;
            switch (f.kind) {
                case NamedFamily::Kind::stable_tail:
                    e = {{"kind", "stable_tail"}, {"alpha", f.alpha}, {"scale", f.scale}};
                    break;
                case NamedFamily::Kind::exponential:
                    e = {{"kind", "exponential"}, {"rate", f.rate}, {"scale", f.scale}};
                    break;
                case NamedFamily::Kind::power_exp:
                    e = {{"kind", "power_exp"},
                         {"power", f.power},
                         {"rate", f.rate},
                         {"scale", f.scale}};
                    break;
            }
            if (std::isfinite(f.cutoff)) e["cutoff"] = f.cutoff;
            arr.push_back(e);
        }
    }
    if (table_) {
        nlohmann::ordered_json t;
        t["grid"] = std::vector<double>(table_->grid().data(),
                                        table_->grid().data() + table_->grid().size());
        t["values"] = std::vector<double>(table_->values().data(),
                                          table_->values().data() + table_->values().size());
        t["tail_exponent"] = table_->tail_exponent();
        j["table"] = t;
    }
    return j.dump();
}

RadonMeasure RadonMeasure::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("RadonMeasure: bad JSON: ") + e.what());
    }
    RadonMeasure mu;
    bool any = false;
    if (j.contains("atoms")) {
        any = true;
        for (const auto& a : j["atoms"])
            mu = mu.merged(RadonMeasure::atom(a.at("x").get<double>(), a.at("m").get<double>()));
    }
    if (j.contains("families")) {
        any = true;
        for (const auto& f : j["families"]) {
            const std::string kind = f.at("kind").get<std::string>();
            const double cutoff = f.value("cutoff", kInf);
            if (kind == "stable_tail") {
                if (std::isfinite(cutoff))
                    throw std::invalid_argument("RadonMeasure: stable_tail takes no cutoff");
                mu = mu.merged(RadonMeasure::stable_tail(f.at("alpha").get<double>(),
                                                         f.at("scale").get<double>()));
            } else if (kind == "exponential") {
                if (std::isfinite(cutoff))
                    throw std::invalid_argument("RadonMeasure: exponential takes no cutoff");
                mu = mu.merged(RadonMeasure::exponential(f.at("rate").get<double>(),
                                                         f.at("scale").get<double>()));
            } else if (kind == "power_exp") {
                mu = mu.merged(RadonMeasure::power_exp(f.at("power").get<double>(),
                                                       f.value("rate", 0.0),
                                                       f.at("scale").get<double>(), cutoff));
            } else {
                throw std::invalid_argument("RadonMeasure: unknown family kind '" + kind + "'");
            }
        }
    }
    if (j.contains("table")) {
        any = true;
        const auto& t = j["table"];
        const auto gv = t.at("grid").get<std::vector<double>>();
        const auto vv = t.at("values").get<std::vector<double>>();
        Eigen::ArrayXd grid = Eigen::Map<const Eigen::ArrayXd>(gv.data(), gv.size());
        Eigen::ArrayXd values = Eigen::Map<const Eigen::ArrayXd>(vv.data(), vv.size());
        mu = mu.merged(
            RadonMeasure::tabulated(grid, values, t.at("tail_exponent").get<double>()));
    }
    if (!any) throw std::invalid_argument("RadonMeasure: at least one field must be present");
    return mu;
}

}  // namespace conecalc
