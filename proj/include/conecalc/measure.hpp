#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conecalc/interpolation.hpp"

namespace conecalc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Integrability weights of the three cone conditions:
/// (1 ∧ x⁻¹), (x ∧ 1), (x ∧ x²).
enum class WeightKind { one_min_inv, x_min_one, x_min_xsq };

struct Atom {
    double x;  // location, > 0
    double m;  // mass, >= 0
};

/// Analytic density families on (0, cutoff):
///   stable_tail(alpha, c):      c·x^(−1−α), 0 < α < 1
///   exponential(rate, c):       c·e^(−rate·x)
///   power_exp(p, rate, c):      c·x^p·e^(−rate·x), rate >= 0
/// A finite cutoff truncates the support from above (density 0 beyond it).
struct NamedFamily {
    enum class Kind { stable_tail, exponential, power_exp };
    Kind kind;
    double alpha = 0.0;
    double power = 0.0;
    double rate = 0.0;
    double scale = 0.0;
    double cutoff = kInf;

    double density(double x) const;
    double origin_exponent() const;        // density ~ c·x^s as x → 0+
    double tail_exponent() const;          // power tails only; see has_exp_tail
    bool has_exp_tail() const { return rate > 0.0; }
    bool nonincreasing() const;
};

/// Log-spaced table with monotone-cubic log-log interpolation inside the
/// grid and power-law extrapolation beyond it (head slope fitted from the
/// first two points, tail slope given).
class TabulatedDensity {
  public:
    TabulatedDensity(Eigen::ArrayXd grid, Eigen::ArrayXd values, double tail_exponent);

    double density(double x) const;
    double origin_exponent() const { return head_exponent_; }
    double tail_exponent() const { return tail_exponent_; }
    const Eigen::ArrayXd& grid() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    bool nonincreasing() const;

  private:
    Eigen::ArrayXd grid_, values_;
    double tail_exponent_;
    double head_exponent_ = 0.0;
    std::optional<PchipInterpolant> loglog_;  // set when all values are positive
};

/// Positive Radon measure on (0, ∞): atoms + named families + one table.
/// Immutable after construction; all operations are const.
class RadonMeasure {
  public:
    RadonMeasure() = default;  // the zero measure

    static RadonMeasure atom(double x, double m);
    static RadonMeasure stable_tail(double alpha, double scale);
    static RadonMeasure exponential(double rate, double scale);
    static RadonMeasure power_exp(double power, double rate, double scale, double cutoff = kInf);
    static RadonMeasure tabulated(Eigen::ArrayXd grid, Eigen::ArrayXd values, double tail_exponent);
    /// Tabulate fn on an n-point log grid spanning [x_min, x_max].
    static RadonMeasure tabulated_from(const std::function<double(double)>& fn, double x_min,
                                       double x_max, int n, double tail_exponent);

    RadonMeasure merged(const RadonMeasure& other) const;
    RadonMeasure scaled(double c) const;
    /// The pushforward weightings x·μ(dx) and μ(dx)/x, componentwise exact.
    RadonMeasure multiplied_by_x() const;
    RadonMeasure divided_by_x() const;
    /// The measure with density y ↦ μ((y, ∞)); exact for atoms and for the
    /// closed families, tabulated otherwise.
    RadonMeasure tail_function_density() const;
    /// Inverse of tail_function_density: recover ν from a decreasing density
    /// g = ν̄ (so ν = −dg, including atoms at support cutoffs). Requires a
    /// nonincreasing, atom-free representation.
    RadonMeasure differentiated_tail() const;

    bool is_zero() const;
    bool has_atoms() const { return !atoms_.empty(); }
    bool density_nonincreasing() const;  // atom-free and all parts nonincreasing
    double total_density(double x) const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<NamedFamily>& families() const { return families_; }
    const std::optional<TabulatedDensity>& table() const { return table_; }

    std::string to_json() const;
    static RadonMeasure from_json(const std::string& text);

  private:
    std::vector<Atom> atoms_;
    std::vector<NamedFamily> families_;
    std::optional<TabulatedDensity> table_;
    friend struct MeasureAccess;
};

/// ∫ w(x) μ(dx); +∞ decided analytically from origin/tail exponents.
double weighted_mass(const RadonMeasure& mu, WeightKind w);

/// ∫ e^(−qx) μ(dx), q > 0; +∞ when the density is not integrable at 0.
double laplace(const RadonMeasure& mu, double q);

/// ∫ (1 − e^(−qx)) μ(dx); requires weighted_mass(μ, x_min_one) < ∞.
double partial_levy_transform(const RadonMeasure& mu, double q);

/// ∫ (e^(−qx) − 1 + qx) μ(dx); requires weighted_mass(μ, x_min_xsq) < ∞.
double compensated_levy_transform(const RadonMeasure& mu, double q);

/// ∫ x e^(−qx) μ(dx) and ∫ x² e^(−qx) μ(dx) (derivatives of the above).
double laplace_x(const RadonMeasure& mu, double q);
double laplace_xx(const RadonMeasure& mu, double q);

}  // namespace conecalc
