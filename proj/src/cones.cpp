#include "conecalc/cones.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace conecalc {

namespace {

// laplace(μ, q) < ∞ for all q > 0 ⟺ every density part is integrable at the
// origin (exponential kernels absorb any power tail).
bool laplace_always_finite(const RadonMeasure& mu) {
    for (const NamedFamily& f : mu.families())
        if (f.scale > 0.0 && f.origin_exponent() <= -1.0) return false;
    if (mu.table() && mu.table()->origin_exponent() <= -1.0) return false;
    return true;
}

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
}

}  // namespace

CompletelyMonotoneRep::CompletelyMonotoneRep(RadonMeasure mu, double atom_at_zero)
    : mu_(std::move(mu)), atom_at_zero_(atom_at_zero) {
    require_nonnegative(atom_at_zero_, "CompletelyMonotoneRep: constant part");
    if (!laplace_always_finite(mu_))
        throw std::invalid_argument(
            "CompletelyMonotoneRep: Laplace transform diverges for q > 0 (origin exponent <= -1)");
    b1_mass_ = weighted_mass(mu_, WeightKind::one_min_inv);
    decreasing_ = mu_.density_nonincreasing();
}

BernsteinTriple::BernsteinTriple(double a, double b, RadonMeasure levy)
    : a_(a), b_(b), levy_(std::move(levy)) {
    require_nonnegative(a_, "BernsteinTriple: killing rate");
    require_nonnegative(b_, "BernsteinTriple: drift");
    if (std::isinf(weighted_mass(levy_, WeightKind::x_min_one)))
        throw std::invalid_argument("BernsteinTriple: ∫(x∧1)Λ(dx) = ∞");
    decreasing_ = levy_.density_nonincreasing();
}

BranchingTriple::BranchingTriple(double a, double b, RadonMeasure jump)
    : a_(a), b_(b), jump_(std::move(jump)) {
    require_nonnegative(a_, "BranchingTriple: drift");
    require_nonnegative(b_, "BranchingTriple: Gaussian coefficient");
    if (std::isinf(weighted_mass(jump_, WeightKind::x_min_xsq)))
        throw std::invalid_argument("BranchingTriple: ∫(x∧x²)Π(dx) = ∞");
}

double eval_cm(const CompletelyMonotoneRep& f, double q) {
    return f.atom_at_zero() + laplace(f.measure(), q);
}

double eval_bernstein(const BernsteinTriple& phi, double q) {
    return phi.a() + phi.b() * q + partial_levy_transform(phi.levy(), q);
}

double eval_branching(const BranchingTriple& psi, double q) {
    return psi.a() * q + psi.b() * q * q + compensated_levy_transform(psi.jump(), q);
}

double eval_bernstein_prime(const BernsteinTriple& phi, double q) {
    return phi.b() + laplace_x(phi.levy(), q);
}

double eval_branching_prime(const BranchingTriple& psi, double q) {
    // d/dq ∫(e^{-qx}-1+qx)Π(dx) = ∫x(1-e^{-qx})Π(dx)
    return psi.a() + 2.0 * psi.b() * q +
           partial_levy_transform(psi.jump().multiplied_by_x(), q);
}

double eval_branching_second(const BranchingTriple& psi, double q) {
    return 2.0 * psi.b() + laplace_xx(psi.jump(), q);
}

BernsteinTriple derivative_map(const BranchingTriple& psi) {
    return {psi.a(), 2.0 * psi.b(), psi.jump().multiplied_by_x()};
}

CompletelyMonotoneRep derivative_map(const BernsteinTriple& phi) {
    return CompletelyMonotoneRep(phi.levy().multiplied_by_x(), phi.b());
}

BernsteinTriple integral_map(const CompletelyMonotoneRep& f, double killing_at_zero) {
    // I(f)(q) = a0 + atom0·q + ∫(1-e^{-qx}) μ(dx)/x; B₂ needs ∫(x∧1)(μ/x) =
    // ∫(1∧x⁻¹)μ < ∞, which is exactly membership in B₁.
    if (!f.in_b1())
        throw std::domain_error("integral_map: input not in B1 (∫(1∧x⁻¹)μ(dx) = ∞)");
    return {killing_at_zero, f.atom_at_zero(), f.measure().divided_by_x()};
}

BranchingTriple integral_map(const BernsteinTriple& phi) {
    return {phi.a(), 0.5 * phi.b(), phi.levy().divided_by_x()};
}

BernsteinTriple divide_by_q(const BranchingTriple& psi) {
    return {psi.a(), psi.b(), psi.jump().tail_function_density()};
}

CompletelyMonotoneRep divide_by_q(const BernsteinTriple& phi) {
    if (phi.a() != 0.0)
        throw std::domain_error(
            "divide_by_q: killing rate must vanish (lim_{q→0} Φ(q) = 0 required)");
    return CompletelyMonotoneRep(phi.levy().tail_function_density(), phi.b());
}

BranchingTriple mul_by_q(const BernsteinTriple& g) {
    if (!g.decreasing_density())
        throw std::domain_error("mul_by_q: input must be in B₂↓ (decreasing Lévy density)");
    return {g.a(), g.b(), g.levy().differentiated_tail()};
}

BernsteinTriple mul_by_q(const CompletelyMonotoneRep& g) {
    if (!g.decreasing_density())
        throw std::domain_error("mul_by_q: input must be in B₁↓ (decreasing density)");
    return {0.0, g.atom_at_zero(), g.measure().differentiated_tail()};
}

CompletelyMonotoneRep scale_add(const CompletelyMonotoneRep& f, double c1,
                                const CompletelyMonotoneRep& g, double c2) {
    return CompletelyMonotoneRep(f.measure().scaled(c1).merged(g.measure().scaled(c2)),
                                 c1 * f.atom_at_zero() + c2 * g.atom_at_zero());
}

BernsteinTriple scale_add(const BernsteinTriple& f, double c1, const BernsteinTriple& g,
                          double c2) {
    return {c1 * f.a() + c2 * g.a(), c1 * f.b() + c2 * g.b(),
            f.levy().scaled(c1).merged(g.levy().scaled(c2))};
}

BranchingTriple scale_add(const BranchingTriple& f, double c1, const BranchingTriple& g,
                          double c2) {
    return {c1 * f.a() + c2 * g.a(), c1 * f.b() + c2 * g.b(),
            f.jump().scaled(c1).merged(g.jump().scaled(c2))};
}

namespace {

std::string triple_json(const char* cone, double a, double b, const RadonMeasure& mu) {
    nlohmann::ordered_json j;
    j["cone"] = cone;
    j["a"] = a;
    j["b"] = b;
    j["measure"] = nlohmann::json::parse(mu.is_zero() && mu.atoms().empty() &&
                                                 mu.families().empty() && !mu.table()
                                             ? std::string("{\"atoms\":[]}")
                                             : mu.to_json());
    return j.dump();
}

struct ParsedTriple {
    std::string cone;
    double a, b;
    RadonMeasure mu;
};

ParsedTriple parse_triple(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("triple: bad JSON: ") + e.what());
    }
    ParsedTriple out;
    out.cone = j.at("cone").get<std::string>();
    out.a = j.value("a", 0.0);
    out.b = j.value("b", 0.0);
    if (j.contains("measure") && !j["measure"].empty())
        out.mu = RadonMeasure::from_json(j["measure"].dump());
    return out;
}

}  // namespace

std::string to_json(const BernsteinTriple& phi) {
    return triple_json("B2", phi.a(), phi.b(), phi.levy());
}
std::string to_json(const BranchingTriple& psi) {
    return triple_json("B3", psi.a(), psi.b(), psi.jump());
}
std::string to_json(const CompletelyMonotoneRep& f) {
    return triple_json("CM", f.atom_at_zero(), 0.0, f.measure());
}

BernsteinTriple bernstein_from_json(const std::string& text) {
    ParsedTriple t = parse_triple(text);
    if (t.cone != "B2") throw std::invalid_argument("bernstein_from_json: cone must be B2");
    return {t.a, t.b, std::move(t.mu)};
}

BranchingTriple branching_from_json(const std::string& text) {
    ParsedTriple t = parse_triple(text);
    if (t.cone != "B3") throw std::invalid_argument("branching_from_json: cone must be B3");
    return {t.a, t.b, std::move(t.mu)};
}

CompletelyMonotoneRep cm_from_json(const std::string& text) {
    ParsedTriple t = parse_triple(text);
    if (t.cone != "CM") throw std::invalid_argument("cm_from_json: cone must be CM");
    return CompletelyMonotoneRep(std::move(t.mu), t.a);
}

}  // namespace conecalc
