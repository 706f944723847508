#pragma once

#include <string>

#include "conecalc/measure.hpp"

namespace conecalc {

/// f(q) = atom_at_zero + ∫ e^(−qx) μ(dx); the CM cone, with the B₁
/// integrability mass and the decreasing-density (B₁↓) flag recorded at
/// construction.
class CompletelyMonotoneRep {
  public:
    explicit CompletelyMonotoneRep(RadonMeasure mu, double atom_at_zero = 0.0);

    const RadonMeasure& measure() const { return mu_; }
    double atom_at_zero() const { return atom_at_zero_; }
    double b1_weighted_mass() const { return b1_mass_; }  // ∫(1∧x⁻¹)μ, may be +inf
    bool in_b1() const { return std::isfinite(b1_mass_); }
    bool decreasing_density() const { return decreasing_; }  // B₁↓
    bool is_zero() const { return atom_at_zero_ == 0.0 && mu_.is_zero(); }

  private:
    RadonMeasure mu_;
    double atom_at_zero_;
    double b1_mass_;
    bool decreasing_;
};

/// Φ(q) = a + bq + ∫(1−e^(−qx))Λ(dx); a = killing rate, b = drift.
class BernsteinTriple {
  public:
    BernsteinTriple(double a, double b, RadonMeasure levy);

    double a() const { return a_; }  // killing rate
    double b() const { return b_; }  // drift
    const RadonMeasure& levy() const { return levy_; }
    bool decreasing_density() const { return decreasing_; }  // B₂↓
    bool is_zero() const { return a_ == 0.0 && b_ == 0.0 && levy_.is_zero(); }

  private:
    double a_, b_;
    RadonMeasure levy_;
    bool decreasing_;
};

/// Ψ(q) = aq + bq² + ∫(e^(−qx)−1+qx)Π(dx); a = drift, 2b = Gaussian
/// coefficient.
class BranchingTriple {
  public:
    BranchingTriple(double a, double b, RadonMeasure jump);

    double a() const { return a_; }  // drift
    double b() const { return b_; }  // half the Gaussian coefficient
    const RadonMeasure& jump() const { return jump_; }
    bool is_zero() const { return a_ == 0.0 && b_ == 0.0 && jump_.is_zero(); }

  private:
    double a_, b_;
    RadonMeasure jump_;
};

double eval_cm(const CompletelyMonotoneRep& f, double q);
double eval_bernstein(const BernsteinTriple& phi, double q);
double eval_branching(const BranchingTriple& psi, double q);

/// Analytic derivatives through the representations.
double eval_bernstein_prime(const BernsteinTriple& phi, double q);
double eval_branching_prime(const BranchingTriple& psi, double q);
double eval_branching_second(const BranchingTriple& psi, double q);

/// Ψ ↦ Ψ' as a triple: (a, b, Π) → (a, 2b, x·Π(dx)).
BernsteinTriple derivative_map(const BranchingTriple& psi);
/// Φ ↦ Φ' as a CM rep: (a, b, Λ) → atom_at_zero = b, μ = x·Λ(dx).
CompletelyMonotoneRep derivative_map(const BernsteinTriple& phi);

/// Primitives I(f)(q) = ∫₀^q f; exact inverses of the derivative maps on
/// triples. The killing rate of the B₂ output (lost by differentiation) is
/// supplied by the caller.
BernsteinTriple integral_map(const CompletelyMonotoneRep& f, double killing_at_zero = 0.0);
BranchingTriple integral_map(const BernsteinTriple& phi);

/// g = f / Id with the tail-function density output (Proposition 2 shape);
/// the j = 2 direction requires a = 0.
BernsteinTriple divide_by_q(const BranchingTriple& psi);
CompletelyMonotoneRep divide_by_q(const BernsteinTriple& phi);

/// f = Id · g, inverse of divide_by_q: differentiate the tail back.
BranchingTriple mul_by_q(const BernsteinTriple& g);
BernsteinTriple mul_by_q(const CompletelyMonotoneRep& g);

CompletelyMonotoneRep scale_add(const CompletelyMonotoneRep& f, double c1,
                                const CompletelyMonotoneRep& g, double c2);
BernsteinTriple scale_add(const BernsteinTriple& f, double c1, const BernsteinTriple& g,
                          double c2);
BranchingTriple scale_add(const BranchingTriple& f, double c1, const BranchingTriple& g,
                          double c2);

/// Triple JSON: {"cone":"B2"|"B3"|"CM","a":..,"b":..,"measure":{...}}
/// (for CM, "a" is the constant part and "b" is unused).
std::string to_json(const BernsteinTriple& phi);
std::string to_json(const BranchingTriple& psi);
std::string to_json(const CompletelyMonotoneRep& f);
BernsteinTriple bernstein_from_json(const std::string& text);
BranchingTriple branching_from_json(const std::string& text);
CompletelyMonotoneRep cm_from_json(const std::string& text);

}  // namespace conecalc
