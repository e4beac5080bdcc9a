#pragma once

#include <optional>

#include "motint/motnum.hpp"
#include "motint/presburger.hpp"

namespace motint {

/// One term of a constructible Presburger function:
///   coeff * prod(factors) * L^exp on the support set.
struct CPTerm {
    MotNum coeff;
    std::vector<LinFn> factors;  // integer-valued linear functions
    LinFn exp;                   // exponent of L, integer-valued on support
    FPtr support = f_true();

    std::string str() const;
};

/// Finite sum of CPTerms; the function S x Z^r -> A sending a point to the
/// sum of its active terms. Variable roles (base vs summation) are chosen by
/// the operation invoked, not stored.
struct CPFunction {
    std::vector<CPTerm> terms;

    static CPFunction zero() { return {}; }
    static CPFunction constant(const MotNum& c);
    static CPFunction term(MotNum coeff, std::vector<LinFn> factors, LinFn exp,
                           FPtr support = f_true());

    MotNum eval(const Env& env) const;
    CPFunction operator+(const CPFunction& o) const;
    CPFunction operator*(const CPFunction& o) const;  // pointwise product
    CPFunction scale(const MotNum& k) const;
    CPFunction subst(const std::string& v, const LinFn& repl) const;  // pullback
    CPFunction restrict(const FPtr& guard) const;

    /// Combine syntactically identical terms and drop zero ones.
    CPFunction compact() const;

    /// Three-valued zero test: 1 = identically zero, 0 = provably nonzero,
    /// -1 = unknown. Sound in both definite directions.
    int known_zero() const;

    /// When the function involves no variables, its constant value.
    MotNum as_motnum() const;

    std::vector<std::string> vars() const;
    std::string str() const;
    std::string to_json() const;
};

// ---------------------------------------------------------------------------
// Rational generating series with denominators prod (1 - L^a T^b).

struct RSTerm {
    MotNum c;                    // numeric multiplier
    std::vector<LinFn> factors;  // over the remaining (base) variables
    LinFn lexp;                  // L-exponent
    std::vector<LinFn> texp;     // per-T-variable exponent of the numerator monomial
    std::vector<int> eps;        // per-T-variable sign sector (+1 / -1)
    FPtr support = f_true();
    // denominator factor (1 - L^a T^bvec) -> multiplicity; the flag records
    // whether the factor came from an unbounded summation direction (only
    // those decide membership in the summable sector)
    std::map<std::tuple<long, std::vector<long>, bool>, long> denom;
    bool entire = false;  // came from a bounded range; cancels to a T-polynomial

    std::string str(const std::vector<std::string>& tvars) const;
};

struct RationalSeries {
    std::vector<std::string> tvars;  // formal variable names (T per summed coordinate)
    std::vector<RSTerm> terms;

    std::string str() const;
    std::string to_json() const;
};

/// All infinite-direction denominator factors have a < 0 (the summability
/// sector); bounded-range fractions are entire and do not count.
bool in_sigma(const RationalSeries& s);

/// Closed form of sum_{n >= a} P(n) T^n via iterated difference operators.
RationalSeries sum_poly_geometric(const ZPoly& P, long a);

/// Closed form for a |-> sum_{0 <= i <= a, i = c mod n} i^b as a constructible
/// function of the variable "a" (valid on a >= 0).
CPFunction power_sum_closed(long b, long c, long n);

/// Sum phi over the listed Z-variables (summed innermost-last, i.e. the last
/// listed variable is eliminated first). Throws NotIntegrable with a cell
/// diagnosis when the criterion fails.
CPFunction mu_sum(const CPFunction& phi, const std::vector<std::string>& zvars);

/// Iterated-summation integrability test; equivalent to the L-degree
/// criterion (negative L-slope along every unbounded cell direction).
bool is_integrable(const CPFunction& phi, const std::vector<std::string>& zvars,
                   std::string* diag = nullptr);

/// Mellin transform over up to two Z-variables.
RationalSeries mellin(const CPFunction& phi, const std::vector<std::string>& zvars);

/// Coefficient of T^idx; requires constant numerator T-exponents.
CPFunction coeff_extract(const RationalSeries& s, const std::vector<Int>& idx);

}  // namespace motint
