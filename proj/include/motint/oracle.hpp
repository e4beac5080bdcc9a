#pragma once

#include "motint/valfield.hpp"

namespace motint {

/// Parameters of the independent numeric verifiers.
struct OracleConfig {
    std::vector<Rat> qs = {Rat(2), Rat(3)};  // specialization points q > 1
    std::vector<long> primes = {3, 5};       // specialization primes
    long box = 40;                           // summation radius B
    long depth = 8;                          // t-adic truncation N
    Rat tol = Rat(1, 1000000);               // relative tolerance
};

/// Truncated evaluation of theta_q of a Presburger sum.
struct NumericSum {
    Rat value;                  // sum over the box [-B, B]^k
    Rat tail_bound;             // certified geometric bound on the remainder
    bool converged = false;     // tail bound obtained (decaying shells)
    std::vector<Rat> partials;  // absolute partial sums at growing radii
};

/// theta_q of phi at a single point (exact rational arithmetic).
Rat theta_at(const CPFunction& phi, const Env& env, const Rat& q);

/// Sum theta_q(phi) over Z-tuples of `zvars` in the box, with a tail bound
/// from the decay ratio of the outer shells. Additional free variables are
/// bound by env. In the divergent case `converged` stays false and
/// `partials` documents the growth.
NumericSum numeric_sum(const CPFunction& phi, const std::vector<std::string>& zvars,
                       const Rat& q, const Env& env = {}, const OracleConfig& cfg = {});

/// Exact measure of the described subset of t^lo * (Z/p)[t]/t^(lo+N) as
/// count * p^(-(lo+N)): enumerates all residue vectors with exponents in
/// [lo, lo+N). Centers need p-integral coefficients supported on [lo, lo+N).
/// Exact for finite unions of balls and annuli with level constants below
/// lo+N; order congruences must be capped by an order bound below lo+N.
Rat padic_measure(const ValDesc& desc, long p, long N, long lo = 0);

/// One comparison row of a verification report.
struct CheckItem {
    std::string target;      // name of the quantity under test
    std::string method;      // "theta_q truncated sum" / "residue count" / ...
    std::string parameters;  // e.g. "q=2 B=40" or "p=5 N=8"
    std::string expected;    // symbolic side, specialized
    std::string observed;    // independent numeric side
    std::string verdict;     // "match" or "mismatch"
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckItem> items;
    bool all_pass() const;
    std::string to_json() const;
    std::string str() const;
};

/// Compare theta_q of the symbolic sum `mu` against the truncated numeric
/// sum of `phi` over `zvars`, at every q of the config.
CheckReport check_sum(const std::string& target, const CPFunction& mu, const CPFunction& phi,
                      const std::vector<std::string>& zvars, const Env& env = {},
                      const OracleConfig& cfg = {});

/// Compare the L -> p specialization of a measure (classes resolved by
/// exhaustive point counts) against the exact residue-ring count of the
/// description, at every prime of the config. Exact equality required.
CheckReport check_measure(const std::string& target, const MotFunction& result,
                          const ValDesc& desc, const OracleConfig& cfg = {}, long lo = 0);

/// Record a single externally computed comparison.
CheckItem check_value(const std::string& target, const std::string& method,
                      const std::string& parameters, const Rat& expected, const Rat& observed,
                      const Rat& tol = Rat(0));

}  // namespace motint
