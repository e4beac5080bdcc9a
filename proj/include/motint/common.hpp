#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace motint {

using Int = mpz_class;
using Rat = mpq_class;

/// Raised when a summation/integration target fails the integrability
/// criterion; carries a human-readable diagnosis of the offending cell.
struct NotIntegrable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on invalid arguments (q <= 1, evaluation off the congruence
/// domain, base mismatches, and the like).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Floor division (rounds toward minus infinity).
inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

/// a mod b with result in [0, |b|).
inline Int mod_pos(const Int& a, const Int& b) {
    Int r, m = abs(b);
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

/// q^e for integer e of either sign (q != 0 when e < 0).
Rat pow_rat(const Rat& q, long e);

/// Exact conversion helpers; throw DomainError when the value does not fit.
long to_long(const Int& a);
Int to_int(const Rat& q);  // requires denominator 1

}  // namespace motint
