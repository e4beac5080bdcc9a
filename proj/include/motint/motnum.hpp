#pragma once

#include <map>
#include <string>

#include "motint/poly.hpp"

namespace motint {

/// Element of the ring Z[L, L^-1, (1 - L^-i)^-1], stored as
///   numerator / (L^shift * prod_i (L^i - 1)^m_i).
/// Canonical form: the numerator has a nonzero constant coefficient (powers
/// of L are folded into shift) and is not exactly divisible by any (L^i - 1)
/// present in the denominator. The representation is not unique across
/// different denominator bases, so equality cross-multiplies.
class MotNum {
  public:
    MotNum() = default;  // zero
    static MotNum from_int(const Int& n);
    static MotNum from_poly(ZPoly num);  // polynomial in L
    static MotNum L_power(long k);
    /// 1 / (1 - L^-i) = L^i / (L^i - 1), i >= 1.
    static MotNum inv_one_minus_L_neg(long i);
    /// 1 / (1 - L^a) for a != 0 (either sign).
    static MotNum inv_one_minus_L(long a);
    static MotNum make(ZPoly num, long shift, std::map<long, long> factors);

    bool is_zero() const { return num_.is_zero(); }
    MotNum operator+(const MotNum& o) const;
    MotNum operator-(const MotNum& o) const;
    MotNum operator*(const MotNum& o) const;
    MotNum operator-() const;
    MotNum pow(long e) const;  // e >= 0
    bool operator==(const MotNum& o) const;
    bool operator!=(const MotNum& o) const { return !(*this == o); }

    /// Ring morphism L -> q, q > 1 (exact rational arithmetic).
    Rat theta(const Rat& q) const;

    /// Membership in A_+: theta_q >= 0 for every real q > 1. On rejection a
    /// rational witness q with theta_q < 0 is written when requested.
    bool is_nonneg(Rat* witness = nullptr) const;

    const ZPoly& num() const { return num_; }
    long shift() const { return shift_; }
    const std::map<long, long>& factors() const { return factors_; }

    std::string str() const;
    std::string to_json() const;
    static MotNum parse(const std::string& text);  // text or JSON form

    /// Total order surrogate for use as a map key (representation order).
    bool same_rep(const MotNum& o) const;

  private:
    void canonicalize();
    ZPoly denom_poly() const;  // prod (L^i - 1)^m, ignoring the L^shift part
    ZPoly num_;
    long shift_ = 0;
    std::map<long, long> factors_;
};

inline MotNum operator*(const Int& k, const MotNum& a) { return MotNum::from_int(k) * a; }

}  // namespace motint
