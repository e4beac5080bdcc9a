#pragma once

#include <optional>
#include <vector>

#include "motint/common.hpp"

namespace motint {

/// Dense univariate polynomial with integer coefficients, c[i] is the
/// coefficient of X^i. The zero polynomial has an empty coefficient vector.
class ZPoly {
  public:
    ZPoly() = default;
    explicit ZPoly(std::vector<Int> coeffs);
    static ZPoly constant(const Int& c);
    static ZPoly monomial(const Int& c, size_t deg);

    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; }  // -1 for 0
    const Int& coeff(size_t i) const;
    const Int& lead() const;
    const std::vector<Int>& coeffs() const { return c_; }

    ZPoly operator+(const ZPoly& o) const;
    ZPoly operator-(const ZPoly& o) const;
    ZPoly operator*(const ZPoly& o) const;
    ZPoly operator-() const;
    bool operator==(const ZPoly& o) const { return c_ == o.c_; }

    ZPoly mul_scalar(const Int& k) const;
    ZPoly mul_xk(size_t k) const;  // multiply by X^k

    Rat eval(const Rat& x) const;
    Int eval_int(const Int& x) const;

    /// Largest k with X^k dividing this (0 for the zero polynomial).
    size_t low_order() const;
    ZPoly div_xk(size_t k) const;

    /// Exact division; returns nothing when the division has a remainder.
    std::optional<ZPoly> div_exact(const ZPoly& d) const;

    ZPoly derivative() const;

    std::string str(const std::string& var = "L") const;

  private:
    void trim();
    std::vector<Int> c_;
};

/// Decides whether p(x) >= 0 for every real x > 1, by Sturm-sequence root
/// isolation of the squarefree part on (1, bound] plus gap sampling. When the
/// answer is no and witness is non-null, *witness receives a rational q > 1
/// with p(q) < 0.
bool poly_nonneg_beyond_one(const ZPoly& p, Rat* witness);

}  // namespace motint
