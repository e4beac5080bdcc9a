#pragma once

#include <optional>

#include "motint/motfn.hpp"

namespace motint {

/// Finite Laurent polynomial over Q in the uniformizer t; the explicit
/// center values of one-variable cells.
class SeriesPoint {
  public:
    SeriesPoint() = default;
    static SeriesPoint constant(const Rat& c);
    static SeriesPoint t_power(long k, const Rat& c = Rat(1));

    bool is_zero() const { return c_.empty(); }
    /// Least exponent with nonzero coefficient; nullopt encodes +infinity.
    std::optional<long> ord() const;
    /// Leading coefficient; ac(0) = 0.
    Rat ac() const;
    Rat coeff(long k) const;
    const std::map<long, Rat>& coeffs() const { return c_; }

    SeriesPoint operator+(const SeriesPoint& o) const;
    SeriesPoint operator-(const SeriesPoint& o) const;
    SeriesPoint operator-() const;
    SeriesPoint operator*(const SeriesPoint& o) const;
    bool operator==(const SeriesPoint& o) const { return c_ == o.c_; }
    bool operator<(const SeriesPoint& o) const { return c_ < o.c_; }

    bool integer_coeffs() const;

    /// Literal syntax: `1 + 2*t^-1 + t^3`, `0`, `t`.
    static SeriesPoint parse(const std::string& text);
    std::string str() const;

  private:
    void trim();
    std::map<long, Rat> c_;
};

/// Boolean description of a subset of the valued line by atoms over
/// explicit centers: ord comparisons, congruences on ord, ac pins, and
/// point membership.
struct ValDesc {
    enum Kind { TRUE_K, ORD_GE, ORD_LE, ORD_EQ, ORD_MOD, AC_EQ, POINT, AND, OR, NOT } kind;
    SeriesPoint center;
    LinFn bound;  // ord threshold, possibly over base Z-variables
    Int c, n;     // congruence data for ORD_MOD
    Rat acval;    // pinned angular component (nonzero)
    std::vector<ValDesc> kids;

    std::string str() const;
};

ValDesc vd_true();
ValDesc vd_ord_ge(const SeriesPoint& c, const LinFn& v);  // ord(x - c) >= v
ValDesc vd_ord_le(const SeriesPoint& c, const LinFn& v);
ValDesc vd_ord_eq(const SeriesPoint& c, const LinFn& v);
ValDesc vd_ord_mod(const SeriesPoint& c, const Int& r, const Int& n);
ValDesc vd_ac_eq(const SeriesPoint& c, const Rat& xi);  // xi != 0
ValDesc vd_point(const SeriesPoint& c);                 // x = c
ValDesc vd_and(std::vector<ValDesc> kids);
ValDesc vd_or(std::vector<ValDesc> kids);
ValDesc vd_not(ValDesc k);

/// One cell of a decomposition: a 0-cell is the single point `center`; a
/// 1-cell is the family {ord(x - center) = ivar, ac(x - center) = eta}
/// over the constraint, with eta either pinned or ranging over the
/// multiplicative group minus the excluded directions.
struct ValCell {
    int kind = 1;  // 0 or 1; equals the grade
    SeriesPoint center;
    std::string ivar = "i";    // order variable (1-cells)
    std::string acvar = "eta"; // angular parameter name (1-cells, free ac)
    FPtr constraint = f_true();
    std::optional<Rat> ac_pin;
    std::vector<Rat> ac_excluded;

    bool contains(const SeriesPoint& x, const Env& base) const;
    std::string str() const;
    std::string to_json() const;
};

/// Decompose the described set into disjoint cells over the ultrametric
/// tree of its centers. Deterministic traversal order.
std::vector<ValCell> annulus_decompose(const ValDesc& desc);

/// Integral over the valued-field variable of a 1-cell: pushes
/// L^(-ivar-1) * psi along the angular parameter and the order variable.
/// psi lives on the basis and may reference the cell's ac parameter.
MotFunction integrate_1cell(const ValCell& cell, const MotFunction& psi);

/// 0-cell integral: psi * L^gamma with gamma the projection's Jacobian
/// order, pushed along the residue parameters; grade preserved at 0.
MotFunction integrate_0cell(const ValCell& cell, const MotFunction& psi,
                            const LinFn& gamma = LinFn());

/// Affine map x -> a*x + b of the valued-field variable.
struct AffineMap {
    SeriesPoint a, b;
    SeriesPoint apply(const SeriesPoint& x) const;
    AffineMap after(const AffineMap& inner) const;  // this o inner
    AffineMap inverse() const;
};

/// Order of the derivative; constant for affine maps. Throws on a = 0.
long ordjac(const AffineMap& f);

/// Image cell of a cell under an affine map.
ValCell cell_image(const AffineMap& f, const ValCell& cell);

struct CVReport {
    MotFunction lhs, rhs;  // mu(image) and mu(L^(-ordjac) pullback)
    int verdict;           // 1 equal, 0 different, -1 unknown
};

/// Change-of-variable identity check on a cell list.
CVReport change_of_variable(const AffineMap& f, const std::vector<ValCell>& cells,
                            const MotFunction& phi);

/// Motivic measure of a described set (or an explicit cell list) weighted
/// by phi; points are null sets in dimension one.
MotFunction measure(const ValDesc& desc, const MotFunction& phi);
MotFunction measure(const std::vector<ValCell>& cells, const MotFunction& phi);

}  // namespace motint
