#pragma once

#include "motint/cpfun.hpp"
#include "motint/groth.hpp"

namespace motint {

/// One graded term of a constructible motivic function: a residue-field
/// class tensored with a Presburger-constructible function. The grade is
/// the valued-field dimension bucket; sums never mix grades silently.
struct MotTerm {
    GrothClass cls;
    CPFunction pres;
    int grade = 0;
};

struct MotFunction {
    std::vector<MotTerm> terms;

    static MotFunction zero() { return {}; }
    static MotFunction from_class(const GrothClass& c, int grade = 0);
    static MotFunction from_cpf(const CPFunction& f, int grade = 0);
    static MotFunction term(const GrothClass& c, const CPFunction& f, int grade = 0);
    static MotFunction constant(const MotNum& c);

    MotFunction operator+(const MotFunction& o) const;
    MotFunction operator*(const MotFunction& o) const;  // grades add
    MotFunction scale(const MotNum& k) const;
    MotFunction operator-() const { return scale(-MotNum::from_int(Int(1))); }
    MotFunction operator-(const MotFunction& o) const { return *this + (-o); }

    /// Inverse image along a base map: Z-coordinates are substituted
    /// simultaneously by the given affine forms, ac-coordinates renamed.
    MotFunction pullback(const std::map<std::string, LinFn>& zmap,
                         const std::map<std::string, std::string>& ac_rename = {}) const;

    /// Projection along residue coordinates: the listed ac-parameters become
    /// bound variables of the classes. Errors if one leaks into a
    /// Presburger part.
    MotFunction push_residue(const std::vector<std::string>& ac_names) const;

    /// Projection along Z-variables: termwise summation; throws
    /// NotIntegrable naming the offending term and cell.
    MotFunction push_z(const std::vector<std::string>& zvars) const;

    /// Extension by zero onto a larger base.
    MotFunction push_inclusion(const FPtr& guard) const;

    /// Formal difference of two positive functions.
    static MotFunction ring_version(const MotFunction& plus, const MotFunction& minus);

    /// Merge terms with the same grade and normalized class; pure-number
    /// classes fold into the Presburger coefficient.
    MotFunction compact() const;

    /// Three-valued equality: 1 equal, 0 provably different, -1 unknown.
    int is_equal(const MotFunction& o) const;

    bool is_zero_function() const { return is_equal(zero()) == 1; }

    /// Fully reduced constant value (throws when variables or symbolic
    /// classes remain; symbols are allowed if they cancel).
    MotNum as_motnum() const;
    /// Constant in the Z-variables: value as a class.
    GrothClass as_class() const;

    /// Specialization L -> p with exhaustive point counts, at a base point.
    Rat theta_count(long p, const Env& env) const;

    std::vector<std::string> zvars() const;
    std::string str() const;
    std::string to_json() const;
};

/// Poincare series of a family over the listed Z-variable: sum over n of the
/// slice values times T^n. Classes must reduce to numbers.
RationalSeries poincare_series(const MotFunction& family, const std::string& nvar);

}  // namespace motint
