#pragma once

#include <optional>

#include "motint/motnum.hpp"

namespace motint {

/// Monomial: variable -> positive exponent.
using Mono = std::map<std::string, long>;

/// Multivariate polynomial with rational coefficients over named variables.
class MPoly {
  public:
    MPoly() = default;
    static MPoly constant(const Rat& c);
    static MPoly var(const std::string& v);

    bool is_zero() const { return c_.empty(); }
    bool is_constant() const;
    Rat constant_value() const;  // requires is_constant

    MPoly operator+(const MPoly& o) const;
    MPoly operator-(const MPoly& o) const;
    MPoly operator*(const MPoly& o) const;
    MPoly operator-() const;
    bool operator==(const MPoly& o) const { return c_ == o.c_; }
    bool operator<(const MPoly& o) const { return c_ < o.c_; }

    std::vector<std::string> vars() const;
    bool depends_on(const std::string& v) const;
    long degree_in(const std::string& v) const;
    /// Coefficient of v^d as a polynomial in the remaining variables.
    MPoly coeff_of(const std::string& v, long d) const;
    MPoly subst(const std::string& v, const MPoly& repl) const;
    MPoly rename(const std::string& v, const std::string& w) const;

    /// Integer-primitive scalar multiple with a deterministic sign; equal up
    /// to a nonzero rational factor iff identical after this.
    MPoly primitive() const;

    /// Value modulo p; variables read from env, rational denominators
    /// inverted mod p (throws DomainError when p divides one).
    long eval_mod(long p, const std::map<std::string, long>& env) const;

    std::string str() const;
    /// Parser for the shared text syntax: + - * ^ ( ) identifiers integers.
    static MPoly parse(const std::string& text);

    const std::map<Mono, Rat>& coeffs() const { return c_; }

  private:
    void trim();
    std::map<Mono, Rat> c_;
};

/// One generator of the class semiring: a product of named symbols and a
/// residue-variable polynomial system, with some variables coupled to named
/// angular-component coordinates of the base ("params": free, not counted).
struct GrothGen {
    std::vector<std::string> names;             // sorted symbol multiset
    std::vector<std::string> vars;              // bound residue variables
    std::vector<MPoly> eqs, neqs;               // system: eq = 0, neq != 0
    std::map<std::string, std::string> params;  // free var -> base ac-coordinate

    void canon();  // primitive-scale and sort the system
    /// Canonical identity key; bound variables are matched up to renaming.
    std::string key() const;
    /// Same, for the system portion only (names excluded) — rule matching.
    std::string system_key() const;
    std::string str() const;
};

/// Formal MotNum-combination of generators. Signed coefficients are allowed
/// so scissor splits and formal differences stay inside one type.
struct GrothClass {
    std::vector<std::pair<MotNum, GrothGen>> terms;

    static GrothClass zero() { return {}; }
    static GrothClass num(const MotNum& c);
    static GrothClass one() { return num(MotNum::from_int(Int(1))); }
    static GrothClass symbol(const std::string& name);
    static GrothClass from_system(std::vector<std::string> vars, std::vector<MPoly> eqs,
                                  std::vector<MPoly> neqs,
                                  std::map<std::string, std::string> params = {});

    GrothClass operator+(const GrothClass& o) const;
    GrothClass operator*(const GrothClass& o) const;  // fiber product over the base
    GrothClass scale(const MotNum& k) const;
    GrothClass operator-() const { return scale(-MotNum::from_int(Int(1))); }
    GrothClass operator-(const GrothClass& o) const { return *this + (-o); }

    /// Apply elimination, scissor splits, built-in identities and declared
    /// rules to fixpoint; deterministic order.
    GrothClass normalized() const;

    /// Three-valued equality after normalization: 1 equal, 0 unequal,
    /// -1 unknown (symbolic generators block the verdict).
    int is_equal(const GrothClass& o) const;

    bool is_symbol_free() const;  // every normalized term is a pure number
    /// The MotNum value when fully reduced (throws otherwise).
    MotNum as_motnum() const;

    /// L -> p specialization with exhaustive point counting; named symbols
    /// resolve through presentations recorded by declare_class_eq.
    Rat count_eval(long p) const;

    std::vector<std::string> ac_params() const;  // base ac names referenced
    /// Bind the params coupled to the listed ac-coordinates as bound
    /// variables of the systems (projection along residue coordinates).
    GrothClass bind_params(const std::vector<std::string>& ac_names) const;
    GrothClass rename_param(const std::string& from, const std::string& to) const;

    std::string str() const;
    std::string to_json() const;
};

/// Register "this presentation denotes that class"; returns the rule id.
/// A second declaration for the same presentation must agree or it throws.
int declare_class_eq(const GrothGen& pattern, const GrothClass& value);
long rule_table_version();
std::string rule_table_hash();
void clear_rules();  // test isolation

/// Exhaustive solution count of a generator's system over the p-element
/// field (p prime <= 101, at most 4 bound variables, no params or symbols).
long count_points(const GrothGen& g, long p);

}  // namespace motint
