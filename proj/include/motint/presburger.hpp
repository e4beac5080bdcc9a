#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "motint/common.hpp"

namespace motint {

using Env = std::map<std::string, Int>;

/// Affine form sum_v a_v * v + b with rational coefficients. Wherever a LinFn
/// appears in a cell or function term, the surrounding congruence constraints
/// guarantee the value is an integer; eval() enforces that at runtime. This
/// realizes the S-linear shape sum a_i (x_i - c_i)/n_i + gamma: the triple
/// (a_i, c_i, n_i) corresponds to coefficient a_i/n_i here, with the residue
/// data carried by the cell.
class LinFn {
  public:
    LinFn() : b_(0) {}
    static LinFn constant(const Rat& c);
    static LinFn constant(long c) { return constant(Rat(c)); }
    static LinFn var(const std::string& v, const Rat& coeff = Rat(1));

    LinFn operator+(const LinFn& o) const;
    LinFn operator-(const LinFn& o) const;
    LinFn operator-() const;
    LinFn operator*(const Rat& k) const;
    bool operator==(const LinFn& o) const { return a_ == o.a_ && b_ == o.b_; }

    /// Exact rational value (no integrality requirement).
    Rat eval_rat(const Env& env) const;
    /// Integer value; throws DomainError off the congruence domain.
    Int eval(const Env& env) const;

    bool is_constant() const { return a_.empty(); }
    bool depends_on(const std::string& v) const { return a_.count(v) > 0; }
    const Rat& coeff(const std::string& v) const;
    const Rat& constant_part() const { return b_; }
    const std::map<std::string, Rat>& coeffs() const { return a_; }

    /// lcm of all coefficient denominators (including the constant's).
    Int denom() const;

    LinFn subst(const std::string& v, const LinFn& repl) const;
    LinFn drop(const std::string& v) const;  // erase v's coefficient

    std::string str() const;
    bool operator<(const LinFn& o) const;  // deterministic ordering

  private:
    void trim();
    std::map<std::string, Rat> a_;
    Rat b_;
};

struct Formula;
using FPtr = std::shared_ptr<const Formula>;

/// Quantifier-free-or-existential Presburger formula. Atoms store an affine
/// form t with integer coefficients: t <= 0, t = 0, or t = c (mod n).
struct Formula {
    enum Kind { TRUE_K, FALSE_K, LE, EQ, MOD, AND, OR, NOT, EXISTS };
    Kind kind;
    LinFn t;
    Int c, n;
    std::vector<FPtr> kids;
    std::string var;

    std::string str() const;
    std::string to_json() const;
};

FPtr f_true();
FPtr f_false();
/// Atom constructors scale away rational denominators automatically.
FPtr f_le(const LinFn& t);                            // t <= 0
FPtr f_ge(const LinFn& t);                            // t >= 0
FPtr f_le(const LinFn& lhs, const LinFn& rhs);        // lhs <= rhs
FPtr f_eq(const LinFn& t);                            // t = 0
FPtr f_eq(const LinFn& lhs, const LinFn& rhs);
FPtr f_mod(const LinFn& t, const Int& c, const Int& n);  // t = c (mod n)
FPtr f_and(std::vector<FPtr> kids);
FPtr f_or(std::vector<FPtr> kids);
FPtr f_not(FPtr f);
FPtr f_exists(const std::string& var, FPtr f);

bool f_eval(const FPtr& f, const Env& env);
std::vector<std::string> f_free_vars(const FPtr& f);
FPtr f_subst(const FPtr& f, const std::string& v, const LinFn& repl);
FPtr f_simplify(const FPtr& f);

/// Negation normal form with NOT eliminated entirely (atom-level rewrites).
FPtr f_nnf(const FPtr& f, bool negate = false);

/// Cooper quantifier elimination; result is quantifier-free.
FPtr qe(const FPtr& f);

/// Exact enumeration of satisfying tuples of `vars` within [lo, hi]^k; other
/// free variables must be bound by env.
std::vector<std::vector<Int>> members(const FPtr& f, const std::vector<std::string>& vars,
                                      const Int& lo, const Int& hi, const Env& env = {});

// ---------------------------------------------------------------------------
// Cells

struct CellCoord {
    std::string var;
    int type = 1;  // 0: graph of center; 1: bounded-by-linear-functions range
    LinFn center;
    std::optional<LinFn> lower, upper;
    Int c{0}, n{1};  // congruence var = c (mod n) for type 1
};

struct PresCell {
    FPtr base = f_true();             // constraint on the base variables
    std::vector<CellCoord> coords;    // outermost first; coord j may use
                                      // base vars and coords before j
    std::vector<LinFn> restrictions;  // adapted functions, parallel to fs

    bool contains(const Env& env) const;
    std::string str() const;
};

/// A definable function presented as finitely many linear pieces; the guards
/// are expected to be pairwise disjoint on the decomposed set.
using PiecewiseLin = std::vector<std::pair<FPtr, LinFn>>;

/// Partition of the quantifier-free set X into cells over the listed
/// coordinate variables (outermost first), adapted to the given functions so
/// every f in fs restricts to one LinFn per cell. Deterministic output.
std::vector<PresCell> cell_decompose(const FPtr& X, const std::vector<std::string>& coordvars,
                                     const std::vector<PiecewiseLin>& fs = {});

}  // namespace motint
