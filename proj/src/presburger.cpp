#include "motint/presburger.hpp"

#include <json.hpp>
#include <algorithm>
#include <functional>
#include <sstream>

namespace motint {

// ---------------------------------------------------------------------------
// LinFn

void LinFn::trim() {
    for (auto it = a_.begin(); it != a_.end();)
        it = it->second == 0 ? a_.erase(it) : std::next(it);
}

LinFn LinFn::constant(const Rat& c) {
    LinFn f;
    f.b_ = c;
    return f;
}

LinFn LinFn::var(const std::string& v, const Rat& coeff) {
    LinFn f;
    f.a_[v] = coeff;
    f.trim();
    return f;
}

LinFn LinFn::operator+(const LinFn& o) const {
    LinFn r = *this;
    for (const auto& [v, q] : o.a_) r.a_[v] += q;
    r.b_ += o.b_;
    r.trim();
    return r;
}

LinFn LinFn::operator-() const {
    LinFn r = *this;
    for (auto& [v, q] : r.a_) q = -q;
    r.b_ = -r.b_;
    return r;
}

LinFn LinFn::operator-(const LinFn& o) const { return *this + (-o); }

LinFn LinFn::operator*(const Rat& k) const {
    LinFn r = *this;
    for (auto& [v, q] : r.a_) q *= k;
    r.b_ *= k;
    r.trim();
    return r;
}

Rat LinFn::eval_rat(const Env& env) const {
    Rat acc = b_;
    for (const auto& [v, q] : a_) {
        auto it = env.find(v);
        if (it == env.end()) throw DomainError("LinFn::eval: unbound variable " + v);
        acc += q * Rat(it->second);
    }
    return acc;
}

Int LinFn::eval(const Env& env) const {
    Rat v = eval_rat(env);
    if (v.get_den() != 1)
        throw DomainError("LinFn evaluates to non-integer " + v.get_str() +
                          " (outside its congruence domain)");
    return v.get_num();
}

const Rat& LinFn::coeff(const std::string& v) const {
    static const Rat zero(0);
    auto it = a_.find(v);
    return it == a_.end() ? zero : it->second;
}

Int LinFn::denom() const {
    Int d = b_.get_den();
    for (const auto& [v, q] : a_) d = lcm(d, q.get_den());
    return d;
}

LinFn LinFn::subst(const std::string& v, const LinFn& repl) const {
    auto it = a_.find(v);
    if (it == a_.end()) return *this;
    Rat k = it->second;
    LinFn r = *this;
    r.a_.erase(v);
    return r + repl * k;
}

LinFn LinFn::drop(const std::string& v) const {
    LinFn r = *this;
    r.a_.erase(v);
    return r;
}

std::string LinFn::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, q] : a_) {
        if (first) {
            if (q < 0) os << "-";
        } else {
            os << (q < 0 ? " - " : " + ");
        }
        Rat m = abs(q);
        if (m != 1) os << m.get_str() << "*";
        os << v;
        first = false;
    }
    if (first) {
        os << b_.get_str();
    } else if (b_ != 0) {
        os << (b_ < 0 ? " - " : " + ") << Rat(abs(b_)).get_str();
    }
    return os.str();
}

bool LinFn::operator<(const LinFn& o) const {
    if (b_ != o.b_) return b_ < o.b_;
    return std::lexicographical_compare(
        a_.begin(), a_.end(), o.a_.begin(), o.a_.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first < y.first : x.second < y.second;
        });
}

// ---------------------------------------------------------------------------
// Formula construction

namespace {

FPtr mk(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

/// Scale a rational affine form to integer coefficients with positive factor;
/// returns the scaled form (t * denom) and the factor used.
std::pair<LinFn, Int> scale_int(const LinFn& t) {
    Int d = t.denom();
    return {t * Rat(d), d};
}

}  // namespace

FPtr f_true() {
    static FPtr v = mk({Formula::TRUE_K});
    return v;
}

FPtr f_false() {
    static FPtr v = mk({Formula::FALSE_K});
    return v;
}

FPtr f_le(const LinFn& t) {
    auto [s, d] = scale_int(t);
    if (s.is_constant()) return s.constant_part() <= 0 ? f_true() : f_false();
    Formula f{Formula::LE};
    f.t = s;
    return mk(std::move(f));
}

FPtr f_ge(const LinFn& t) { return f_le(-t); }
FPtr f_le(const LinFn& lhs, const LinFn& rhs) { return f_le(lhs - rhs); }

FPtr f_eq(const LinFn& t) {
    auto [s, d] = scale_int(t);
    if (s.is_constant()) return s.constant_part() == 0 ? f_true() : f_false();
    Formula f{Formula::EQ};
    f.t = s;
    return mk(std::move(f));
}

FPtr f_eq(const LinFn& lhs, const LinFn& rhs) { return f_eq(lhs - rhs); }

FPtr f_mod(const LinFn& t, const Int& c, const Int& n) {
    if (n <= 0) throw DomainError("f_mod: modulus must be positive");
    if (n == 1) return f_true();
    // Scaling a congruence scales the modulus too.
    Int d = t.denom();
    LinFn s = t * Rat(d);
    Int nn = n * d, cc = mod_pos(c * d, n * d);
    if (s.is_constant()) return mod_pos(to_int(s.constant_part()), nn) == cc ? f_true() : f_false();
    Formula f{Formula::MOD};
    f.t = s;
    f.c = cc;
    f.n = nn;
    return mk(std::move(f));
}

FPtr f_and(std::vector<FPtr> kids) {
    std::vector<FPtr> flat;
    for (auto& k : kids) {
        if (k->kind == Formula::TRUE_K) continue;
        if (k->kind == Formula::FALSE_K) return f_false();
        if (k->kind == Formula::AND)
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        else
            flat.push_back(k);
    }
    if (flat.empty()) return f_true();
    if (flat.size() == 1) return flat[0];
    Formula f{Formula::AND};
    f.kids = std::move(flat);
    return mk(std::move(f));
}

FPtr f_or(std::vector<FPtr> kids) {
    std::vector<FPtr> flat;
    for (auto& k : kids) {
        if (k->kind == Formula::FALSE_K) continue;
        if (k->kind == Formula::TRUE_K) return f_true();
        if (k->kind == Formula::OR)
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        else
            flat.push_back(k);
    }
    if (flat.empty()) return f_false();
    if (flat.size() == 1) return flat[0];
    Formula f{Formula::OR};
    f.kids = std::move(flat);
    return mk(std::move(f));
}

FPtr f_not(FPtr g) {
    if (g->kind == Formula::TRUE_K) return f_false();
    if (g->kind == Formula::FALSE_K) return f_true();
    if (g->kind == Formula::NOT) return g->kids[0];
    Formula f{Formula::NOT};
    f.kids = {std::move(g)};
    return mk(std::move(f));
}

FPtr f_exists(const std::string& var, FPtr g) {
    Formula f{Formula::EXISTS};
    f.var = var;
    f.kids = {std::move(g)};
    return mk(std::move(f));
}

// ---------------------------------------------------------------------------
// Basic operations

bool f_eval(const FPtr& f, const Env& env) {
    switch (f->kind) {
        case Formula::TRUE_K:
            return true;
        case Formula::FALSE_K:
            return false;
        case Formula::LE:
            return f->t.eval_rat(env) <= 0;
        case Formula::EQ:
            return f->t.eval_rat(env) == 0;
        case Formula::MOD:
            return mod_pos(to_int(f->t.eval_rat(env)), f->n) == f->c;
        case Formula::AND:
            for (const auto& k : f->kids)
                if (!f_eval(k, env)) return false;
            return true;
        case Formula::OR:
            for (const auto& k : f->kids)
                if (f_eval(k, env)) return true;
            return false;
        case Formula::NOT:
            return !f_eval(f->kids[0], env);
        case Formula::EXISTS:
            throw DomainError("f_eval: quantified formula (run qe first)");
    }
    return false;
}

static void collect_vars(const FPtr& f, std::vector<std::string>& out,
                         std::vector<std::string>& bound) {
    switch (f->kind) {
        case Formula::LE:
        case Formula::EQ:
        case Formula::MOD:
            for (const auto& [v, q] : f->t.coeffs())
                if (std::find(bound.begin(), bound.end(), v) == bound.end() &&
                    std::find(out.begin(), out.end(), v) == out.end())
                    out.push_back(v);
            break;
        case Formula::EXISTS:
            bound.push_back(f->var);
            collect_vars(f->kids[0], out, bound);
            bound.pop_back();
            break;
        default:
            for (const auto& k : f->kids) collect_vars(k, out, bound);
    }
}

std::vector<std::string> f_free_vars(const FPtr& f) {
    std::vector<std::string> out, bound;
    collect_vars(f, out, bound);
    std::sort(out.begin(), out.end());
    return out;
}

FPtr f_subst(const FPtr& f, const std::string& v, const LinFn& repl) {
    switch (f->kind) {
        case Formula::LE:
            return f_le(f->t.subst(v, repl));
        case Formula::EQ:
            return f_eq(f->t.subst(v, repl));
        case Formula::MOD:
            return f_mod(f->t.subst(v, repl), f->c, f->n);
        case Formula::AND:
        case Formula::OR:
        case Formula::NOT: {
            std::vector<FPtr> kids;
            for (const auto& k : f->kids) kids.push_back(f_subst(k, v, repl));
            if (f->kind == Formula::AND) return f_and(std::move(kids));
            if (f->kind == Formula::OR) return f_or(std::move(kids));
            return f_not(kids[0]);
        }
        case Formula::EXISTS: {
            if (f->var == v) return f;
            if (repl.depends_on(f->var))
                throw DomainError("f_subst: capture of bound variable " + f->var);
            return f_exists(f->var, f_subst(f->kids[0], v, repl));
        }
        default:
            return f;
    }
}

FPtr f_simplify(const FPtr& f) {
    switch (f->kind) {
        case Formula::AND:
        case Formula::OR: {
            std::vector<FPtr> kids;
            std::vector<std::string> seen;
            for (const auto& k : f->kids) {
                FPtr s = f_simplify(k);
                std::string key = s->str();
                if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                seen.push_back(key);
                kids.push_back(s);
            }
            return f->kind == Formula::AND ? f_and(std::move(kids)) : f_or(std::move(kids));
        }
        case Formula::NOT:
            return f_not(f_simplify(f->kids[0]));
        case Formula::EXISTS:
            return f_exists(f->var, f_simplify(f->kids[0]));
        default:
            return f;
    }
}

FPtr f_nnf(const FPtr& f, bool negate) {
    switch (f->kind) {
        case Formula::TRUE_K:
            return negate ? f_false() : f_true();
        case Formula::FALSE_K:
            return negate ? f_true() : f_false();
        case Formula::LE:
            // not(t <= 0)  <=>  -t + 1 <= 0
            return negate ? f_le(-f->t + LinFn::constant(1)) : f;
        case Formula::EQ:
            if (!negate) return f;
            return f_or({f_le(f->t + LinFn::constant(1)), f_le(-f->t + LinFn::constant(1))});
        case Formula::MOD: {
            if (!negate) return f;
            std::vector<FPtr> alts;
            for (Int r(0); r < f->n; r++)
                if (r != f->c) alts.push_back(f_mod(f->t, r, f->n));
            return f_or(std::move(alts));
        }
        case Formula::AND:
        case Formula::OR: {
            std::vector<FPtr> kids;
            for (const auto& k : f->kids) kids.push_back(f_nnf(k, negate));
            bool is_and = (f->kind == Formula::AND) != negate;
            return is_and ? f_and(std::move(kids)) : f_or(std::move(kids));
        }
        case Formula::NOT:
            return f_nnf(f->kids[0], !negate);
        case Formula::EXISTS:
            if (negate) throw DomainError("f_nnf: negated quantifier (run qe first)");
            return f_exists(f->var, f_nnf(f->kids[0], false));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Cooper's quantifier elimination

namespace {

/// Eliminate `exists x` from quantifier-free g (NNF, NOT-free).
FPtr cooper(const std::string& x, const FPtr& g0) {
    FPtr g = f_nnf(g0);

    // Pass 1: lcm of |coefficients| of x (over atoms mentioning x).
    Int lam(1);
    bool occurs = false;
    std::function<void(const FPtr&)> scan = [&](const FPtr& f) {
        if (f->kind == Formula::LE || f->kind == Formula::EQ || f->kind == Formula::MOD) {
            Rat a = f->t.coeff(x);
            if (a != 0) {
                occurs = true;
                lam = lcm(lam, abs(a.get_num()));  // atoms are integer-scaled
            }
        }
        for (const auto& k : f->kids) scan(k);
    };
    scan(g);
    if (!occurs) return g;

    // Pass 2: normalize x's coefficient to +-lam, then treat y = lam*x
    // (coefficient +-1 on y), adding y = 0 (mod lam).
    // Representation trick: rewrite atoms in terms of y directly.
    const std::string y = "#y";
    std::function<FPtr(const FPtr&)> norm = [&](const FPtr& f) -> FPtr {
        switch (f->kind) {
            case Formula::LE: {
                Rat a = f->t.coeff(x);
                if (a == 0) return f;
                Int ai = a.get_num();
                Int k = lam / abs(ai);
                LinFn rest = (f->t.drop(x)) * Rat(k);
                int sgn = ai > 0 ? 1 : -1;
                Formula nf{Formula::LE};
                nf.t = LinFn::var(y, Rat(sgn)) + rest;
                return mk(std::move(nf));
            }
            case Formula::EQ: {
                Rat a = f->t.coeff(x);
                if (a == 0) return f;
                Int ai = a.get_num();
                Int k = lam / abs(ai);
                LinFn rest = (f->t.drop(x)) * Rat(k);
                int sgn = ai > 0 ? 1 : -1;
                Formula nf{Formula::EQ};
                nf.t = LinFn::var(y, Rat(sgn)) + rest;
                return mk(std::move(nf));
            }
            case Formula::MOD: {
                Rat a = f->t.coeff(x);
                if (a == 0) return f;
                Int ai = a.get_num();
                Int k = lam / abs(ai);
                LinFn rest = (f->t.drop(x)) * Rat(k);
                int sgn = ai > 0 ? 1 : -1;
                Formula nf{Formula::MOD};
                nf.t = LinFn::var(y, Rat(sgn)) + rest;
                nf.c = mod_pos(f->c * k, f->n * k);
                nf.n = f->n * k;
                return mk(std::move(nf));
            }
            case Formula::AND:
            case Formula::OR: {
                std::vector<FPtr> kids;
                for (const auto& k : f->kids) kids.push_back(norm(k));
                return f->kind == Formula::AND ? f_and(std::move(kids)) : f_or(std::move(kids));
            }
            default:
                return f;
        }
    };
    FPtr h = f_and({norm(g), f_mod(LinFn::var(y), Int(0), lam)});

    // Split equalities y = t into y <= t and t <= y so bounds are uniform.
    std::function<FPtr(const FPtr&)> split_eq = [&](const FPtr& f) -> FPtr {
        if (f->kind == Formula::EQ && f->t.coeff(y) != 0) {
            Rat s = f->t.coeff(y);
            LinFn rest = f->t.drop(y);
            // s*y + rest = 0, s = +-1
            LinFn val = rest * Rat(-1) * (Rat(1) / s);  // y = val
            return f_and({f_le(LinFn::var(y) - val), f_le(val - LinFn::var(y))});
        }
        if (f->kind == Formula::AND || f->kind == Formula::OR) {
            std::vector<FPtr> kids;
            for (const auto& k : f->kids) kids.push_back(split_eq(k));
            return f->kind == Formula::AND ? f_and(std::move(kids)) : f_or(std::move(kids));
        }
        return f;
    };
    h = split_eq(h);

    // Collect lower-bound substitution terms B (from t <= y, i.e. -y + t <= 0)
    // and the modulus D = lcm of congruence moduli on y.
    std::vector<LinFn> B;
    Int D(1);
    std::function<void(const FPtr&)> collect = [&](const FPtr& f) {
        if (f->kind == Formula::LE && f->t.coeff(y) < 0) {
            LinFn b = f->t.drop(y);  // -y + b <= 0  =>  y >= b
            if (std::find(B.begin(), B.end(), b) == B.end()) B.push_back(b);
        }
        if (f->kind == Formula::MOD && f->t.coeff(y) != 0) D = lcm(D, f->n);
        for (const auto& k : f->kids) collect(k);
    };
    collect(h);
    std::sort(B.begin(), B.end());

    // Substitute y := val into the normalized formula (y-coefficients +-1).
    auto subst_y = [&](const FPtr& f, const LinFn& val) { return f_subst(f, y, val); };

    // Minus-infinity variant: y <= u true, y >= b false.
    std::function<FPtr(const FPtr&)> minus_inf = [&](const FPtr& f) -> FPtr {
        if (f->kind == Formula::LE && f->t.coeff(y) > 0) return f_true();
        if (f->kind == Formula::LE && f->t.coeff(y) < 0) return f_false();
        if (f->kind == Formula::AND || f->kind == Formula::OR) {
            std::vector<FPtr> kids;
            for (const auto& k : f->kids)
                kids.push_back(minus_inf(k));
            return f->kind == Formula::AND ? f_and(std::move(kids)) : f_or(std::move(kids));
        }
        return f;
    };
    FPtr hinf = minus_inf(h);

    std::vector<FPtr> disj;
    // Lower bounds are non-strict (y >= b), so the witness offsets are 0..D-1.
    for (Int j(0); j < D; j++) {
        disj.push_back(subst_y(hinf, LinFn::constant(Rat(j))));
        for (const auto& b : B) disj.push_back(subst_y(h, b + LinFn::constant(Rat(j))));
    }
    return f_simplify(f_or(std::move(disj)));
}

}  // namespace

FPtr qe(const FPtr& f) {
    switch (f->kind) {
        case Formula::EXISTS:
            return cooper(f->var, qe(f->kids[0]));
        case Formula::AND:
        case Formula::OR:
        case Formula::NOT: {
            std::vector<FPtr> kids;
            for (const auto& k : f->kids) kids.push_back(qe(k));
            if (f->kind == Formula::AND) return f_and(std::move(kids));
            if (f->kind == Formula::OR) return f_or(std::move(kids));
            return f_not(kids[0]);
        }
        default:
            return f;
    }
}

std::vector<std::vector<Int>> members(const FPtr& f, const std::vector<std::string>& vars,
                                      const Int& lo, const Int& hi, const Env& env0) {
    std::vector<std::vector<Int>> out;
    Env env = env0;
    std::vector<Int> tuple(vars.size(), lo);
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == vars.size()) {
            if (f_eval(f, env)) out.push_back(tuple);
            return;
        }
        for (Int v = lo; v <= hi; v++) {
            env[vars[i]] = v;
            tuple[i] = v;
            rec(i + 1);
        }
        env.erase(vars[i]);
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------------------
// Printing

std::string Formula::str() const {
    switch (kind) {
        case TRUE_K:
            return "true";
        case FALSE_K:
            return "false";
        case LE:
            return t.str() + " <= 0";
        case EQ:
            return t.str() + " = 0";
        case MOD:
            return t.str() + " = " + c.get_str() + " mod " + n.get_str();
        case AND:
        case OR: {
            std::string op = kind == AND ? " and " : " or ";
            std::string s;
            for (size_t i = 0; i < kids.size(); i++) {
                if (i) s += op;
                s += "(" + kids[i]->str() + ")";
            }
            return s;
        }
        case NOT:
            return "not (" + kids[0]->str() + ")";
        case EXISTS:
            return "exists " + var + ". (" + kids[0]->str() + ")";
    }
    return "?";
}

std::string Formula::to_json() const {
    using nlohmann::json;
    std::function<json(const Formula&)> go = [&](const Formula& f) -> json {
        json j;
        switch (f.kind) {
            case TRUE_K:
                j["op"] = "true";
                break;
            case FALSE_K:
                j["op"] = "false";
                break;
            case LE:
            case EQ:
            case MOD: {
                j["op"] = f.kind == LE ? "le" : (f.kind == EQ ? "eq" : "mod");
                json coeffs = json::object();
                for (const auto& [v, q] : f.t.coeffs()) coeffs[v] = q.get_str();
                j["coeffs"] = coeffs;
                j["const"] = f.t.constant_part().get_str();
                if (f.kind == MOD) {
                    j["residue"] = f.c.get_str();
                    j["modulus"] = f.n.get_str();
                }
                break;
            }
            case AND:
            case OR: {
                j["op"] = f.kind == AND ? "and" : "or";
                j["args"] = json::array();
                for (const auto& k : f.kids) j["args"].push_back(go(*k));
                break;
            }
            case NOT:
                j["op"] = "not";
                j["args"] = json::array({go(*f.kids[0])});
                break;
            case EXISTS:
                j["op"] = "exists";
                j["var"] = f.var;
                j["args"] = json::array({go(*f.kids[0])});
                break;
        }
        return j;
    };
    return go(*this).dump();
}

}  // namespace motint
