#include <algorithm>
#include <functional>
#include <sstream>

#include "motint/presburger.hpp"

namespace motint {

bool PresCell::contains(const Env& env) const {
    if (!f_eval(base, env)) return false;
    for (const auto& cc : coords) {
        auto it = env.find(cc.var);
        if (it == env.end()) throw DomainError("cell contains: unbound " + cc.var);
        const Int& x = it->second;
        if (cc.type == 0) {
            Rat c = cc.center.eval_rat(env);
            if (c.get_den() != 1 || c.get_num() != x) return false;
        } else {
            if (mod_pos(x, cc.n) != cc.c) return false;
            if (cc.lower) {
                Rat lo = cc.lower->eval_rat(env);
                if (Rat(x) < lo) return false;
            }
            if (cc.upper) {
                Rat hi = cc.upper->eval_rat(env);
                if (Rat(x) > hi) return false;
            }
        }
    }
    return true;
}

std::string PresCell::str() const {
    std::ostringstream os;
    os << "cell{base: " << base->str();
    for (const auto& cc : coords) {
        os << "; " << cc.var << ": ";
        if (cc.type == 0) {
            os << "= " << cc.center.str();
        } else {
            if (cc.lower) os << cc.lower->str() << " <= ";
            os << cc.var;
            if (cc.upper) os << " <= " << cc.upper->str();
            if (cc.n != 1) os << ", " << cc.var << " = " << cc.c.get_str() << " mod " << cc.n.get_str();
        }
    }
    os << "}";
    return os.str();
}

namespace {

using Conj = std::vector<FPtr>;  // conjunction of atoms

// Flatten a NOT-free NNF formula into a disjunction of atom conjunctions.
std::vector<Conj> dnf(const FPtr& f) {
    switch (f->kind) {
        case Formula::TRUE_K:
            return {{}};
        case Formula::FALSE_K:
            return {};
        case Formula::LE:
        case Formula::EQ:
        case Formula::MOD:
            return {{f}};
        case Formula::AND: {
            std::vector<Conj> acc = {{}};
            for (const auto& k : f->kids) {
                std::vector<Conj> kd = dnf(k), next;
                for (const auto& a : acc)
                    for (const auto& b : kd) {
                        Conj c = a;
                        c.insert(c.end(), b.begin(), b.end());
                        next.push_back(std::move(c));
                    }
                acc = std::move(next);
                if (acc.size() > 20000) throw DomainError("cell_decompose: DNF blowup");
            }
            return acc;
        }
        case Formula::OR: {
            std::vector<Conj> acc;
            for (const auto& k : f->kids) {
                auto kd = dnf(k);
                acc.insert(acc.end(), kd.begin(), kd.end());
            }
            return acc;
        }
        default:
            throw DomainError("dnf: unexpected node (quantifier or NOT)");
    }
}

FPtr conj_formula(const Conj& c) {
    return f_and(std::vector<FPtr>(c.begin(), c.end()));
}

// Complement of an atom conjunction as a disjoint union:
//   not(a1 and ... and an) = not(a1) or (a1 and not(a2)) or ...
// Atom negations expand to disjoint alternatives themselves (strict sides
// for EQ, the other residues for MOD), so distributing an AND of such ORs
// yields pairwise-disjoint conjuncts.
FPtr disjoint_not(const Conj& c) {
    std::vector<FPtr> parts;
    Conj prefix;
    for (const auto& a : c) {
        std::vector<FPtr> piece(prefix.begin(), prefix.end());
        piece.push_back(f_nnf(a, true));
        parts.push_back(f_and(std::move(piece)));
        prefix.push_back(a);
    }
    return f_or(std::move(parts));
}

// Pairwise-disjoint DNF: conjunct k is intersected with the disjoint
// complements of all earlier conjuncts before being split again, so the
// re-expansion cannot introduce new overlaps.
std::vector<Conj> disjoint_dnf(const FPtr& f) {
    std::vector<Conj> base = dnf(f_nnf(f_simplify(f)));
    std::vector<Conj> out;
    std::vector<FPtr> negs;  // disjoint complements of earlier conjuncts
    for (const auto& c : base) {
        std::vector<FPtr> parts(negs.begin(), negs.end());
        parts.push_back(conj_formula(c));
        for (auto& d : dnf(f_simplify(f_and(std::move(parts))))) out.push_back(std::move(d));
        negs.push_back(disjoint_not(c));
    }
    return out;
}

// Deterministic ordering key for atom/bound candidates.
bool linfn_less(const LinFn& a, const LinFn& b) { return a < b; }

struct Branch {
    CellCoord coord;
    Conj rest;  // constraints on base + earlier coordinates
};

// Decompose one conjunct with respect to its innermost coordinate x.
// Emits branches whose union is the conjunct and that are pairwise disjoint.
std::vector<Branch> split_coord(const Conj& conj, const std::string& x) {
    Conj rest;
    std::vector<FPtr> with_x;
    for (const auto& a : conj) {
        if (a->t.depends_on(x))
            with_x.push_back(a);
        else
            rest.push_back(a);
    }

    // Congruence modulus for x.
    Int M(1);
    for (const auto& a : with_x)
        if (a->kind == Formula::MOD) M = lcm(M, a->n);

    // Equality atom present: a single graph (0-cell) branch.
    for (const auto& a : with_x) {
        if (a->kind != Formula::EQ) continue;
        LinFn t = a->t;
        Int ax = to_int(t.coeff(x));
        if (ax < 0) {
            t = -t;
            ax = -ax;
        }
        LinFn r = t.drop(x);           // ax*x + r = 0
        LinFn center = r * Rat(-1, ax);  // x = -r/ax
        Conj out = rest;
        if (ax != 1) out.push_back(std::static_pointer_cast<const Formula>(f_mod(r, Int(0), ax)));
        for (const auto& b : with_x) {
            if (b == a) continue;
            out.push_back(f_subst(b, x, center));
        }
        Branch br;
        br.coord.var = x;
        br.coord.type = 0;
        br.coord.center = center;
        br.rest = std::move(out);
        return {br};
    }

    // Bound atoms: for each, a residue split of its term makes the divided
    // bound an exact linear function.
    struct Bound {
        LinFn t;  // scaled so x's coefficient is +a (upper) / the atom is
        Int a;    // a*x <= rhs  or  a*x >= rhs
        bool upper;
        LinFn rhs;  // rational-affine bound on a*x
    };
    std::vector<Bound> bounds;
    std::vector<FPtr> congs;
    for (const auto& a : with_x) {
        if (a->kind == Formula::MOD) {
            congs.push_back(a);
            continue;
        }
        // LE atom: c*x + r <= 0
        Int cx = to_int(a->t.coeff(x));
        LinFn r = a->t.drop(x);
        if (cx > 0)
            bounds.push_back({a->t, cx, true, -r});  // x <= -r/cx
        else
            bounds.push_back({a->t, -cx, false, r});  // -cx*x >= r, x >= r/(-cx)
    }

    std::vector<Branch> out;
    // Enumerate the x-residue (when congruence atoms exist) and, for each
    // bound with coefficient > 1, the residue of its term; then select the
    // tightest bounds with a deterministic tie-break.
    std::function<void(size_t, Conj, std::vector<std::pair<LinFn, bool>>)> enum_bounds =
        [&](size_t i, Conj acc, std::vector<std::pair<LinFn, bool>> resolved) {
            if (i < bounds.size()) {
                const Bound& b = bounds[i];
                if (b.a == 1) {
                    LinFn lf = b.upper ? b.rhs : b.rhs;  // integer bound directly
                    resolved.push_back({lf, b.upper});
                    enum_bounds(i + 1, std::move(acc), std::move(resolved));
                    return;
                }
                for (Int rho(0); rho < b.a; rho++) {
                    // b.rhs = a*x-bound; split on rhs residue: rhs = rho (mod a)
                    Conj acc2 = acc;
                    acc2.push_back(f_mod(b.rhs, rho, b.a));
                    // floor(rhs/a) = (rhs - rho)/a ; ceil(rhs/a) = (rhs + ((-rho) mod a))/a
                    LinFn bound;
                    if (b.upper)
                        bound = (b.rhs - LinFn::constant(Rat(rho))) * Rat(1, b.a);
                    else
                        bound = (b.rhs + LinFn::constant(Rat(mod_pos(-rho, b.a)))) * Rat(1, b.a);
                    auto resolved2 = resolved;
                    resolved2.push_back({bound, b.upper});
                    enum_bounds(i + 1, std::move(acc2), std::move(resolved2));
                }
                return;
            }
            // All bounds divided; split lower/upper candidate lists.
            std::vector<LinFn> uppers, lowers;
            for (const auto& [lf, up] : resolved) (up ? uppers : lowers).push_back(lf);
            std::sort(uppers.begin(), uppers.end(), linfn_less);
            std::sort(lowers.begin(), lowers.end(), linfn_less);
            uppers.erase(std::unique(uppers.begin(), uppers.end()), uppers.end());
            lowers.erase(std::unique(lowers.begin(), lowers.end()), lowers.end());

            // Residue of x itself.
            auto emit_for_rho = [&](const Int& rho, const Conj& accr) {
                // Choose the strict minimum among uppers / maximum among
                // lowers (ties broken by list position).
                size_t un = uppers.empty() ? 1 : uppers.size();
                size_t ln = lowers.empty() ? 1 : lowers.size();
                for (size_t ui = 0; ui < un; ui++) {
                    for (size_t li = 0; li < ln; li++) {
                        Conj acc3 = accr;
                        if (!uppers.empty())
                            for (size_t j = 0; j < uppers.size(); j++) {
                                if (j == ui) continue;
                                // chosen <= others; strict for earlier indices
                                LinFn diff = uppers[ui] - uppers[j];
                                if (j < ui) diff = diff + LinFn::constant(1);
                                acc3.push_back(f_le(diff));
                            }
                        if (!lowers.empty())
                            for (size_t j = 0; j < lowers.size(); j++) {
                                if (j == li) continue;
                                LinFn diff = lowers[j] - lowers[li];
                                if (j < li) diff = diff + LinFn::constant(1);
                                acc3.push_back(f_le(diff));
                            }
                        Branch br;
                        br.coord.var = x;
                        br.coord.type = 1;
                        br.coord.c = rho;
                        br.coord.n = M;
                        if (!uppers.empty()) br.coord.upper = uppers[ui];
                        if (!lowers.empty()) br.coord.lower = lowers[li];
                        // Nonempty guard when both bounds exist.
                        if (!uppers.empty() && !lowers.empty())
                            acc3.push_back(f_le(lowers[li] - uppers[ui]));
                        br.rest = std::move(acc3);
                        out.push_back(std::move(br));
                    }
                }
            };

            if (M == 1) {
                emit_for_rho(Int(0), acc);
            } else {
                for (Int rho(0); rho < M; rho++) {
                    Conj accr = acc;
                    bool dead = false;
                    for (const auto& cg : congs) {
                        // a*x + r = c (mod n); x = rho (mod M), n | M
                        Int ax = to_int(cg->t.coeff(x));
                        LinFn r = cg->t.drop(x);
                        FPtr red = f_mod(r, cg->c - ax * rho, cg->n);
                        if (red->kind == Formula::FALSE_K) {
                            dead = true;
                            break;
                        }
                        if (red->kind != Formula::TRUE_K) accr.push_back(red);
                    }
                    if (!dead) emit_for_rho(rho, accr);
                }
            }
        };
    enum_bounds(0, rest, {});
    return out;
}

std::vector<PresCell> decompose_raw(const FPtr& X, const std::vector<std::string>& coords) {
    if (coords.empty()) {
        FPtr b = f_simplify(X);
        if (b->kind == Formula::FALSE_K) return {};
        return {PresCell{b, {}, {}}};
    }
    std::string x = coords.back();
    std::vector<std::string> prefix(coords.begin(), coords.end() - 1);
    std::vector<PresCell> out;
    for (const auto& conj : disjoint_dnf(X)) {
        for (auto& br : split_coord(conj, x)) {
            FPtr restf = f_simplify(conj_formula(br.rest));
            if (restf->kind == Formula::FALSE_K) continue;
            for (auto& sub : decompose_raw(restf, prefix)) {
                PresCell cell = sub;
                cell.coords.push_back(br.coord);
                out.push_back(std::move(cell));
            }
        }
    }
    return out;
}

}  // namespace

std::vector<PresCell> cell_decompose(const FPtr& X, const std::vector<std::string>& coordvars,
                                     const std::vector<PiecewiseLin>& fs) {
    FPtr X0 = f_simplify(f_nnf(X));
    if (fs.empty()) return decompose_raw(X0, coordvars);

    std::vector<PresCell> out;
    std::function<void(size_t, FPtr, std::vector<LinFn>)> pick = [&](size_t i, FPtr acc,
                                                                     std::vector<LinFn> chosen) {
        if (i == fs.size()) {
            for (auto& cell : decompose_raw(acc, coordvars)) {
                cell.restrictions = chosen;
                out.push_back(std::move(cell));
            }
            return;
        }
        for (const auto& [guard, fn] : fs[i]) {
            auto c2 = chosen;
            c2.push_back(fn);
            pick(i + 1, f_and({acc, f_nnf(guard)}), std::move(c2));
        }
    };
    pick(0, X0, {});
    return out;
}

}  // namespace motint
