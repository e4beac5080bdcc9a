#include "motint/cpfun.hpp"

#include <json.hpp>
#include <algorithm>
#include <functional>
#include <sstream>

namespace motint {

// ---------------------------------------------------------------------------
// CPFunction basics

CPFunction CPFunction::constant(const MotNum& c) {
    if (c.is_zero()) return {};
    return {{CPTerm{c, {}, LinFn(), f_true()}}};
}

CPFunction CPFunction::term(MotNum coeff, std::vector<LinFn> factors, LinFn exp, FPtr support) {
    return {{CPTerm{std::move(coeff), std::move(factors), std::move(exp), std::move(support)}}};
}

MotNum CPFunction::eval(const Env& env) const {
    MotNum acc;
    for (const auto& t : terms) {
        if (!f_eval(t.support, env)) continue;
        MotNum v = t.coeff;
        for (const auto& f : t.factors) v = v * MotNum::from_int(f.eval(env));
        v = v * MotNum::L_power(to_long(t.exp.eval(env)));
        acc = acc + v;
    }
    return acc;
}

CPFunction CPFunction::operator+(const CPFunction& o) const {
    CPFunction r = *this;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    return r;
}

CPFunction CPFunction::operator*(const CPFunction& o) const {
    CPFunction r;
    for (const auto& a : terms)
        for (const auto& b : o.terms) {
            CPTerm t;
            t.coeff = a.coeff * b.coeff;
            t.factors = a.factors;
            t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
            t.exp = a.exp + b.exp;
            t.support = f_and({a.support, b.support});
            if (t.support->kind != Formula::FALSE_K && !t.coeff.is_zero())
                r.terms.push_back(std::move(t));
        }
    return r;
}

CPFunction CPFunction::scale(const MotNum& k) const {
    if (k.is_zero()) return {};
    CPFunction r = *this;
    for (auto& t : r.terms) t.coeff = t.coeff * k;
    return r;
}

CPFunction CPFunction::subst(const std::string& v, const LinFn& repl) const {
    CPFunction r;
    for (const auto& t : terms) {
        CPTerm s = t;
        for (auto& f : s.factors) f = f.subst(v, repl);
        s.exp = s.exp.subst(v, repl);
        s.support = f_subst(s.support, v, repl);
        if (s.support->kind != Formula::FALSE_K) r.terms.push_back(std::move(s));
    }
    return r;
}

CPFunction CPFunction::restrict(const FPtr& guard) const {
    CPFunction r;
    for (const auto& t : terms) {
        CPTerm s = t;
        s.support = f_and({s.support, guard});
        if (s.support->kind != Formula::FALSE_K) r.terms.push_back(std::move(s));
    }
    return r;
}

CPFunction CPFunction::compact() const {
    // Key terms by (support, sorted factors, exponent); sum coefficients.
    std::map<std::string, CPTerm> acc;
    std::vector<std::string> order;
    for (const auto& t : terms) {
        if (t.coeff.is_zero() || t.support->kind == Formula::FALSE_K) continue;
        std::vector<std::string> fs;
        for (const auto& f : t.factors) fs.push_back(f.str());
        std::sort(fs.begin(), fs.end());
        std::string key = f_simplify(t.support)->str() + "|" + t.exp.str() + "|";
        for (const auto& s : fs) key += s + ",";
        auto it = acc.find(key);
        if (it == acc.end()) {
            acc[key] = t;
            order.push_back(key);
        } else {
            it->second.coeff = it->second.coeff + t.coeff;
        }
    }
    CPFunction r;
    for (const auto& k : order)
        if (!acc[k].coeff.is_zero()) r.terms.push_back(acc[k]);
    return r;
}

std::vector<std::string> CPFunction::vars() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& t : terms) {
        for (const auto& v : f_free_vars(t.support)) add(v);
        for (const auto& f : t.factors)
            for (const auto& [v, q] : f.coeffs()) add(v);
        for (const auto& [v, q] : t.exp.coeffs()) add(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int CPFunction::known_zero() const {
    CPFunction c = compact();
    if (c.terms.empty()) return 1;
    std::vector<std::string> vs = c.vars();
    if (vs.empty()) return c.eval({}).is_zero() ? 1 : 0;
    // Sample a box; an exact nonzero value is a definite refutation.
    long B = 6;
    size_t total = 1;
    for (size_t i = 0; i < vs.size() && total < 100000; i++) total *= (2 * B + 1);
    if (total >= 100000) B = 2;
    Env env;
    bool nonzero = false;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (nonzero) return;
        if (i == vs.size()) {
            if (!c.eval(env).is_zero()) nonzero = true;
            return;
        }
        for (Int v(-B); v <= B && !nonzero; v++) {
            env[vs[i]] = v;
            rec(i + 1);
        }
        env.erase(vs[i]);
    };
    rec(0);
    return nonzero ? 0 : -1;
}

MotNum CPFunction::as_motnum() const {
    MotNum acc;
    for (const auto& t : terms) {
        if (!f_free_vars(t.support).empty() || !t.exp.is_constant())
            throw DomainError("as_motnum: function still depends on variables");
        for (const auto& f : t.factors)
            if (!f.is_constant()) throw DomainError("as_motnum: non-constant factor");
    }
    return eval({});
}

std::string CPTerm::str() const {
    std::ostringstream os;
    os << "(" << coeff.str() << ")";
    for (const auto& f : factors) os << " * (" << f.str() << ")";
    if (!(exp == LinFn())) os << " * L^(" << exp.str() << ")";
    if (support->kind != Formula::TRUE_K) os << " on {" << support->str() << "}";
    return os.str();
}

std::string CPFunction::str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < terms.size(); i++) {
        if (i) s += " + ";
        s += terms[i].str();
    }
    return s;
}

std::string CPFunction::to_json() const {
    using nlohmann::json;
    json j;
    j["schema"] = 1;
    j["terms"] = json::array();
    for (const auto& t : terms) {
        json jt;
        jt["coeff"] = json::parse(t.coeff.to_json());
        jt["factors"] = json::array();
        auto lin_json = [](const LinFn& f) {
            json lj;
            lj["coeffs"] = json::object();
            for (const auto& [v, q] : f.coeffs()) lj["coeffs"][v] = q.get_str();
            lj["const"] = f.constant_part().get_str();
            return lj;
        };
        for (const auto& f : t.factors) jt["factors"].push_back(lin_json(f));
        jt["exp"] = lin_json(t.exp);
        jt["support"] = json::parse(t.support->to_json());
        j["terms"].push_back(jt);
    }
    return j.dump();
}

// ---------------------------------------------------------------------------
// Difference-operator helpers

namespace {

// P(X+1)
ZPoly poly_shift1(const ZPoly& p) {
    // Horner in (X+1)
    ZPoly acc;
    ZPoly xp1({Int(1), Int(1)});
    for (long i = p.degree(); i >= 0; i--) acc = acc * xp1 + ZPoly::constant(p.coeff((size_t)i));
    return acc;
}

ZPoly poly_delta(const ZPoly& p) { return poly_shift1(p) - p; }

// Delta^i (X^m) as polynomials, i = 0..m
std::vector<ZPoly> delta_powers(long m) {
    std::vector<ZPoly> out;
    ZPoly cur = ZPoly::monomial(Int(1), (size_t)m);
    for (long i = 0; i <= m; i++) {
        out.push_back(cur);
        cur = poly_delta(cur);
    }
    return out;
}

// Stirling numbers of the second kind S(m, i)
std::vector<Int> stirling2_row(long m) {
    std::vector<std::vector<Int>> S((size_t)m + 1, std::vector<Int>((size_t)m + 1, Int(0)));
    S[0][0] = 1;
    for (long n = 1; n <= m; n++)
        for (long k = 1; k <= n; k++) S[n][k] = Int(k) * S[n - 1][k] + S[n - 1][k - 1];
    return S[(size_t)m];
}

Int factorial(long n) {
    Int r(1);
    for (long i = 2; i <= n; i++) r *= i;
    return r;
}

long vp(Int x, const Int& p) {
    if (x == 0) return -1;  // sentinel: "infinite"
    long v = 0;
    while (x % p == 0) {
        x /= p;
        v++;
    }
    return v;
}

/// Divisor assignment for C(K+1, i+1) = prod_{l=0}^{i} (K+1-l) / (i+1)!
/// on the residue class K = r (mod lcm(1..i+1)): returns d_l with
/// prod d_l = (i+1)! and d_l | K+1-l for every K in the class.
std::vector<Int> binomial_divisors(long i, const Int& r, const Int& modulus) {
    long n = i + 1;
    std::vector<Int> d((size_t)n, Int(1));
    for (Int p(2); p <= n; p++) {
        // primality by trial division (n is tiny)
        bool prime = true;
        for (Int q(2); q * q <= p; q++)
            if (p % q == 0) prime = false;
        if (!prime) continue;
        // s = max power with p^s <= n
        long s = 0;
        Int ps(1);
        while (ps * p <= n) {
            ps *= p;
            s++;
        }
        // guaranteed valuation of K+1-l on the class, capped at s
        std::vector<std::pair<long, size_t>> avail;
        for (long l = 0; l < n; l++) {
            Int res = mod_pos(r + 1 - l, ps);
            long v = res == 0 ? s : vp(res, p);
            if (v > 0) avail.push_back({v, (size_t)l});
        }
        std::sort(avail.begin(), avail.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        // total needed: v_p((i+1)!)
        long need = 0;
        for (Int q = p; q <= n; q *= p) need += to_long(Int(n) / q);
        for (const auto& [v, l] : avail) {
            if (need <= 0) break;
            long take = std::min(v, need);
            for (long t = 0; t < take; t++) d[l] *= p;
            need -= take;
        }
        if (need > 0) throw DomainError("binomial_divisors: internal valuation shortfall");
    }
    return d;
}

Int lcm_upto(long n) {
    Int r(1);
    for (long i = 2; i <= n; i++) r = lcm(r, Int(i));
    return r;
}

std::string denom_key_str(const std::tuple<long, std::vector<long>, bool>& k) {
    std::ostringstream os;
    os << std::get<0>(k) << ":[";
    for (long b : std::get<1>(k)) os << b << ",";
    os << "]" << (std::get<2>(k) ? "inf" : "fin");
    return os.str();
}

// ---------------------------------------------------------------------------
// Core: sum one RSTerm over one variable.

struct SumContext {
    size_t r = 0;       // number of T variables
    bool mu = false;    // pure summation (gate unbounded directions)
    std::string diag;   // first integrability failure
};

std::vector<RSTerm> sum_term_var(const RSTerm& term, const std::string& x, SumContext& ctx) {
    std::vector<RSTerm> out;

    // Integrality certificates so the decomposition modulus covers every
    // denominator appearing in the term's linear data.
    std::vector<FPtr> certs = {term.support};
    auto add_cert = [&](const LinFn& f) {
        Int d = f.denom();
        if (d > 1) certs.push_back(f_mod(f * Rat(d), Int(0), d));
    };
    for (const auto& f : term.factors) add_cert(f);
    add_cert(term.lexp);
    for (const auto& f : term.texp) add_cert(f);

    auto cells = cell_decompose(f_and(certs), {x});

    for (const auto& cell : cells) {
        const CellCoord& cc = cell.coords[0];
        if (cc.type == 0) {
            RSTerm s = term;
            for (auto& f : s.factors) f = f.subst(x, cc.center);
            s.lexp = s.lexp.subst(x, cc.center);
            for (auto& f : s.texp) f = f.subst(x, cc.center);
            s.support = cell.base;
            out.push_back(std::move(s));
            continue;
        }

        Int M = cc.n;
        Int rho = cc.c;

        // One summation branch: x = x0 + dir*M*j for j in [0, K] or [0, inf).
        auto do_branch = [&](const LinFn& x0, int dir, std::optional<LinFn> Kopt, FPtr bsupp,
                             bool eps_flip_self) {
            // Slopes and substituted parts.
            auto slope_of = [&](const LinFn& f) {
                Rat s = f.coeff(x) * Rat(M) * Rat(dir);
                if (s.get_den() != 1)
                    throw DomainError("summation: non-integer slope (missing congruence)");
                return s.get_num();
            };
            RSTerm base = term;
            base.support = bsupp;
            if (eps_flip_self && ctx.r > 0) {
                // The T variable of x itself switches to the negative sector.
                for (size_t d = 0; d < base.texp.size(); d++) {
                    if (base.texp[d].coeff(x) != 0 && base.eps[d] == 1 &&
                        base.texp[d] == LinFn::var(x)) {
                        base.eps[d] = -1;
                        base.texp[d] = -base.texp[d];
                    }
                }
            }
            Int alpha = slope_of(base.lexp);
            LinFn e0 = base.lexp.subst(x, x0);
            std::vector<long> bvec(ctx.r, 0);
            std::vector<LinFn> t0(base.texp.size());
            bool bad_b = false;
            for (size_t d = 0; d < base.texp.size(); d++) {
                Int bd = slope_of(base.texp[d]);
                if (bd < 0) bad_b = true;
                bvec[d] = to_long(bd);
                t0[d] = base.texp[d].subst(x, x0);
            }
            if (bad_b)
                throw DomainError(
                    "mellin: decreasing T-exponent along a summation direction is unsupported");
            bool w_trivial = alpha == 0 && std::all_of(bvec.begin(), bvec.end(),
                                                       [](long b) { return b == 0; });

            // Split factors into x-free and x-dependent (slope, value-at-x0).
            std::vector<LinFn> fixed;
            std::vector<std::pair<Int, LinFn>> lin;
            for (const auto& f : base.factors) {
                Int s = slope_of(f);
                if (s == 0)
                    fixed.push_back(f.subst(x, x0));
                else
                    lin.push_back({s, f.subst(x, x0)});
            }
            if (lin.size() > 16) throw DomainError("summation: too many x-linear factors");

            bool infinite = !Kopt.has_value();
            if (infinite && ctx.mu && alpha >= 0) {
                throw NotIntegrable("non-summable direction: L-slope " + alpha.get_str() +
                                    " >= 0 for variable " + x + " on cell " + cell.str());
            }

            // Enumerate factor subsets: prod (s_k j + g_k) expands into
            // monomials mult * j^m * prod_{chosen} g_k.
            size_t nlin = lin.size();
            for (size_t mask = 0; mask < (size_t(1) << nlin); mask++) {
                Int mult(1);
                long m = 0;
                std::vector<LinFn> gs = fixed;
                for (size_t k = 0; k < nlin; k++) {
                    if (mask & (size_t(1) << k)) {
                        gs.push_back(lin[k].second);
                    } else {
                        mult *= lin[k].first;
                        m++;
                    }
                }
                if (mult == 0) continue;

                auto push_w_power = [&](RSTerm& s, long power_shift, const LinFn& extra_exp) {
                    // multiply by w^(power_shift + extra_exp) where
                    // w = L^alpha prod U_d^{b_d}
                    LinFn e = extra_exp + LinFn::constant(power_shift);
                    s.lexp = s.lexp + e * Rat(alpha);
                    for (size_t d = 0; d < s.texp.size(); d++)
                        if (bvec[d] != 0) s.texp[d] = s.texp[d] + e * Rat(bvec[d]);
                };

                if (w_trivial) {
                    if (infinite)
                        throw NotIntegrable("divergent constant direction for variable " + x);
                    // Faulhaber: sum_{j=0}^{K} j^m via binomial closed forms.
                    const LinFn& K = *Kopt;
                    auto S2 = stirling2_row(m);
                    for (long i = 0; i <= m; i++) {
                        if (S2[(size_t)i] == 0) continue;
                        Int ci = S2[(size_t)i] * factorial(i);
                        Int modl = lcm_upto(i + 1);
                        for (Int rr(0); rr < modl; rr++) {
                            auto dl = binomial_divisors(i, rr, modl);
                            RSTerm s = base;
                            s.c = term.c * MotNum::from_int(ci * mult);
                            s.factors = gs;
                            for (long l = 0; l <= i; l++)
                                s.factors.push_back((K + LinFn::constant(Rat(1 - l))) *
                                                    Rat(Int(1), dl[(size_t)l]));
                            s.lexp = e0;
                            s.texp = t0;
                            if (modl > 1) s.support = f_and({bsupp, f_mod(K, rr, modl)});
                            out.push_back(std::move(s));
                        }
                    }
                    continue;
                }

                // General w: tail sums G(0) (and -G(K+1) when bounded).
                auto deltas = delta_powers(m);
                std::tuple<long, std::vector<long>, bool> dkey{to_long(alpha), bvec, infinite};
                for (long i = 0; i <= m; i++) {
                    Int Di = deltas[(size_t)i].eval_int(Int(0));
                    if (Di != 0) {
                        RSTerm s = base;
                        s.c = term.c * MotNum::from_int(Di * mult);
                        s.factors = gs;
                        s.lexp = e0;
                        s.texp = t0;
                        s.entire = term.entire && !infinite;
                        if (ctx.r == 0) {
                            s.c = s.c * MotNum::inv_one_minus_L(to_long(alpha)).pow(i + 1);
                        } else {
                            s.denom[dkey] += i + 1;
                        }
                        push_w_power(s, i, LinFn());
                        out.push_back(std::move(s));
                    }
                    if (!infinite) {
                        // -G(K+1): delta^i(X^m) evaluated at K+1.
                        ZPoly q = poly_shift1(deltas[(size_t)i]);
                        const LinFn& K = *Kopt;
                        for (long dpow = 0; dpow <= q.degree(); dpow++) {
                            Int beta = q.coeff((size_t)dpow);
                            if (beta == 0) continue;
                            RSTerm s = base;
                            s.c = term.c * MotNum::from_int(-beta * mult);
                            s.factors = gs;
                            for (long cpy = 0; cpy < dpow; cpy++) s.factors.push_back(K);
                            s.lexp = e0;
                            s.texp = t0;
                            s.entire = term.entire;
                            if (ctx.r == 0) {
                                s.c = s.c * MotNum::inv_one_minus_L(to_long(alpha)).pow(i + 1);
                            } else {
                                s.denom[dkey] += i + 1;
                            }
                            // w^(K+1+i)
                            push_w_power(s, i + 1, K);
                            out.push_back(std::move(s));
                        }
                    }
                }
            }
        };

        // Assemble branches from the cell's bounds.
        bool has_lo = cc.lower.has_value(), has_up = cc.upper.has_value();
        auto lo_branches = [&](std::function<void(const LinFn&, FPtr)> fn) {
            // anchored start x0 = lo + ((rho - lo) mod M)
            if (M == 1) {
                fn(*cc.lower, cell.base);
                return;
            }
            for (Int sg(0); sg < M; sg++) {
                FPtr g = f_mod(*cc.lower, sg, M);
                if (g->kind == Formula::FALSE_K) continue;
                FPtr supp = f_and({cell.base, g});
                if (supp->kind == Formula::FALSE_K) continue;
                fn(*cc.lower + LinFn::constant(Rat(mod_pos(rho - sg, M))), supp);
            }
        };
        auto up_branches = [&](std::function<void(const LinFn&, FPtr)> fn) {
            if (M == 1) {
                fn(*cc.upper, cell.base);
                return;
            }
            for (Int sg(0); sg < M; sg++) {
                FPtr g = f_mod(*cc.upper, sg, M);
                if (g->kind == Formula::FALSE_K) continue;
                FPtr supp = f_and({cell.base, g});
                if (supp->kind == Formula::FALSE_K) continue;
                fn(*cc.upper - LinFn::constant(Rat(mod_pos(sg - rho, M))), supp);
            }
        };

        if (has_lo && has_up) {
            lo_branches([&](const LinFn& x0, FPtr s1) {
                // nested branch on the upper endpoint residue
                if (M == 1) {
                    LinFn K = *cc.upper - x0;
                    do_branch(x0, 1, K, f_and({s1, f_ge(K)}), false);
                    return;
                }
                for (Int sg(0); sg < M; sg++) {
                    FPtr g = f_mod(*cc.upper, sg, M);
                    if (g->kind == Formula::FALSE_K) continue;
                    FPtr supp = f_and({s1, g});
                    if (supp->kind == Formula::FALSE_K) continue;
                    LinFn x1 = *cc.upper - LinFn::constant(Rat(mod_pos(sg - rho, M)));
                    LinFn K = (x1 - x0) * Rat(Int(1), M);
                    do_branch(x0, 1, K, f_and({supp, f_ge(K)}), false);
                }
            });
        } else if (has_lo) {
            lo_branches([&](const LinFn& x0, FPtr s1) { do_branch(x0, 1, std::nullopt, s1, false); });
        } else if (has_up) {
            up_branches(
                [&](const LinFn& x1, FPtr s1) { do_branch(x1, -1, std::nullopt, s1, true); });
        } else {
            // Whole residue class: split at the anchor rho.
            do_branch(LinFn::constant(Rat(rho)), 1, std::nullopt, cell.base, false);
            do_branch(LinFn::constant(Rat(rho - M)), -1, std::nullopt, cell.base, true);
        }
    }
    return out;
}

std::vector<RSTerm> cpf_to_rsterms(const CPFunction& phi, size_t r,
                                   const std::vector<std::string>& tvars_src) {
    std::vector<RSTerm> ts;
    for (const auto& t : phi.terms) {
        if (t.coeff.is_zero()) continue;
        RSTerm s;
        s.c = t.coeff;
        s.factors = t.factors;
        s.lexp = t.exp;
        s.support = t.support;
        s.eps.assign(r, 1);
        for (size_t i = 0; i < r; i++) s.texp.push_back(LinFn::var(tvars_src[i]));
        s.entire = true;
        ts.push_back(std::move(s));
    }
    return ts;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations

CPFunction mu_sum(const CPFunction& phi, const std::vector<std::string>& zvars) {
    SumContext ctx;
    ctx.r = 0;
    ctx.mu = true;
    std::vector<RSTerm> ts = cpf_to_rsterms(phi, 0, {});
    for (auto it = zvars.rbegin(); it != zvars.rend(); ++it) {
        std::vector<RSTerm> next;
        for (const auto& t : ts) {
            auto s = sum_term_var(t, *it, ctx);
            next.insert(next.end(), s.begin(), s.end());
        }
        ts = std::move(next);
    }
    CPFunction out;
    for (const auto& t : ts) {
        if (!t.denom.empty()) throw DomainError("mu_sum: residual formal denominator");
        out.terms.push_back(CPTerm{t.c, t.factors, t.lexp, t.support});
    }
    return out.compact();
}

bool is_integrable(const CPFunction& phi, const std::vector<std::string>& zvars,
                   std::string* diag) {
    try {
        mu_sum(phi, zvars);
        return true;
    } catch (const NotIntegrable& e) {
        if (diag) *diag = e.what();
        return false;
    }
}

RationalSeries mellin(const CPFunction& phi, const std::vector<std::string>& zvars) {
    if (zvars.size() > 2)
        throw DomainError("mellin: at most two variables (iterated univariate construction)");
    SumContext ctx;
    ctx.r = zvars.size();
    ctx.mu = false;
    std::vector<RSTerm> ts = cpf_to_rsterms(phi, zvars.size(), zvars);
    for (auto it = zvars.rbegin(); it != zvars.rend(); ++it) {
        std::vector<RSTerm> next;
        for (const auto& t : ts) {
            auto s = sum_term_var(t, *it, ctx);
            next.insert(next.end(), s.begin(), s.end());
        }
        ts = std::move(next);
    }
    RationalSeries out;
    out.tvars.assign(zvars.size(), "");
    for (size_t i = 0; i < zvars.size(); i++)
        out.tvars[i] = zvars.size() == 1 ? "T" : "T" + std::to_string(i + 1);
    for (auto& t : ts)
        if (!t.c.is_zero()) out.terms.push_back(std::move(t));
    return out;
}

bool in_sigma(const RationalSeries& s) {
    for (const auto& t : s.terms) {
        if (t.entire) continue;
        for (const auto& [key, mult] : t.denom) {
            if (std::get<2>(key) && std::get<0>(key) >= 0) return false;
        }
    }
    return true;
}

RationalSeries sum_poly_geometric(const ZPoly& P, long a) {
    RationalSeries out;
    out.tvars = {"T"};
    if (P.is_zero()) return out;
    // sum_{n>=a} P(n) T^n = sum_i Delta^i P(a) T^(a+i) / (1-T)^(i+1)
    ZPoly cur = P;
    for (long i = 0; i <= P.degree(); i++) {
        Int Di = cur.eval_int(Int(a));
        if (Di != 0) {
            RSTerm t;
            t.c = MotNum::from_int(Di);
            t.texp = {LinFn::constant(Rat(Int(a + i)))};
            t.eps = {1};
            t.denom[{0L, {1L}, true}] = i + 1;
            t.entire = false;
            out.terms.push_back(std::move(t));
        }
        cur = poly_delta(cur);
    }
    return out;
}

CPFunction power_sum_closed(long b, long c, long n) {
    if (c < 0 || c >= n || n < 1) throw DomainError("power_sum_closed: need 0 <= c < n");
    // phi(a, i) = i^b on {0 <= i <= a, i = c mod n}; sum out i.
    std::vector<LinFn> factors((size_t)b, LinFn::var("i"));
    FPtr supp = f_and({f_ge(LinFn::var("i")), f_le(LinFn::var("i") - LinFn::var("a")),
                       f_mod(LinFn::var("i"), Int(c), Int(n))});
    CPFunction phi = CPFunction::term(MotNum::from_int(Int(1)), factors, LinFn(), supp);
    return mu_sum(phi, {"i"});
}

CPFunction coeff_extract(const RationalSeries& s, const std::vector<Int>& idx) {
    if (idx.size() != s.tvars.size()) throw DomainError("coeff_extract: index arity mismatch");
    CPFunction out;
    for (const auto& t : s.terms) {
        // Residual exponent to be covered by denominator expansions.
        std::vector<Int> res(idx.size());
        bool dead = false;
        for (size_t j = 0; j < idx.size(); j++) {
            if (!t.texp[j].is_constant())
                throw DomainError("coeff_extract: non-constant T-exponent (parametric series)");
            Int want = t.eps[j] == 1 ? idx[j] : -idx[j];
            res[j] = want - to_int(t.texp[j].constant_part());
            if (res[j] < 0) dead = true;
        }
        if (dead) continue;
        // Expand the denominator list (with multiplicity).
        std::vector<std::pair<long, std::vector<long>>> ds;
        for (const auto& [key, mult] : t.denom)
            for (long k = 0; k < mult; k++) ds.push_back({std::get<0>(key), std::get<1>(key)});
        std::function<void(size_t, std::vector<Int>, Int)> rec = [&](size_t d, std::vector<Int> rem,
                                                                     Int lshift) {
            if (d == ds.size()) {
                for (const auto& r : rem)
                    if (r != 0) return;
                CPTerm term;
                term.coeff = t.c;
                term.factors = t.factors;
                term.exp = t.lexp + LinFn::constant(Rat(lshift));
                term.support = t.support;
                out.terms.push_back(std::move(term));
                return;
            }
            const auto& [a, b] = ds[d];
            bool bzero = std::all_of(b.begin(), b.end(), [](long x) { return x == 0; });
            if (bzero) throw DomainError("coeff_extract: denominator without T part");
            for (Int k(0);; k++) {
                std::vector<Int> r2 = rem;
                bool ok = true;
                for (size_t j = 0; j < b.size(); j++) {
                    r2[j] -= k * b[j];
                    if (r2[j] < 0) ok = false;
                }
                if (!ok && k > 0) break;
                if (ok) rec(d + 1, r2, lshift + k * a);
                if (!ok) break;
            }
        };
        rec(0, res, Int(0));
    }
    return out.compact();
}

// ---------------------------------------------------------------------------
// Printing

std::string RSTerm::str(const std::vector<std::string>& tvars) const {
    std::ostringstream os;
    os << "(" << c.str() << ")";
    for (const auto& f : factors) os << " * (" << f.str() << ")";
    if (!(lexp == LinFn())) os << " * L^(" << lexp.str() << ")";
    for (size_t j = 0; j < texp.size(); j++) {
        if (texp[j] == LinFn() && eps[j] == 1) continue;
        os << " * " << tvars[j] << "^(" << (eps[j] == 1 ? "" : "-(") << texp[j].str()
           << (eps[j] == 1 ? ")" : "))");
    }
    bool anyd = false;
    for (const auto& [key, mult] : denom) {
        if (!anyd) os << " / [";
        anyd = true;
        os << "(1 - L^" << std::get<0>(key);
        const auto& b = std::get<1>(key);
        for (size_t j = 0; j < b.size(); j++)
            if (b[j] != 0) os << " " << tvars[j] << "^" << b[j];
        os << ")^" << mult << " ";
    }
    if (anyd) os << "]";
    if (support->kind != Formula::TRUE_K) os << " on {" << support->str() << "}";
    return os.str();
}

std::string RationalSeries::str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < terms.size(); i++) {
        if (i) s += " + ";
        s += terms[i].str(tvars);
    }
    return s;
}

std::string RationalSeries::to_json() const {
    using nlohmann::json;
    json j;
    j["schema"] = 1;
    j["tvars"] = tvars;
    j["terms"] = json::array();
    for (const auto& t : terms) {
        json jt;
        jt["text"] = t.str(tvars);
        jt["entire"] = t.entire;
        jt["denom"] = json::array();
        for (const auto& [key, mult] : t.denom)
            jt["denom"].push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mult});
        j["terms"].push_back(jt);
    }
    return j.dump();
}

}  // namespace motint
