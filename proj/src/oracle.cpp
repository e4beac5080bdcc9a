#include "motint/oracle.hpp"

#include <json.hpp>
#include <algorithm>
#include <functional>
#include <sstream>

namespace motint {

namespace {

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

}  // namespace

Rat theta_at(const CPFunction& phi, const Env& env, const Rat& q) {
    Rat total(0);
    for (const auto& t : phi.terms) {
        if (!f_eval(t.support, env)) continue;
        Rat v = t.coeff.theta(q);
        for (const auto& f : t.factors) v *= Rat(f.eval(env));
        v *= pow_rat(q, to_long(t.exp.eval(env)));
        total += v;
    }
    return total;
}

namespace {

/// Visit every tuple with sup-norm exactly r.
void shell_visit(const std::vector<std::string>& vars, size_t pos, long r, bool hit, Env& env,
                 const std::function<void(const Env&)>& fn) {
    if (pos == vars.size()) {
        if (hit || r == 0) fn(env);
        return;
    }
    for (long v = -r; v <= r; v++) {
        env[vars[pos]] = Int(v);
        shell_visit(vars, pos + 1, r, hit || v == r || v == -r, env, fn);
    }
    env.erase(vars[pos]);
}

}  // namespace

NumericSum numeric_sum(const CPFunction& phi, const std::vector<std::string>& zvars,
                       const Rat& q, const Env& env, const OracleConfig& cfg) {
    NumericSum out;
    out.value = Rat(0);
    Rat abs_total(0);
    long B = std::max<long>(cfg.box, 12);
    std::vector<Rat> shells((size_t)B + 1, Rat(0));
    Env point = env;
    for (long r = 0; r <= B; r++) {
        shell_visit(zvars, 0, r, false, point, [&](const Env& e) {
            Rat v = theta_at(phi, e, q);
            out.value += v;
            shells[(size_t)r] += rat_abs(v);
        });
        abs_total += shells[(size_t)r];
        if (r == B / 4 || r == B / 2 || r == 3 * B / 4 || r == B)
            out.partials.push_back(abs_total);
    }
    // tail bound from the decay ratio of the outer shell blocks
    const long W = 6;
    Rat s1(0), s2(0);
    for (long r = B - 2 * W + 1; r <= B - W; r++) s1 += shells[(size_t)r];
    for (long r = B - W + 1; r <= B; r++) s2 += shells[(size_t)r];
    if (s2 == 0) {
        out.tail_bound = Rat(0);
        out.converged = true;
    } else if (s1 > 0 && s2 < s1) {
        Rat ratio = s2 / s1;
        out.tail_bound = s2 * ratio / (Rat(1) - ratio);
        out.converged = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Residue-ring measure

namespace {

long rat_mod(const Rat& x, long p) {
    Int num = x.get_num() % p, den = x.get_den() % p;
    long n = ((to_long(num) % p) + p) % p;
    long d = ((to_long(den) % p) + p) % p;
    if (d == 0) throw DomainError("padic_measure: denominator divisible by p");
    long inv = 1;
    for (long k = 1; k < p; k++)
        if (d * k % p == 1) {
            inv = k;
            break;
        }
    return n * inv % p;
}

struct CosetView {
    long ord = 0;     // valid when finite
    bool inf = false;  // difference vanishes through the truncation depth
    long ac = 0;
};

/// ord/ac of (x - c) where x has coefficients xs over [lo, lo+N) and zero
/// below lo; coefficients of c below lo contribute as constants.
CosetView diff_view(const std::vector<long>& xs, const SeriesPoint& c, long p, long N, long lo) {
    long minexp = lo;
    if (!c.coeffs().empty()) minexp = std::min(minexp, c.coeffs().begin()->first);
    for (long k = minexp; k < lo + N; k++) {
        long xc = (k >= lo) ? xs[(size_t)(k - lo)] : 0;
        long cc = rat_mod(c.coeff(k), p);
        long d = ((xc - cc) % p + p) % p;
        if (d != 0) return CosetView{k, false, d};
    }
    return CosetView{0, true, 0};
}

bool desc_holds_coset(const ValDesc& d, const std::vector<long>& xs, long p, long N, long lo) {
    switch (d.kind) {
        case ValDesc::TRUE_K:
            return true;
        case ValDesc::AND:
            for (const auto& k : d.kids)
                if (!desc_holds_coset(k, xs, p, N, lo)) return false;
            return true;
        case ValDesc::OR:
            for (const auto& k : d.kids)
                if (desc_holds_coset(k, xs, p, N, lo)) return true;
            return false;
        case ValDesc::NOT:
            return !desc_holds_coset(d.kids[0], xs, p, N, lo);
        default:
            break;
    }
    CosetView v = diff_view(xs, d.center, p, N, lo);
    auto bound = [&]() -> long {
        Rat b = d.bound.eval_rat({});
        if (b.get_den() != 1) throw DomainError("padic_measure: non-integer order bound");
        return to_long(Int(b.get_num()));
    };
    switch (d.kind) {
        case ValDesc::ORD_GE:
            return v.inf || v.ord >= bound();
        case ValDesc::ORD_LE:
            return !v.inf && v.ord <= bound();
        case ValDesc::ORD_EQ:
            return !v.inf && v.ord == bound();
        case ValDesc::ORD_MOD:
            return !v.inf && (Int(v.ord) - d.c) % d.n == 0;
        case ValDesc::AC_EQ:
            return !v.inf && v.ac == rat_mod(d.acval, p);
        case ValDesc::POINT:
            return v.inf;
        default:
            return false;
    }
}

}  // namespace

Rat padic_measure(const ValDesc& desc, long p, long N, long lo) {
    if (p < 2 || N < 1) throw DomainError("padic_measure: need p >= 2, N >= 1");
    std::vector<long> xs((size_t)N, 0);
    long count = 0;
    for (;;) {
        if (desc_holds_coset(desc, xs, p, N, lo)) count++;
        size_t pos = 0;
        while (pos < xs.size() && ++xs[pos] == p) xs[pos++] = 0;
        if (pos == xs.size()) break;
    }
    return Rat(count) / pow_rat(Rat(p), lo + N);
}

// ---------------------------------------------------------------------------
// Reports

bool CheckReport::all_pass() const {
    for (const auto& i : items)
        if (!i.pass) return false;
    return true;
}

std::string CheckReport::to_json() const {
    using nlohmann::json;
    json arr = json::array();
    for (const auto& i : items) {
        arr.push_back({{"target", i.target},
                       {"method", i.method},
                       {"parameters", i.parameters},
                       {"expected", i.expected},
                       {"observed", i.observed},
                       {"verdict", i.verdict}});
    }
    return json{{"schema", 1}, {"checks", arr}}.dump(2);
}

std::string CheckReport::str() const {
    std::ostringstream os;
    for (const auto& i : items)
        os << "[" << i.verdict << "] " << i.target << " (" << i.method << ", " << i.parameters
           << "): expected " << i.expected << ", observed " << i.observed << "\n";
    return os.str();
}

CheckItem check_value(const std::string& target, const std::string& method,
                      const std::string& parameters, const Rat& expected, const Rat& observed,
                      const Rat& tol) {
    CheckItem it;
    it.target = target;
    it.method = method;
    it.parameters = parameters;
    it.expected = expected.get_str();
    it.observed = observed.get_str();
    Rat gap = rat_abs(expected - observed);
    Rat scale = rat_abs(expected) < 1 ? Rat(1) : rat_abs(expected);
    it.pass = (tol == 0) ? expected == observed : gap <= tol * scale;
    it.verdict = it.pass ? "match" : "mismatch";
    return it;
}

CheckReport check_sum(const std::string& target, const CPFunction& mu, const CPFunction& phi,
                      const std::vector<std::string>& zvars, const Env& env,
                      const OracleConfig& cfg) {
    CheckReport rep;
    for (const auto& q : cfg.qs) {
        Rat expected = mu.eval(env).theta(q);
        NumericSum num = numeric_sum(phi, zvars, q, env, cfg);
        std::ostringstream ps;
        ps << "q=" << q.get_str() << " B=" << std::max<long>(cfg.box, 12);
        CheckItem it = check_value(target, "theta_q truncated sum", ps.str(), expected, num.value,
                                   cfg.tol);
        // widen by the certified tail
        if (!it.pass && num.converged) {
            Rat gap = rat_abs(expected - num.value);
            Rat scale = rat_abs(expected) < 1 ? Rat(1) : rat_abs(expected);
            it.pass = gap <= cfg.tol * scale + num.tail_bound;
            it.verdict = it.pass ? "match" : "mismatch";
        }
        if (!num.converged) {
            it.pass = false;
            it.verdict = "mismatch";
            it.observed += " (no convergent tail bound)";
        }
        rep.items.push_back(std::move(it));
    }
    return rep;
}

CheckReport check_measure(const std::string& target, const MotFunction& result,
                          const ValDesc& desc, const OracleConfig& cfg, long lo) {
    CheckReport rep;
    for (long p : cfg.primes) {
        Rat expected = result.theta_count(p, {});
        Rat observed = padic_measure(desc, p, cfg.depth, lo);
        std::ostringstream ps;
        ps << "p=" << p << " N=" << cfg.depth << " lo=" << lo;
        rep.items.push_back(
            check_value(target, "residue-ring count", ps.str(), expected, observed, Rat(0)));
    }
    return rep;
}

}  // namespace motint
