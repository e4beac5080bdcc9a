#include "motint/groth.hpp"

#include <json.hpp>
#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>

namespace motint {

// ---------------------------------------------------------------------------
// MPoly

void MPoly::trim() {
    for (auto it = c_.begin(); it != c_.end();) {
        if (it->second == 0)
            it = c_.erase(it);
        else
            ++it;
    }
}

MPoly MPoly::constant(const Rat& c) {
    MPoly p;
    if (c != 0) p.c_[{}] = c;
    return p;
}

MPoly MPoly::var(const std::string& v) {
    MPoly p;
    p.c_[{{v, 1}}] = Rat(1);
    return p;
}

bool MPoly::is_constant() const {
    return c_.empty() || (c_.size() == 1 && c_.begin()->first.empty());
}

Rat MPoly::constant_value() const {
    if (c_.empty()) return Rat(0);
    if (!is_constant()) throw DomainError("MPoly: not a constant");
    return c_.begin()->second;
}

MPoly MPoly::operator+(const MPoly& o) const {
    MPoly r = *this;
    for (const auto& [m, c] : o.c_) r.c_[m] += c;
    r.trim();
    return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + (-o); }

MPoly MPoly::operator-() const {
    MPoly r = *this;
    for (auto& [m, c] : r.c_) c = -c;
    return r;
}

MPoly MPoly::operator*(const MPoly& o) const {
    MPoly r;
    for (const auto& [m1, c1] : c_)
        for (const auto& [m2, c2] : o.c_) {
            Mono m = m1;
            for (const auto& [v, e] : m2) m[v] += e;
            r.c_[m] += c1 * c2;
        }
    r.trim();
    return r;
}

std::vector<std::string> MPoly::vars() const {
    std::vector<std::string> out;
    for (const auto& [m, c] : c_)
        for (const auto& [v, e] : m)
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

bool MPoly::depends_on(const std::string& v) const {
    for (const auto& [m, c] : c_)
        if (m.count(v)) return true;
    return false;
}

long MPoly::degree_in(const std::string& v) const {
    long d = 0;
    for (const auto& [m, c] : c_) {
        auto it = m.find(v);
        if (it != m.end()) d = std::max(d, it->second);
    }
    return d;
}

MPoly MPoly::coeff_of(const std::string& v, long d) const {
    MPoly r;
    for (const auto& [m, c] : c_) {
        auto it = m.find(v);
        long e = it == m.end() ? 0 : it->second;
        if (e != d) continue;
        Mono m2 = m;
        m2.erase(v);
        r.c_[m2] += c;
    }
    r.trim();
    return r;
}

MPoly MPoly::subst(const std::string& v, const MPoly& repl) const {
    MPoly r;
    for (const auto& [m, c] : c_) {
        Mono m2 = m;
        long e = 0;
        auto it = m2.find(v);
        if (it != m2.end()) {
            e = it->second;
            m2.erase(it);
        }
        MPoly term;
        term.c_[m2] = c;
        for (long i = 0; i < e; i++) term = term * repl;
        r = r + term;
    }
    return r;
}

MPoly MPoly::rename(const std::string& v, const std::string& w) const {
    return subst(v, MPoly::var(w));
}

MPoly MPoly::primitive() const {
    if (c_.empty()) return {};
    Int den(1), num(0);
    for (const auto& [m, c] : c_) den = lcm(den, c.get_den());
    for (const auto& [m, c] : c_) {
        Rat scaled = c * Rat(den);
        num = gcd(num, scaled.get_num());
    }
    Rat k = Rat(den, num);
    if (c_.begin()->second * k < 0) k = -k;
    MPoly r = *this;
    for (auto& [m, c] : r.c_) c *= k;
    return r;
}

static long inv_mod(long a, long p) {
    long t = 0, nt = 1, r = p, nr = a % p;
    if (nr < 0) nr += p;
    while (nr != 0) {
        long q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw DomainError("inv_mod: not invertible");
    return t < 0 ? t + p : t;
}

long MPoly::eval_mod(long p, const std::map<std::string, long>& env) const {
    long acc = 0;
    for (const auto& [m, c] : c_) {
        Int den = c.get_den();
        if (mod_pos(den, Int(p)) == 0)
            throw DomainError("eval_mod: coefficient denominator divisible by p");
        long v = to_long(mod_pos(c.get_num(), Int(p)));
        v = v * inv_mod(to_long(mod_pos(den, Int(p))), p) % p;
        for (const auto& [x, e] : m) {
            auto it = env.find(x);
            if (it == env.end()) throw DomainError("eval_mod: unbound variable " + x);
            long b = ((it->second % p) + p) % p;
            for (long i = 0; i < e; i++) v = v * b % p;
        }
        acc = (acc + v) % p;
    }
    return acc;
}

std::string MPoly::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : c_) {
        Rat a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool wrote = false;
        if (a != 1 || m.empty()) {
            os << a.get_str();
            wrote = true;
        }
        for (const auto& [v, e] : m) {
            if (wrote) os << "*";
            os << v;
            if (e > 1) os << "^" << e;
            wrote = true;
        }
    }
    return os.str();
}

namespace {

struct PParser {
    const std::string& s;
    size_t i = 0;
    explicit PParser(const std::string& text) : s(text) {}

    void ws() {
        while (i < s.size() && isspace((unsigned char)s[i])) i++;
    }
    bool eat(char c) {
        ws();
        if (i < s.size() && s[i] == c) {
            i++;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw DomainError("polynomial syntax error at position " + std::to_string(i) + ": " + msg);
    }

    MPoly expr() {
        MPoly r = eat('-') ? -term() : term();
        for (;;) {
            if (eat('+'))
                r = r + term();
            else if (eat('-'))
                r = r - term();
            else
                return r;
        }
    }
    MPoly term() {
        MPoly r = factor();
        for (;;) {
            ws();
            if (eat('*'))
                r = r * factor();
            else if (i < s.size() && (isalpha((unsigned char)s[i]) || s[i] == '('))
                r = r * factor();  // juxtaposition
            else
                return r;
        }
    }
    MPoly factor() {
        MPoly b = atom();
        ws();
        if (eat('^')) {
            ws();
            size_t j = i;
            while (i < s.size() && isdigit((unsigned char)s[i])) i++;
            if (j == i) fail("exponent expected");
            long e = std::stol(s.substr(j, i - j));
            MPoly r = MPoly::constant(Rat(1));
            for (long k = 0; k < e; k++) r = r * b;
            return r;
        }
        return b;
    }
    MPoly atom() {
        ws();
        if (eat('(')) {
            MPoly r = expr();
            if (!eat(')')) fail("')' expected");
            return r;
        }
        if (i < s.size() && (isdigit((unsigned char)s[i]))) {
            size_t j = i;
            while (i < s.size() && isdigit((unsigned char)s[i])) i++;
            return MPoly::constant(Rat(Int(s.substr(j, i - j))));
        }
        if (i < s.size() && (isalpha((unsigned char)s[i]) || s[i] == '_')) {
            size_t j = i;
            while (i < s.size() && (isalnum((unsigned char)s[i]) || s[i] == '_' || s[i] == '\''))
                i++;
            return MPoly::var(s.substr(j, i - j));
        }
        fail("term expected");
    }
};

}  // namespace

MPoly MPoly::parse(const std::string& text) {
    PParser p(text);
    MPoly r = p.expr();
    p.ws();
    if (p.i != text.size()) p.fail("trailing input");
    return r;
}

// ---------------------------------------------------------------------------
// GrothGen

void GrothGen::canon() {
    std::sort(names.begin(), names.end());
    std::sort(vars.begin(), vars.end());
    for (auto& e : eqs) e = e.primitive();
    for (auto& e : neqs) e = e.primitive();
    std::sort(eqs.begin(), eqs.end());
    eqs.erase(std::unique(eqs.begin(), eqs.end()), eqs.end());
    std::sort(neqs.begin(), neqs.end());
    neqs.erase(std::unique(neqs.begin(), neqs.end()), neqs.end());
}

static std::string system_key_with_renaming(const GrothGen& g) {
    // Rename params deterministically by their base coordinate, bound vars by
    // the lexicographically best permutation (bounded search).
    std::vector<std::string> bound = g.vars;
    std::sort(bound.begin(), bound.end());
    auto render = [&](const std::vector<std::string>& perm) {
        std::vector<MPoly> es = g.eqs, ns = g.neqs;
        auto apply = [&](MPoly p) {
            for (const auto& [v, ac] : g.params) p = p.rename(v, "@" + ac);
            for (size_t k = 0; k < perm.size(); k++)
                p = p.rename(perm[k], "#" + std::to_string(k + 1));
            return p.primitive();
        };
        std::vector<std::string> estr, nstr;
        for (const auto& e : es) estr.push_back(apply(e).str());
        for (const auto& n : ns) nstr.push_back(apply(n).str());
        std::sort(estr.begin(), estr.end());
        std::sort(nstr.begin(), nstr.end());
        std::string out = "v" + std::to_string(perm.size()) + ";";
        for (const auto& e : estr) out += e + "=0;";
        for (const auto& n : nstr) out += n + "!=0;";
        return out;
    };
    if (bound.size() > 5) return render(bound);
    std::string best;
    std::vector<std::string> perm = bound;
    do {
        std::string cand = render(perm);
        if (best.empty() || cand < best) best = cand;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best.empty()) best = render({});
    return best;
}

std::string GrothGen::system_key() const { return system_key_with_renaming(*this); }

std::string GrothGen::key() const {
    std::string k;
    for (const auto& n : names) k += "[" + n + "]";
    return k + system_key();
}

std::string GrothGen::str() const {
    std::ostringstream os;
    bool any = false;
    for (const auto& n : names) {
        if (any) os << "*";
        os << "[" << n << "]";
        any = true;
    }
    if (!vars.empty() || !eqs.empty() || !neqs.empty() || !params.empty()) {
        if (any) os << "*";
        os << "{";
        bool c = false;
        for (const auto& v : vars) {
            if (c) os << ",";
            os << v;
            c = true;
        }
        for (const auto& [v, ac] : params) {
            if (c) os << ",";
            os << v << "~" << ac;
            c = true;
        }
        os << " | ";
        c = false;
        for (const auto& e : eqs) {
            if (c) os << ", ";
            os << e.str() << " = 0";
            c = true;
        }
        for (const auto& n : neqs) {
            if (c) os << ", ";
            os << n.str() << " != 0";
            c = true;
        }
        os << "}";
        any = true;
    }
    if (!any) os << "1";
    return os.str();
}

// ---------------------------------------------------------------------------
// Rule table

namespace {

struct Rule {
    std::string pattern_key;  // system key of the presentation
    std::string pattern_str;
    GrothClass value;
};

struct RuleTable {
    std::mutex mu;
    std::vector<Rule> rules;
    std::map<std::string, size_t> by_key;
    std::map<std::string, GrothGen> presentations;  // symbol -> counting system
    long version = 0;
};

RuleTable& table() {
    static RuleTable t;
    return t;
}

}  // namespace

int declare_class_eq(const GrothGen& pattern0, const GrothClass& value) {
    GrothGen pattern = pattern0;
    pattern.canon();
    if (!pattern.names.empty()) throw DomainError("declare_class_eq: pattern must be a system");
    std::string key = pattern.system_key();
    auto& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.by_key.find(key);
    if (it != t.by_key.end()) {
        const GrothClass& old = t.rules[it->second].value;
        // conflicting redeclaration is an error; identical one is idempotent
        bool same = old.str() == value.str();
        if (!same) throw DomainError("declare_class_eq: conflicting rule for " + pattern.str());
        return (int)it->second;
    }
    t.rules.push_back({key, pattern.str(), value});
    t.by_key[key] = t.rules.size() - 1;
    // single-symbol values register a counting presentation
    if (value.terms.size() == 1 && value.terms[0].second.names.size() == 1 &&
        value.terms[0].second.eqs.empty() && value.terms[0].second.neqs.empty() &&
        value.terms[0].first == MotNum::from_int(Int(1))) {
        t.presentations.emplace(value.terms[0].second.names[0], pattern);
    }
    t.version++;
    return (int)t.rules.size() - 1;
}

long rule_table_version() {
    auto& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.version;
}

std::string rule_table_hash() {
    auto& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    size_t h = 1469598103934665603ull;
    for (const auto& r : t.rules) {
        for (char c : r.pattern_key + "->" + r.value.str()) {
            h ^= (unsigned char)c;
            h *= 1099511628211ull;
        }
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void clear_rules() {
    auto& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    t.rules.clear();
    t.by_key.clear();
    t.presentations.clear();
    t.version++;
}

// ---------------------------------------------------------------------------
// GrothClass construction and semiring structure

GrothClass GrothClass::num(const MotNum& c) {
    if (c.is_zero()) return {};
    GrothClass r;
    r.terms.push_back({c, GrothGen{}});
    return r;
}

GrothClass GrothClass::symbol(const std::string& name) {
    GrothClass r;
    GrothGen g;
    g.names = {name};
    r.terms.push_back({MotNum::from_int(Int(1)), g});
    return r;
}

GrothClass GrothClass::from_system(std::vector<std::string> vars, std::vector<MPoly> eqs,
                                   std::vector<MPoly> neqs,
                                   std::map<std::string, std::string> params) {
    GrothClass r;
    GrothGen g;
    g.vars = std::move(vars);
    g.eqs = std::move(eqs);
    g.neqs = std::move(neqs);
    g.params = std::move(params);
    g.canon();
    r.terms.push_back({MotNum::from_int(Int(1)), g});
    return r;
}

GrothClass GrothClass::operator+(const GrothClass& o) const {
    GrothClass r = *this;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    return r;
}

GrothClass GrothClass::scale(const MotNum& k) const {
    if (k.is_zero()) return {};
    GrothClass r = *this;
    for (auto& [c, g] : r.terms) c = c * k;
    return r;
}

static GrothGen gen_product(const GrothGen& a, const GrothGen& b) {
    GrothGen r = a;
    r.names.insert(r.names.end(), b.names.begin(), b.names.end());
    // rename b's bound variables apart from a's
    std::map<std::string, std::string> ren;
    auto used = [&](const std::string& v) {
        return std::find(r.vars.begin(), r.vars.end(), v) != r.vars.end() || r.params.count(v) ||
               a.params.count(v);
    };
    for (const auto& v : b.vars) {
        std::string w = v;
        int k = 1;
        while (used(w)) w = v + "_" + std::to_string(k++);
        ren[v] = w;
        r.vars.push_back(w);
    }
    for (const auto& [v, ac] : b.params) {
        // params coupled to the same base coordinate denote the same value:
        // identify them in the fiber product
        std::string w;
        for (const auto& [rv, rac] : r.params)
            if (rac == ac) {
                w = rv;
                break;
            }
        if (w.empty()) {
            w = v;
            int k = 1;
            while (used(w)) w = v + "_" + std::to_string(k++);
            r.params[w] = ac;
        }
        ren[v] = w;
    }
    auto push = [&](const MPoly& p, std::vector<MPoly>& out) {
        MPoly q = p;
        for (const auto& [v, w] : ren)
            if (v != w) q = q.rename(v, w);
        out.push_back(q);
    };
    for (const auto& e : b.eqs) push(e, r.eqs);
    for (const auto& n : b.neqs) push(n, r.neqs);
    r.canon();
    return r;
}

GrothClass GrothClass::operator*(const GrothClass& o) const {
    GrothClass r;
    for (const auto& [ca, ga] : terms)
        for (const auto& [cb, gb] : o.terms) {
            MotNum c = ca * cb;
            if (c.is_zero()) continue;
            r.terms.push_back({c, gen_product(ga, gb)});
        }
    return r;
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

/// One rewriting step on a generator, or nothing when normal.
/// Result: list of (multiplier, replacement generator).
std::optional<std::vector<std::pair<MotNum, GrothGen>>> gen_step(const GrothGen& g0) {
    using Out = std::vector<std::pair<MotNum, GrothGen>>;
    GrothGen g = g0;
    g.canon();

    // 1. constant folding
    for (size_t i = 0; i < g.eqs.size(); i++) {
        if (!g.eqs[i].is_constant()) continue;
        if (g.eqs[i].constant_value() != 0) return Out{};  // empty set
        GrothGen h = g;
        h.eqs.erase(h.eqs.begin() + (long)i);
        return Out{{MotNum::from_int(Int(1)), h}};
    }
    for (size_t i = 0; i < g.neqs.size(); i++) {
        if (!g.neqs[i].is_constant()) continue;
        if (g.neqs[i].constant_value() == 0) return Out{};  // empty set
        GrothGen h = g;
        h.neqs.erase(h.neqs.begin() + (long)i);
        return Out{{MotNum::from_int(Int(1)), h}};
    }

    auto is_bound = [&](const std::string& v) {
        return std::find(g.vars.begin(), g.vars.end(), v) != g.vars.end();
    };
    auto touches_param = [&](const MPoly& p) {
        for (const auto& v : p.vars())
            if (g.params.count(v)) return true;
        return false;
    };

    // 2. declared rules (system portion, params-free generators only)
    if (g.params.empty() && !(g.eqs.empty() && g.neqs.empty() && g.vars.empty())) {
        auto& t = table();
        std::lock_guard<std::mutex> lock(t.mu);
        auto it = t.by_key.find(g.system_key());
        if (it != t.by_key.end()) {
            Out out;
            for (const auto& [c, vg] : t.rules[it->second].value.terms) {
                GrothGen h = vg;
                h.names.insert(h.names.end(), g.names.begin(), g.names.end());
                h.canon();
                out.push_back({c, h});
            }
            return out;
        }
    }

    // 3. reduced-point power reduction: c * v^d = 0  ->  v = 0
    for (size_t i = 0; i < g.eqs.size(); i++) {
        const auto& cs = g.eqs[i].coeffs();
        if (cs.size() != 1) continue;
        const Mono& m = cs.begin()->first;
        if (m.size() != 1 || m.begin()->second < 2) continue;
        const std::string& v = m.begin()->first;
        if (!is_bound(v) && !g.params.count(v)) continue;
        GrothGen h = g;
        h.eqs[i] = MPoly::var(v);
        return Out{{MotNum::from_int(Int(1)), h}};
    }

    // 4. unit-coefficient linear elimination of a bound variable
    for (const auto& v : g.vars) {
        for (size_t i = 0; i < g.eqs.size(); i++) {
            if (g.eqs[i].degree_in(v) != 1) continue;
            MPoly c = g.eqs[i].coeff_of(v, 1);
            if (!c.is_constant() || c.constant_value() == 0) continue;
            MPoly rest = g.eqs[i].coeff_of(v, 0);
            MPoly val = rest * MPoly::constant(Rat(-1) / c.constant_value());
            GrothGen h = g;
            h.eqs.erase(h.eqs.begin() + (long)i);
            h.vars.erase(std::find(h.vars.begin(), h.vars.end(), v));
            for (auto& e : h.eqs) e = e.subst(v, val);
            for (auto& n : h.neqs) n = n.subst(v, val);
            return Out{{MotNum::from_int(Int(1)), h}};
        }
    }

    // 5. fold unused bound variables into powers of L
    {
        std::vector<std::string> unused;
        for (const auto& v : g.vars) {
            bool seen = false;
            for (const auto& e : g.eqs) seen = seen || e.depends_on(v);
            for (const auto& n : g.neqs) seen = seen || n.depends_on(v);
            if (!seen) unused.push_back(v);
        }
        if (!unused.empty()) {
            GrothGen h = g;
            for (const auto& v : unused) h.vars.erase(std::find(h.vars.begin(), h.vars.end(), v));
            return Out{{MotNum::L_power((long)unused.size()), h}};
        }
    }

    // 6. scissor split of an inequation touching a bound variable
    for (size_t i = 0; i < g.neqs.size(); i++) {
        bool bound = false;
        for (const auto& v : g.neqs[i].vars()) bound = bound || is_bound(v);
        if (!bound || touches_param(g.neqs[i])) continue;
        GrothGen without = g, with_eq = g;
        without.neqs.erase(without.neqs.begin() + (long)i);
        with_eq.neqs.erase(with_eq.neqs.begin() + (long)i);
        with_eq.eqs.push_back(g.neqs[i]);
        with_eq.canon();
        return Out{{MotNum::from_int(Int(1)), without},
                   {-MotNum::from_int(Int(1)), with_eq}};
    }

    return std::nullopt;  // normal form
}

}  // namespace

GrothClass GrothClass::normalized() const {
    std::vector<std::pair<MotNum, GrothGen>> work = terms;
    std::map<std::string, std::pair<MotNum, GrothGen>> acc;
    std::vector<std::string> order;
    int guard = 0;
    while (!work.empty()) {
        if (++guard > 100000) throw DomainError("normalize: rewriting did not terminate");
        auto [c, g] = work.back();
        work.pop_back();
        if (c.is_zero()) continue;
        auto step = gen_step(g);
        if (step) {
            for (auto& [m, h] : *step) work.push_back({c * m, h});
            continue;
        }
        GrothGen h = g;
        h.canon();
        std::string k = h.key();
        auto it = acc.find(k);
        if (it == acc.end()) {
            acc[k] = {c, h};
            order.push_back(k);
        } else {
            it->second.first = it->second.first + c;
        }
    }
    GrothClass out;
    for (const auto& k : order)
        if (!acc[k].first.is_zero()) out.terms.push_back(acc[k]);
    return out;
}

int GrothClass::is_equal(const GrothClass& o) const {
    GrothClass d = (*this - o).normalized();
    if (d.terms.empty()) return 1;
    bool symbolic = false;
    for (const auto& [c, g] : d.terms)
        if (!g.names.empty() || !g.vars.empty() || !g.eqs.empty() || !g.neqs.empty() ||
            !g.params.empty())
            symbolic = true;
    return symbolic ? -1 : 0;
}

bool GrothClass::is_symbol_free() const {
    GrothClass n = normalized();
    for (const auto& [c, g] : n.terms)
        if (!g.names.empty() || !g.vars.empty() || !g.eqs.empty() || !g.neqs.empty() ||
            !g.params.empty())
            return false;
    return true;
}

MotNum GrothClass::as_motnum() const {
    GrothClass n = normalized();
    MotNum acc;
    for (const auto& [c, g] : n.terms) {
        if (!g.names.empty() || !g.vars.empty() || !g.eqs.empty() || !g.neqs.empty() ||
            !g.params.empty())
            throw DomainError("as_motnum: class is not a pure number: " + g.str());
        acc = acc + c;
    }
    return acc;
}

std::vector<std::string> GrothClass::ac_params() const {
    std::vector<std::string> out;
    for (const auto& [c, g] : terms)
        for (const auto& [v, ac] : g.params)
            if (std::find(out.begin(), out.end(), ac) == out.end()) out.push_back(ac);
    std::sort(out.begin(), out.end());
    return out;
}

GrothClass GrothClass::bind_params(const std::vector<std::string>& ac_names) const {
    GrothClass r = *this;
    for (auto& [c, g] : r.terms) {
        for (auto it = g.params.begin(); it != g.params.end();) {
            if (std::find(ac_names.begin(), ac_names.end(), it->second) != ac_names.end()) {
                g.vars.push_back(it->first);
                it = g.params.erase(it);
            } else {
                ++it;
            }
        }
        g.canon();
    }
    return r;
}

GrothClass GrothClass::rename_param(const std::string& from, const std::string& to) const {
    GrothClass r = *this;
    for (auto& [c, g] : r.terms)
        for (auto& [v, ac] : g.params)
            if (ac == from) ac = to;
    return r;
}

// ---------------------------------------------------------------------------
// Point counting

long count_points(const GrothGen& g, long p) {
    if (p < 2 || p > 101) throw DomainError("count_points: prime out of range");
    for (long d = 2; d * d <= p; d++)
        if (p % d == 0) throw DomainError("count_points: p not prime");
    if (!g.params.empty()) throw DomainError("count_points: generator has base parameters");
    if (!g.names.empty()) throw DomainError("count_points: symbolic factor present");
    if (g.vars.size() > 4) throw DomainError("count_points: more than 4 variables");
    std::map<std::string, long> env;
    long count = 0;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == g.vars.size()) {
            for (const auto& e : g.eqs)
                if (e.eval_mod(p, env) != 0) return;
            for (const auto& n : g.neqs)
                if (n.eval_mod(p, env) == 0) return;
            count++;
            return;
        }
        for (long v = 0; v < p; v++) {
            env[g.vars[i]] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return count;
}

Rat GrothClass::count_eval(long p) const {
    GrothClass n = normalized();
    Rat acc(0);
    for (const auto& [c, g] : n.terms) {
        Rat v = c.theta(Rat(p));
        if (!g.params.empty())
            throw DomainError("count_eval: unbound base parameters in " + g.str());
        GrothGen sys = g;
        sys.names.clear();
        for (const auto& name : g.names) {
            GrothGen pres;
            {
                auto& t = table();
                std::lock_guard<std::mutex> lock(t.mu);
                auto it = t.presentations.find(name);
                if (it == t.presentations.end())
                    throw DomainError("count_eval: no counting presentation for [" + name + "]");
                pres = it->second;
            }
            v *= Rat(count_points(pres, p));
        }
        if (!sys.vars.empty() || !sys.eqs.empty() || !sys.neqs.empty())
            v *= Rat(count_points(sys, p));
        acc += v;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Printing

std::string GrothClass::str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < terms.size(); i++) {
        if (i) os << " + ";
        os << "(" << terms[i].first.str() << ")";
        std::string gs = terms[i].second.str();
        if (gs != "1") os << "*" << gs;
    }
    return os.str();
}

std::string GrothClass::to_json() const {
    using nlohmann::json;
    json j;
    j["schema"] = 1;
    j["rule_table_hash"] = rule_table_hash();
    j["terms"] = json::array();
    for (const auto& [c, g] : terms) {
        json jt;
        jt["coeff"] = json::parse(c.to_json());
        jt["names"] = g.names;
        jt["vars"] = g.vars;
        jt["eqs"] = json::array();
        for (const auto& e : g.eqs) jt["eqs"].push_back(e.str());
        jt["neqs"] = json::array();
        for (const auto& n : g.neqs) jt["neqs"].push_back(n.str());
        jt["params"] = json::object();
        for (const auto& [v, ac] : g.params) jt["params"][v] = ac;
        j["terms"].push_back(jt);
    }
    return j.dump();
}

}  // namespace motint
