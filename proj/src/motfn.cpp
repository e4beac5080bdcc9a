#include "motint/motfn.hpp"

#include <json.hpp>
#include <algorithm>
#include <sstream>

namespace motint {

MotFunction MotFunction::from_class(const GrothClass& c, int grade) {
    if (c.terms.empty()) return {};
    return {{MotTerm{c, CPFunction::constant(MotNum::from_int(Int(1))), grade}}};
}

MotFunction MotFunction::from_cpf(const CPFunction& f, int grade) {
    if (f.terms.empty()) return {};
    return {{MotTerm{GrothClass::one(), f, grade}}};
}

MotFunction MotFunction::term(const GrothClass& c, const CPFunction& f, int grade) {
    if (c.terms.empty() || f.terms.empty()) return {};
    return {{MotTerm{c, f, grade}}};
}

MotFunction MotFunction::constant(const MotNum& c) {
    return from_cpf(CPFunction::constant(c));
}

MotFunction MotFunction::operator+(const MotFunction& o) const {
    MotFunction r = *this;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    return r;
}

MotFunction MotFunction::operator*(const MotFunction& o) const {
    MotFunction r;
    for (const auto& a : terms)
        for (const auto& b : o.terms) {
            MotTerm t;
            t.cls = a.cls * b.cls;
            t.pres = a.pres * b.pres;
            t.grade = a.grade + b.grade;
            if (!t.cls.terms.empty() && !t.pres.terms.empty()) r.terms.push_back(std::move(t));
        }
    return r;
}

MotFunction MotFunction::scale(const MotNum& k) const {
    if (k.is_zero()) return {};
    MotFunction r = *this;
    for (auto& t : r.terms) t.pres = t.pres.scale(k);
    return r;
}

MotFunction MotFunction::pullback(const std::map<std::string, LinFn>& zmap,
                                  const std::map<std::string, std::string>& ac_rename) const {
    MotFunction r = *this;
    for (auto& t : r.terms) {
        // simultaneous substitution through fresh intermediates
        CPFunction f = t.pres;
        for (const auto& [v, repl] : zmap) f = f.subst(v, LinFn::var("#tmp_" + v));
        for (const auto& [v, repl] : zmap) f = f.subst("#tmp_" + v, repl);
        t.pres = f;
        for (const auto& [from, to] : ac_rename) t.cls = t.cls.rename_param(from, to);
    }
    return r;
}

MotFunction MotFunction::push_residue(const std::vector<std::string>& ac_names) const {
    MotFunction r = *this;
    for (auto& t : r.terms) {
        for (const auto& ac : ac_names) {
            auto vs = t.pres.vars();
            if (std::find(vs.begin(), vs.end(), ac) != vs.end())
                throw DomainError("push_residue: coordinate " + ac +
                                  " appears in a Presburger part");
        }
        t.cls = t.cls.bind_params(ac_names).normalized();
    }
    return r;
}

MotFunction MotFunction::push_z(const std::vector<std::string>& zvars) const {
    MotFunction r;
    size_t idx = 0;
    for (const auto& t : terms) {
        MotTerm s = t;
        try {
            s.pres = mu_sum(t.pres, zvars);
        } catch (const NotIntegrable& e) {
            throw NotIntegrable("term " + std::to_string(idx) + " (class " + t.cls.str() +
                                "): " + e.what());
        }
        if (!s.pres.terms.empty()) r.terms.push_back(std::move(s));
        idx++;
    }
    return r;
}

MotFunction MotFunction::push_inclusion(const FPtr& guard) const {
    MotFunction r = *this;
    for (auto& t : r.terms) t.pres = t.pres.restrict(guard);
    std::erase_if(r.terms, [](const MotTerm& t) { return t.pres.terms.empty(); });
    return r;
}

MotFunction MotFunction::ring_version(const MotFunction& plus, const MotFunction& minus) {
    return plus + (-minus);
}

MotFunction MotFunction::compact() const {
    // bucket by (grade, normalized generator); pure numbers fold into pres
    struct Bucket {
        GrothClass cls;
        CPFunction pres;
        int grade;
    };
    std::map<std::string, Bucket> acc;
    std::vector<std::string> order;
    for (const auto& t : terms) {
        GrothClass n = t.cls.normalized();
        for (const auto& [c, g] : n.terms) {
            bool pure = g.names.empty() && g.vars.empty() && g.eqs.empty() && g.neqs.empty() &&
                        g.params.empty();
            std::string key = "g" + std::to_string(t.grade) + "|" + (pure ? "1" : g.key());
            CPFunction part = t.pres.scale(pure ? c : MotNum::from_int(Int(1)));
            GrothClass cls;
            cls.terms.push_back({pure ? MotNum::from_int(Int(1)) : c, g});
            auto it = acc.find(key);
            if (it == acc.end()) {
                acc[key] = Bucket{cls, part, t.grade};
                order.push_back(key);
            } else {
                it->second.pres = it->second.pres + part;
            }
        }
    }
    MotFunction out;
    for (const auto& k : order) {
        Bucket& b = acc[k];
        CPFunction p = b.pres.compact();
        if (!p.terms.empty()) out.terms.push_back(MotTerm{b.cls, p, b.grade});
    }
    return out;
}

int MotFunction::is_equal(const MotFunction& o) const {
    MotFunction d = (*this - o).compact();
    int verdict = 1;
    for (const auto& t : d.terms) {
        int z = t.pres.known_zero();
        if (z == 1) continue;
        bool pure = t.cls.is_symbol_free();
        if (z == 0 && pure && !t.cls.as_motnum().is_zero()) return 0;
        verdict = -1;
    }
    return verdict;
}

MotNum MotFunction::as_motnum() const {
    MotFunction d = compact();
    MotNum acc;
    for (const auto& t : d.terms) acc = acc + t.cls.as_motnum() * t.pres.as_motnum();
    return acc;
}

GrothClass MotFunction::as_class() const {
    GrothClass acc;
    for (const auto& t : terms) acc = acc + t.cls.scale(t.pres.as_motnum());
    return acc.normalized();
}

Rat MotFunction::theta_count(long p, const Env& env) const {
    Rat acc(0);
    for (const auto& t : terms) acc += t.cls.count_eval(p) * t.pres.eval(env).theta(Rat(p));
    return acc;
}

std::vector<std::string> MotFunction::zvars() const {
    std::vector<std::string> out;
    for (const auto& t : terms)
        for (const auto& v : t.pres.vars())
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::string MotFunction::str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < terms.size(); i++) {
        if (i) os << " + ";
        const auto& t = terms[i];
        std::string cs = t.cls.str();
        if (cs != "(1)") os << cs << " (x) ";
        os << "[" << t.pres.str() << "]";
        if (t.grade != 0) os << " @grade " << t.grade;
    }
    return os.str();
}

std::string MotFunction::to_json() const {
    using nlohmann::json;
    json j;
    j["schema"] = 1;
    j["rule_table_hash"] = rule_table_hash();
    j["terms"] = json::array();
    for (const auto& t : terms) {
        json jt;
        jt["class"] = json::parse(t.cls.to_json());
        jt["pres"] = json::parse(t.pres.to_json());
        jt["grade"] = t.grade;
        j["terms"].push_back(jt);
    }
    return j.dump();
}

RationalSeries poincare_series(const MotFunction& family, const std::string& nvar) {
    CPFunction flat;
    for (const auto& t : family.terms) {
        MotNum c = t.cls.as_motnum();  // throws when symbolic
        flat = flat + t.pres.scale(c);
    }
    return mellin(flat, {nvar});
}

}  // namespace motint
