#include "motint/motnum.hpp"

#include <json.hpp>
#include <sstream>

namespace motint {

using nlohmann::json;

MotNum MotNum::from_int(const Int& n) { return from_poly(ZPoly::constant(n)); }

MotNum MotNum::from_poly(ZPoly num) {
    MotNum r;
    r.num_ = std::move(num);
    r.canonicalize();
    return r;
}

MotNum MotNum::L_power(long k) {
    MotNum r;
    r.num_ = ZPoly::constant(Int(1));
    r.shift_ = -k;
    r.canonicalize();
    return r;
}

MotNum MotNum::inv_one_minus_L_neg(long i) {
    if (i < 1) throw DomainError("inv_one_minus_L_neg: need i >= 1");
    MotNum r;
    r.num_ = ZPoly::constant(Int(1));
    r.shift_ = -i;
    r.factors_[i] = 1;
    r.canonicalize();
    return r;
}

MotNum MotNum::inv_one_minus_L(long a) {
    // a < 0: 1/(1 - L^a) = L^-a/(L^-a - 1).
    // a > 0: 1/(1 - L^a) = -1/(L^a - 1).
    if (a == 0) throw DomainError("inv_one_minus_L: a = 0");
    MotNum r;
    if (a < 0) {
        r.num_ = ZPoly::constant(Int(1));
        r.shift_ = a;
        r.factors_[-a] = 1;
    } else {
        r.num_ = ZPoly::constant(Int(-1));
        r.factors_[a] = 1;
    }
    r.canonicalize();
    return r;
}

MotNum MotNum::make(ZPoly num, long shift, std::map<long, long> factors) {
    MotNum r;
    r.num_ = std::move(num);
    r.shift_ = shift;
    r.factors_ = std::move(factors);
    r.canonicalize();
    return r;
}

void MotNum::canonicalize() {
    for (auto it = factors_.begin(); it != factors_.end();) {
        if (it->second <= 0)
            it = factors_.erase(it);
        else if (it->first < 1)
            throw DomainError("denominator factor exponent must be >= 1");
        else
            ++it;
    }
    if (num_.is_zero()) {
        shift_ = 0;
        factors_.clear();
        return;
    }
    size_t k = num_.low_order();
    if (k > 0) {
        num_ = num_.div_xk(k);
        shift_ -= (long)k;
    }
    for (auto it = factors_.begin(); it != factors_.end();) {
        ZPoly f = ZPoly::monomial(Int(1), (size_t)it->first) - ZPoly::constant(Int(1));
        while (it->second > 0) {
            auto q = num_.div_exact(f);
            if (!q) break;
            num_ = *q;
            it->second--;
        }
        if (it->second == 0)
            it = factors_.erase(it);
        else
            ++it;
    }
    // Dividing by (L^i - 1) can re-expose a power of L.
    size_t k2 = num_.low_order();
    if (k2 > 0) {
        num_ = num_.div_xk(k2);
        shift_ -= (long)k2;
    }
}

ZPoly MotNum::denom_poly() const {
    ZPoly d = ZPoly::constant(Int(1));
    for (const auto& [i, m] : factors_) {
        ZPoly f = ZPoly::monomial(Int(1), (size_t)i) - ZPoly::constant(Int(1));
        for (long j = 0; j < m; j++) d = d * f;
    }
    return d;
}

MotNum MotNum::operator+(const MotNum& o) const {
    // Common denominator: L^max(shift) * prod (L^i-1)^max(m).
    std::map<long, long> cf = factors_;
    for (const auto& [i, m] : o.factors_) cf[i] = std::max(cf.count(i) ? cf[i] : 0L, m);
    long cs = std::max(shift_, o.shift_);
    auto lift = [&](const MotNum& a) {
        ZPoly n = a.num_.mul_xk((size_t)(cs - a.shift_));
        for (const auto& [i, m] : cf) {
            long have = a.factors_.count(i) ? a.factors_.at(i) : 0;
            ZPoly f = ZPoly::monomial(Int(1), (size_t)i) - ZPoly::constant(Int(1));
            for (long j = have; j < m; j++) n = n * f;
        }
        return n;
    };
    return make(lift(*this) + lift(o), cs, cf);
}

MotNum MotNum::operator-() const {
    MotNum r = *this;
    r.num_ = -r.num_;
    return r;
}

MotNum MotNum::operator-(const MotNum& o) const { return *this + (-o); }

MotNum MotNum::operator*(const MotNum& o) const {
    std::map<long, long> cf = factors_;
    for (const auto& [i, m] : o.factors_) cf[i] += m;
    return make(num_ * o.num_, shift_ + o.shift_, cf);
}

MotNum MotNum::pow(long e) const {
    if (e < 0) throw DomainError("MotNum::pow: negative exponent");
    MotNum r = from_int(Int(1));
    for (long i = 0; i < e; i++) r = r * *this;
    return r;
}

bool MotNum::operator==(const MotNum& o) const {
    // Cross-multiplied polynomial identity (valid since a single
    // transcendental evaluation point separates elements of A).
    long base = std::min(shift_, o.shift_);
    ZPoly lhs = num_ * o.denom_poly();
    ZPoly rhs = o.num_ * denom_poly();
    lhs = lhs.mul_xk((size_t)(o.shift_ - base));
    rhs = rhs.mul_xk((size_t)(shift_ - base));
    return lhs == rhs;
}

bool MotNum::same_rep(const MotNum& o) const {
    return shift_ == o.shift_ && factors_ == o.factors_ && num_ == o.num_;
}

Rat MotNum::theta(const Rat& q) const {
    if (q <= 1) throw DomainError("theta: need q > 1");
    Rat n = num_.eval(q);
    Rat d = pow_rat(q, shift_);
    for (const auto& [i, m] : factors_) d *= pow_rat(pow_rat(q, i) - 1, m);
    return n / d;
}

bool MotNum::is_nonneg(Rat* witness) const {
    // The denominator is strictly positive on (1, inf), so the sign is the
    // numerator's sign there.
    return poly_nonneg_beyond_one(num_, witness);
}

std::string MotNum::str() const {
    if (factors_.empty() && shift_ == 0) return num_.str();
    std::ostringstream os;
    os << "(" << num_.str() << ") / (";
    bool first = true;
    if (shift_ != 0) {
        os << "L^" << shift_;
        first = false;
    }
    for (const auto& [i, m] : factors_) {
        if (!first) os << " * ";
        first = false;
        os << "(L^" << i << " - 1)";
        if (m != 1) os << "^" << m;
    }
    if (first) os << "1";
    os << ")";
    return os.str();
}

std::string MotNum::to_json() const {
    json j;
    j["num"] = json::array();
    for (const auto& c : num_.coeffs()) j["num"].push_back(c.get_str());
    j["shift"] = shift_;
    j["factors"] = json::array();
    for (const auto& [i, m] : factors_) j["factors"].push_back({i, m});
    return j.dump();
}

namespace {

struct MLexer {
    std::string s;
    size_t p = 0;
    void ws() {
        while (p < s.size() && isspace((unsigned char)s[p])) p++;
    }
    bool eat(char c) {
        ws();
        if (p < s.size() && s[p] == c) {
            p++;
            return true;
        }
        return false;
    }
    bool eat(const std::string& t) {
        ws();
        if (s.compare(p, t.size(), t) == 0) {
            p += t.size();
            return true;
        }
        return false;
    }
    Int integer() {
        ws();
        size_t q = p;
        if (q < s.size() && (s[q] == '-' || s[q] == '+')) q++;
        size_t st = q;
        while (q < s.size() && isdigit((unsigned char)s[q])) q++;
        if (q == st) throw DomainError("MotNum parse: expected integer at " + std::to_string(p));
        Int v(s.substr(p, q - p));
        p = q;
        return v;
    }
};

// poly := term (('+'|'-') term)*
// term := int ['*' Lpow] | Lpow ;  Lpow := 'L' ['^' int]
ZPoly parse_poly(MLexer& lx, char stop) {
    ZPoly acc;
    int sign = 1;
    lx.ws();
    for (;;) {
        lx.ws();
        if (lx.p >= lx.s.size() || lx.s[lx.p] == stop || lx.s[lx.p] == '/') break;
        if (lx.eat('+')) {
            sign = 1;
            continue;
        }
        if (lx.eat('-')) {
            sign = -1;
            continue;
        }
        Int c(1);
        long e = 0;
        bool have_c = false;
        lx.ws();
        if (lx.p < lx.s.size() && (isdigit((unsigned char)lx.s[lx.p]))) {
            c = lx.integer();
            have_c = true;
        }
        if (have_c) lx.eat('*');
        if (lx.eat('L')) {
            e = 1;
            if (lx.eat('^')) e = to_long(lx.integer());
        } else if (!have_c) {
            throw DomainError("MotNum parse: unexpected character at " + std::to_string(lx.p));
        }
        if (e < 0) throw DomainError("MotNum parse: negative power in numerator");
        acc = acc + ZPoly::monomial(sign * c, (size_t)e);
        sign = 1;
    }
    return acc;
}

}  // namespace

MotNum MotNum::parse(const std::string& text) {
    std::string t = text;
    size_t b = t.find_first_not_of(" \t\n");
    if (b != std::string::npos && t[b] == '{') {
        json j = json::parse(t);
        std::vector<Int> cs;
        for (const auto& c : j.at("num")) {
            if (c.is_string())
                cs.push_back(Int(c.get<std::string>()));
            else
                cs.push_back(Int(c.get<long>()));
        }
        std::map<long, long> fs;
        for (const auto& f : j.at("factors")) fs[f.at(0).get<long>()] += f.at(1).get<long>();
        return make(ZPoly(std::move(cs)), j.at("shift").get<long>(), std::move(fs));
    }
    MLexer lx{t};
    ZPoly num;
    if (lx.eat('(')) {
        num = parse_poly(lx, ')');
        if (!lx.eat(')')) throw DomainError("MotNum parse: missing ')'");
    } else {
        num = parse_poly(lx, '\0');
    }
    long shift = 0;
    std::map<long, long> fs;
    if (lx.eat('/')) {
        if (!lx.eat('(')) throw DomainError("MotNum parse: expected '(' after '/'");
        for (;;) {
            if (lx.eat('(')) {
                if (!lx.eat('L')) throw DomainError("MotNum parse: expected L in factor");
                long i = 1;
                if (lx.eat('^')) i = to_long(lx.integer());
                if (!lx.eat('-') || lx.integer() != 1 || !lx.eat(')'))
                    throw DomainError("MotNum parse: malformed (L^i - 1) factor");
                long m = 1;
                if (lx.eat('^')) m = to_long(lx.integer());
                fs[i] += m;
            } else if (lx.eat('L')) {
                long e = 1;
                if (lx.eat('^')) e = to_long(lx.integer());
                shift += e;
            } else {
                Int one = lx.integer();
                if (one != 1) throw DomainError("MotNum parse: unexpected denominator constant");
            }
            if (lx.eat('*')) continue;
            if (lx.eat(')')) break;
            throw DomainError("MotNum parse: malformed denominator");
        }
    }
    return make(std::move(num), shift, std::move(fs));
}

}  // namespace motint
