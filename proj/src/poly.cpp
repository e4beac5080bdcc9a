#include "motint/poly.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace motint {

Rat pow_rat(const Rat& q, long e) {
    if (e == 0) return Rat(1);
    bool neg = e < 0;
    unsigned long k = neg ? -(unsigned long)e : (unsigned long)e;
    Rat num, den;
    mpz_pow_ui(num.get_num_mpz_t(), q.get_num().get_mpz_t(), k);
    mpz_pow_ui(num.get_den_mpz_t(), q.get_den().get_mpz_t(), k);
    num.canonicalize();
    if (!neg) return num;
    if (num == 0) throw DomainError("pow_rat: 0 to a negative power");
    return Rat(1) / num;
}

long to_long(const Int& a) {
    if (!a.fits_slong_p()) throw DomainError("integer out of machine range");
    return a.get_si();
}

Int to_int(const Rat& q) {
    if (q.get_den() != 1) throw DomainError("expected an integer, got " + q.get_str());
    return q.get_num();
}

ZPoly::ZPoly(std::vector<Int> coeffs) : c_(std::move(coeffs)) { trim(); }

ZPoly ZPoly::constant(const Int& c) {
    ZPoly p;
    if (c != 0) p.c_ = {c};
    return p;
}

ZPoly ZPoly::monomial(const Int& c, size_t deg) {
    ZPoly p;
    if (c != 0) {
        p.c_.assign(deg + 1, Int(0));
        p.c_[deg] = c;
    }
    return p;
}

void ZPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

const Int& ZPoly::coeff(size_t i) const {
    static const Int zero(0);
    return i < c_.size() ? c_[i] : zero;
}

const Int& ZPoly::lead() const {
    if (c_.empty()) throw DomainError("lead of zero polynomial");
    return c_.back();
}

ZPoly ZPoly::operator+(const ZPoly& o) const {
    std::vector<Int> r(std::max(c_.size(), o.c_.size()), Int(0));
    for (size_t i = 0; i < c_.size(); i++) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); i++) r[i] += o.c_[i];
    return ZPoly(std::move(r));
}

ZPoly ZPoly::operator-(const ZPoly& o) const { return *this + (-o); }

ZPoly ZPoly::operator-() const {
    std::vector<Int> r(c_);
    for (auto& x : r) x = -x;
    return ZPoly(std::move(r));
}

ZPoly ZPoly::operator*(const ZPoly& o) const {
    if (is_zero() || o.is_zero()) return ZPoly();
    std::vector<Int> r(c_.size() + o.c_.size() - 1, Int(0));
    for (size_t i = 0; i < c_.size(); i++)
        for (size_t j = 0; j < o.c_.size(); j++) r[i + j] += c_[i] * o.c_[j];
    return ZPoly(std::move(r));
}

ZPoly ZPoly::mul_scalar(const Int& k) const {
    std::vector<Int> r(c_);
    for (auto& x : r) x *= k;
    return ZPoly(std::move(r));
}

ZPoly ZPoly::mul_xk(size_t k) const {
    if (is_zero() || k == 0) return *this;
    std::vector<Int> r(k, Int(0));
    r.insert(r.end(), c_.begin(), c_.end());
    return ZPoly(std::move(r));
}

Rat ZPoly::eval(const Rat& x) const {
    Rat acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + Rat(*it);
    return acc;
}

Int ZPoly::eval_int(const Int& x) const {
    Int acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

size_t ZPoly::low_order() const {
    for (size_t i = 0; i < c_.size(); i++)
        if (c_[i] != 0) return i;
    return 0;
}

ZPoly ZPoly::div_xk(size_t k) const {
    if (k == 0 || is_zero()) return *this;
    if (k >= c_.size()) throw DomainError("div_xk: not divisible");
    return ZPoly(std::vector<Int>(c_.begin() + k, c_.end()));
}

std::optional<ZPoly> ZPoly::div_exact(const ZPoly& d) const {
    if (d.is_zero()) throw DomainError("division by zero polynomial");
    if (is_zero()) return ZPoly();
    if (degree() < d.degree()) return std::nullopt;
    std::vector<Int> rem(c_);
    std::vector<Int> quot(c_.size() - d.c_.size() + 1, Int(0));
    for (long i = (long)rem.size() - 1; i >= (long)d.c_.size() - 1; i--) {
        if (rem[i] == 0) continue;
        if (rem[i] % d.lead() != 0) return std::nullopt;
        Int q = rem[i] / d.lead();
        quot[i - d.degree()] = q;
        for (size_t j = 0; j < d.c_.size(); j++) rem[i - d.degree() + j] -= q * d.c_[j];
    }
    for (const auto& x : rem)
        if (x != 0) return std::nullopt;
    return ZPoly(std::move(quot));
}

ZPoly ZPoly::derivative() const {
    if (c_.size() <= 1) return ZPoly();
    std::vector<Int> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); i++) r[i - 1] = c_[i] * Int((long)i);
    return ZPoly(std::move(r));
}

std::string ZPoly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (long i = degree(); i >= 0; i--) {
        const Int& a = coeff((size_t)i);
        if (a == 0) continue;
        Int mag = abs(a);
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        if (i == 0) {
            os << mag.get_str();
        } else {
            if (mag != 1) os << mag.get_str() << "*";
            os << var;
            if (i != 1) os << "^" << i;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Sturm-based sign analysis on (1, infinity).

namespace {

using QP = std::vector<Rat>;  // dense, trailing zeros trimmed

void qtrim(QP& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

QP qfrom(const ZPoly& p) {
    QP r;
    r.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) r.push_back(Rat(c));
    return r;
}

Rat qeval(const QP& p, const Rat& x) {
    Rat acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

QP qderiv(const QP& p) {
    QP r;
    for (size_t i = 1; i < p.size(); i++) r.push_back(p[i] * Rat((long)i));
    return r;
}

// Remainder of polynomial division.
QP qrem(QP a, const QP& b) {
    qtrim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Rat q = a.back() / b.back();
        size_t off = a.size() - b.size();
        for (size_t i = 0; i < b.size(); i++) a[off + i] -= q * b[i];
        a.back() = 0;  // cancels exactly
        qtrim(a);
    }
    return a;
}

QP qgcd(QP a, QP b) {
    qtrim(a);
    qtrim(b);
    while (!b.empty()) {
        QP r = qrem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rat l = a.back();
        for (auto& c : a) c /= l;
    }
    return a;
}

QP qdiv(QP a, const QP& b) {  // exact quotient (used for squarefree part)
    QP q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rat(0));
    while (a.size() >= b.size() && !a.empty()) {
        Rat c = a.back() / b.back();
        size_t off = a.size() - b.size();
        q[off] = c;
        for (size_t i = 0; i < b.size(); i++) a[off + i] -= c * b[i];
        qtrim(a);
    }
    return q;
}

std::vector<QP> sturm_chain(const QP& p) {
    std::vector<QP> chain;
    chain.push_back(p);
    QP d = qderiv(p);
    qtrim(d);
    if (!d.empty()) chain.push_back(d);
    while (chain.size() >= 2) {
        QP r = qrem(chain[chain.size() - 2], chain.back());
        qtrim(r);
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        chain.push_back(std::move(r));
    }
    return chain;
}

int sgn(const Rat& x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); }

int variations_at(const std::vector<QP>& chain, const Rat& x) {
    int v = 0, prev = 0;
    for (const auto& p : chain) {
        int s = sgn(qeval(p, x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) v++;
        prev = s;
    }
    return v;
}

}  // namespace

bool poly_nonneg_beyond_one(const ZPoly& p, Rat* witness) {
    if (p.is_zero()) return true;
    if (p.degree() == 0) {
        bool ok = p.coeff(0) >= 0;
        if (!ok && witness) *witness = Rat(2);
        return ok;
    }
    // Squarefree part, with any (X-1)^k factor removed (interval is open at 1).
    QP q = qfrom(p);
    QP g = qgcd(q, qderiv(q));
    QP s = g.size() <= 1 ? q : qdiv(q, g);
    QP xm1 = {Rat(-1), Rat(1)};
    while (s.size() > 1 && qeval(s, Rat(1)) == 0) s = qdiv(s, xm1);

    // Cauchy root bound for s.
    Rat maxc(0);
    for (size_t i = 0; i + 1 < s.size(); i++) maxc = std::max(maxc, Rat(abs(s[i] / s.back())));
    Rat bound = Rat(2) + maxc;

    auto chain = sturm_chain(s);
    auto count = [&](const Rat& a, const Rat& b) {
        return variations_at(chain, a) - variations_at(chain, b);  // roots in (a, b]
    };

    // Isolate roots of s in (1, bound]; force every interval's left end > 1
    // and midpoints off the roots so interval endpoints are valid gap samples.
    struct Iv {
        Rat a, b;
        int n;
    };
    std::deque<Iv> work{{Rat(1), bound, count(Rat(1), bound)}};
    std::vector<Iv> isolated;
    while (!work.empty()) {
        Iv iv = work.front();
        work.pop_front();
        if (iv.n == 0) continue;
        if (iv.n == 1 && iv.a > 1) {
            isolated.push_back(iv);
            continue;
        }
        Rat m = (iv.a + iv.b) / 2;
        // Nudge off a root of s so variation counts at m are clean.
        Rat step = (iv.b - iv.a) / 64;
        while (qeval(s, m) == 0) m += step, step /= 7;
        int left = count(iv.a, m);
        work.push_back({iv.a, m, left});
        work.push_back({m, iv.b, iv.n - left});
    }
    std::sort(isolated.begin(), isolated.end(), [](const Iv& x, const Iv& y) { return x.a < y.a; });

    // Sample every maximal root-free open interval of (1, inf): interval
    // endpoints sit strictly between consecutive roots, and one sample beyond
    // the root bound covers the tail. Sign of p is constant on each gap.
    std::vector<Rat> samples;
    for (const auto& iv : isolated) {
        samples.push_back(iv.a);
        samples.push_back(iv.b);
    }
    samples.push_back(bound + 1);
    if (isolated.empty()) samples.push_back((Rat(1) + bound) / 2);
    for (const auto& x : samples) {
        if (x <= 1) continue;
        if (p.eval(x) < 0) {
            if (witness) *witness = x;
            return false;
        }
    }
    return true;
}

}  // namespace motint
