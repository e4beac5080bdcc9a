#include "motint/valfield.hpp"

#include <json.hpp>
#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace motint {

// ---------------------------------------------------------------------------
// SeriesPoint

void SeriesPoint::trim() {
    for (auto it = c_.begin(); it != c_.end();) {
        if (it->second == 0)
            it = c_.erase(it);
        else
            ++it;
    }
}

SeriesPoint SeriesPoint::constant(const Rat& c) {
    SeriesPoint p;
    if (c != 0) p.c_[0] = c;
    return p;
}

SeriesPoint SeriesPoint::t_power(long k, const Rat& c) {
    SeriesPoint p;
    if (c != 0) p.c_[k] = c;
    return p;
}

std::optional<long> SeriesPoint::ord() const {
    if (c_.empty()) return std::nullopt;
    return c_.begin()->first;
}

Rat SeriesPoint::ac() const { return c_.empty() ? Rat(0) : c_.begin()->second; }

Rat SeriesPoint::coeff(long k) const {
    auto it = c_.find(k);
    return it == c_.end() ? Rat(0) : it->second;
}

SeriesPoint SeriesPoint::operator+(const SeriesPoint& o) const {
    SeriesPoint r = *this;
    for (const auto& [k, v] : o.c_) r.c_[k] += v;
    r.trim();
    return r;
}

SeriesPoint SeriesPoint::operator-() const {
    SeriesPoint r = *this;
    for (auto& [k, v] : r.c_) v = -v;
    return r;
}

SeriesPoint SeriesPoint::operator-(const SeriesPoint& o) const { return *this + (-o); }

SeriesPoint SeriesPoint::operator*(const SeriesPoint& o) const {
    SeriesPoint r;
    for (const auto& [k1, v1] : c_)
        for (const auto& [k2, v2] : o.c_) r.c_[k1 + k2] += v1 * v2;
    r.trim();
    return r;
}

bool SeriesPoint::integer_coeffs() const {
    for (const auto& [k, v] : c_)
        if (v.get_den() != 1) return false;
    return true;
}

SeriesPoint SeriesPoint::parse(const std::string& text) {
    // terms: [+-] [rat] [* ] [t [^ [-]int]]
    SeriesPoint out;
    size_t i = 0;
    auto ws = [&] {
        while (i < text.size() && isspace((unsigned char)text[i])) i++;
    };
    auto fail = [&](const std::string& m) -> void {
        throw DomainError("series literal error at position " + std::to_string(i) + ": " + m);
    };
    bool first = true;
    for (;;) {
        ws();
        if (i == text.size()) break;
        int sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            sign = text[i] == '-' ? -1 : 1;
            i++;
            ws();
        } else if (!first) {
            fail("'+' or '-' expected");
        }
        first = false;
        Rat coef(1);
        bool have_num = false;
        if (i < text.size() && isdigit((unsigned char)text[i])) {
            size_t j = i;
            while (i < text.size() && isdigit((unsigned char)text[i])) i++;
            Int num(text.substr(j, i - j));
            Int den(1);
            if (i < text.size() && text[i] == '/') {
                i++;
                j = i;
                while (i < text.size() && isdigit((unsigned char)text[i])) i++;
                if (j == i) fail("denominator expected");
                den = Int(text.substr(j, i - j));
            }
            coef = Rat(num, den);
            coef.canonicalize();
            have_num = true;
            ws();
            if (i < text.size() && text[i] == '*') {
                i++;
                ws();
            }
        }
        long exp = 0;
        if (i < text.size() && text[i] == 't') {
            i++;
            exp = 1;
            ws();
            if (i < text.size() && text[i] == '^') {
                i++;
                ws();
                size_t j = i;
                if (i < text.size() && text[i] == '-') i++;
                while (i < text.size() && isdigit((unsigned char)text[i])) i++;
                if (j == i) fail("exponent expected");
                exp = std::stol(text.substr(j, i - j));
            }
        } else if (!have_num) {
            fail("coefficient or t expected");
        }
        out = out + SeriesPoint::t_power(exp, Rat(sign) * coef);
    }
    return out;
}

std::string SeriesPoint::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : c_) {
        Rat a = v;
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
        if (k == 0) {
            os << a.get_str();
        } else {
            if (a != 1) os << a.get_str() << "*";
            os << "t";
            if (k != 1) os << "^" << k;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Descriptions

ValDesc vd_true() { return ValDesc{ValDesc::TRUE_K, {}, {}, 0, 0, 0, {}}; }
ValDesc vd_ord_ge(const SeriesPoint& c, const LinFn& v) {
    return ValDesc{ValDesc::ORD_GE, c, v, 0, 0, 0, {}};
}
ValDesc vd_ord_le(const SeriesPoint& c, const LinFn& v) {
    return ValDesc{ValDesc::ORD_LE, c, v, 0, 0, 0, {}};
}
ValDesc vd_ord_eq(const SeriesPoint& c, const LinFn& v) {
    return ValDesc{ValDesc::ORD_EQ, c, v, 0, 0, 0, {}};
}
ValDesc vd_ord_mod(const SeriesPoint& c, const Int& r, const Int& n) {
    return ValDesc{ValDesc::ORD_MOD, c, LinFn(), r, n, 0, {}};
}
ValDesc vd_ac_eq(const SeriesPoint& c, const Rat& xi) {
    if (xi == 0) throw DomainError("vd_ac_eq: angular component must be nonzero");
    return ValDesc{ValDesc::AC_EQ, c, LinFn(), 0, 0, xi, {}};
}
ValDesc vd_point(const SeriesPoint& c) { return ValDesc{ValDesc::POINT, c, LinFn(), 0, 0, 0, {}}; }
ValDesc vd_and(std::vector<ValDesc> kids) {
    return ValDesc{ValDesc::AND, {}, LinFn(), 0, 0, 0, std::move(kids)};
}
ValDesc vd_or(std::vector<ValDesc> kids) {
    return ValDesc{ValDesc::OR, {}, LinFn(), 0, 0, 0, std::move(kids)};
}
ValDesc vd_not(ValDesc k) { return ValDesc{ValDesc::NOT, {}, LinFn(), 0, 0, 0, {std::move(k)}}; }

std::string ValDesc::str() const {
    std::ostringstream os;
    auto cs = [&] { return center.is_zero() ? std::string("x") : "(x - " + center.str() + ")"; };
    switch (kind) {
        case TRUE_K: return "true";
        case ORD_GE: return "ord " + cs() + " >= " + bound.str();
        case ORD_LE: return "ord " + cs() + " <= " + bound.str();
        case ORD_EQ: return "ord " + cs() + " = " + bound.str();
        case ORD_MOD: return "ord " + cs() + " = " + c.get_str() + " mod " + n.get_str();
        case AC_EQ: return "ac " + cs() + " = " + acval.get_str();
        case POINT: return "x = " + center.str();
        case AND:
        case OR: {
            for (size_t i = 0; i < kids.size(); i++) {
                if (i) os << (kind == AND ? " and " : " or ");
                os << "(" << kids[i].str() << ")";
            }
            return os.str();
        }
        case NOT: return "not (" + kids[0].str() + ")";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Cells

bool ValCell::contains(const SeriesPoint& x, const Env& base) const {
    SeriesPoint d = x - center;
    if (kind == 0) return d.is_zero() && f_eval(constraint, base);
    auto o = d.ord();
    if (!o) return false;
    Env env = base;
    env[ivar] = Int(*o);
    if (!f_eval(constraint, env)) return false;
    Rat a = d.ac();
    if (ac_pin) return a == *ac_pin;
    for (const auto& e : ac_excluded)
        if (a == e) return false;
    return a != 0;
}

std::string ValCell::str() const {
    std::ostringstream os;
    if (kind == 0) {
        os << "0-cell {x = " << center.str() << "}";
        if (constraint->kind != Formula::TRUE_K) os << " where " << constraint->str();
        return os.str();
    }
    os << "1-cell {ord(x - " << center.str() << ") = " << ivar << ", ac = ";
    if (ac_pin)
        os << ac_pin->get_str();
    else {
        os << acvar;
        if (!ac_excluded.empty()) {
            os << " not in {";
            for (size_t i = 0; i < ac_excluded.size(); i++)
                os << (i ? "," : "") << ac_excluded[i].get_str();
            os << "}";
        }
    }
    os << "} on " << constraint->str();
    return os.str();
}

std::string ValCell::to_json() const {
    using nlohmann::json;
    json j;
    j["schema"] = 1;
    j["kind"] = kind;
    j["center"] = center.str();
    j["constraint"] = json::parse(constraint->to_json());
    if (kind == 1) {
        j["ivar"] = ivar;
        if (ac_pin)
            j["ac_pin"] = ac_pin->get_str();
        else {
            j["acvar"] = acvar;
            j["ac_excluded"] = json::array();
            for (const auto& e : ac_excluded) j["ac_excluded"].push_back(e.get_str());
        }
    }
    return j.dump();
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

std::vector<SeriesPoint> collect_centers(const ValDesc& d, std::vector<SeriesPoint>& out) {
    switch (d.kind) {
        case ValDesc::ORD_GE:
        case ValDesc::ORD_LE:
        case ValDesc::ORD_EQ:
        case ValDesc::ORD_MOD:
        case ValDesc::AC_EQ:
        case ValDesc::POINT:
            if (std::find(out.begin(), out.end(), d.center) == out.end()) out.push_back(d.center);
            break;
        default:
            for (const auto& k : d.kids) collect_centers(k, out);
    }
    return out;
}

/// Raw tree cell before the description is evaluated on it.
struct RawCell {
    SeriesPoint center;
    std::optional<long> lo;  // exclusive lower bound for the order variable
    std::optional<long> hi;  // exclusive upper bound
    std::optional<long> fixed;
    std::vector<Rat> excluded;  // excluded directions at the fixed level
};

void tree_cells(const std::vector<SeriesPoint>& C, std::optional<long> entry,
                std::vector<RawCell>& out) {
    if (C.size() == 1) {
        out.push_back(RawCell{C[0], entry, std::nullopt, std::nullopt, {}});
        return;
    }
    // minimal pairwise distance
    long m = 0;
    bool have = false;
    for (size_t i = 0; i < C.size(); i++)
        for (size_t j = i + 1; j < C.size(); j++) {
            auto o = (C[i] - C[j]).ord();
            if (!o) throw DomainError("annulus_decompose: duplicate centers");
            if (!have || *o < m) m = *o, have = true;
        }
    const SeriesPoint& rep = C[0];
    // subclusters: equivalence by distance > m
    std::vector<std::vector<SeriesPoint>> clusters;
    for (const auto& c : C) {
        bool placed = false;
        for (auto& cl : clusters) {
            auto o = (c - cl[0]).ord();
            if (o && *o > m) {
                cl.push_back(c);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({c});
    }
    // outer annulus family around the representative
    out.push_back(RawCell{rep, entry, m, std::nullopt, {}});
    // shell at level m, minus the directions toward the other subclusters
    std::vector<Rat> dirs;
    for (const auto& cl : clusters) {
        if (&cl == &clusters[0] && cl[0] == rep) continue;
        SeriesPoint d = cl[0] - rep;
        if (d.ord() && *d.ord() == m) dirs.push_back(d.ac());
    }
    std::sort(dirs.begin(), dirs.end());
    out.push_back(RawCell{rep, std::nullopt, std::nullopt, m, dirs});
    for (const auto& cl : clusters) tree_cells(cl, m, out);
}

/// Relation between a raw cell's order levels and an atom center at
/// distance dord from the cell center. The ultrametric tree guarantees
/// every cell sits entirely on one side (or exactly at) dord.
enum class Regime { BELOW, AT, ABOVE };

Regime regime_of(const RawCell& rc, long dord) {
    if (rc.fixed) {
        if (*rc.fixed == dord) return Regime::AT;
        return *rc.fixed > dord ? Regime::ABOVE : Regime::BELOW;
    }
    if (rc.lo && dord <= *rc.lo) return Regime::ABOVE;
    return Regime::BELOW;
}

/// Truth of `d` on the 1-cell (raw cell rc, order var iv, angular eta).
/// eta_pin: the branch's pinned value, or nullopt for the generic branch
/// (every angular atom is then false).
FPtr desc_on_cell(const ValDesc& d, const RawCell& rc, const std::string& iv,
                  const std::optional<Rat>& eta_pin) {
    switch (d.kind) {
        case ValDesc::TRUE_K:
            return f_true();
        case ValDesc::AND:
        case ValDesc::OR: {
            std::vector<FPtr> ks;
            for (const auto& k : d.kids) ks.push_back(desc_on_cell(k, rc, iv, eta_pin));
            return d.kind == ValDesc::AND ? f_and(std::move(ks)) : f_or(std::move(ks));
        }
        case ValDesc::NOT:
            return f_not(desc_on_cell(d.kids[0], rc, iv, eta_pin));
        case ValDesc::POINT:
            return f_false();  // 1-cells never contain a description center
        default:
            break;
    }
    SeriesPoint delta = rc.center - d.center;
    auto dord = delta.ord();
    // Effective order term and, when determined, the angular value.
    LinFn o = LinFn::var(iv);
    std::optional<Rat> acv;  // nullopt: ac is eta (free or pinned)
    Rat ac_shift(0);         // ac = eta + ac_shift in the AT regime
    if (dord) {
        switch (regime_of(rc, *dord)) {
            case Regime::BELOW:
                break;  // ord(x - d.center) = i, ac = eta
            case Regime::AT:
                // shell collision; eta != -ac(delta) holds by construction
                o = LinFn::constant(Rat(Int(*dord)));
                ac_shift = delta.ac();
                break;
            case Regime::ABOVE:
                o = LinFn::constant(Rat(Int(*dord)));
                acv = delta.ac();
                break;
        }
    }
    switch (d.kind) {
        case ValDesc::ORD_GE:
            return f_ge(o - d.bound);
        case ValDesc::ORD_LE:
            return f_le(o - d.bound);
        case ValDesc::ORD_EQ:
            return f_eq(o - d.bound);
        case ValDesc::ORD_MOD:
            return f_mod(o, d.c, d.n);
        case ValDesc::AC_EQ: {
            if (acv) return *acv == d.acval ? f_true() : f_false();
            if (!eta_pin) return f_false();  // generic branch avoids every pin
            return *eta_pin + ac_shift == d.acval ? f_true() : f_false();
        }
        default:
            return f_false();
    }
}

/// Candidate pins for eta on this raw cell coming from angular atoms.
void collect_eta_pins(const ValDesc& d, const RawCell& rc, std::vector<Rat>& pins) {
    switch (d.kind) {
        case ValDesc::AND:
        case ValDesc::OR:
        case ValDesc::NOT:
            for (const auto& k : d.kids) collect_eta_pins(k, rc, pins);
            return;
        case ValDesc::AC_EQ:
            break;
        default:
            return;
    }
    SeriesPoint delta = rc.center - d.center;
    auto dord = delta.ord();
    Rat pin = d.acval;
    if (dord) {
        switch (regime_of(rc, *dord)) {
            case Regime::BELOW:
                break;
            case Regime::AT:
                pin = d.acval - delta.ac();
                break;
            case Regime::ABOVE:
                return;  // ac constant on the cell; no eta pin involved
        }
    }
    if (pin == 0) return;
    if (std::find(pins.begin(), pins.end(), pin) == pins.end()) pins.push_back(pin);
}

/// Truth of `d` at the single point x = c (0-cell).
FPtr desc_at_point(const ValDesc& d, const SeriesPoint& c) {
    switch (d.kind) {
        case ValDesc::TRUE_K:
            return f_true();
        case ValDesc::AND:
        case ValDesc::OR: {
            std::vector<FPtr> ks;
            for (const auto& k : d.kids) ks.push_back(desc_at_point(k, c));
            return d.kind == ValDesc::AND ? f_and(std::move(ks)) : f_or(std::move(ks));
        }
        case ValDesc::NOT:
            return f_not(desc_at_point(d.kids[0], c));
        default:
            break;
    }
    SeriesPoint delta = c - d.center;
    auto dord = delta.ord();
    switch (d.kind) {
        case ValDesc::ORD_GE:
            return dord ? f_ge(LinFn::constant(Rat(Int(*dord))) - d.bound) : f_true();
        case ValDesc::ORD_LE:
            return dord ? f_le(LinFn::constant(Rat(Int(*dord))) - d.bound) : f_false();
        case ValDesc::ORD_EQ:
            return dord ? f_eq(LinFn::constant(Rat(Int(*dord))) - d.bound) : f_false();
        case ValDesc::ORD_MOD:
            return dord ? f_mod(LinFn::constant(Rat(Int(*dord))), d.c, d.n) : f_false();
        case ValDesc::AC_EQ:
            return (dord && delta.ac() == d.acval) ? f_true() : f_false();
        case ValDesc::POINT:
            return delta.is_zero() ? f_true() : f_false();
        default:
            return f_false();
    }
}

/// Provably empty for every value of the free variables?
bool provably_empty(const FPtr& f) {
    if (f->kind == Formula::FALSE_K) return true;
    FPtr closed = f;
    for (const auto& v : f_free_vars(f)) closed = f_exists(v, closed);
    return f_simplify(qe(closed))->kind == Formula::FALSE_K;
}

}  // namespace

std::vector<ValCell> annulus_decompose(const ValDesc& desc) {
    std::vector<SeriesPoint> centers;
    collect_centers(desc, centers);
    if (centers.empty()) throw DomainError("annulus_decompose: no explicit centers");
    std::vector<RawCell> raw;
    tree_cells(centers, std::nullopt, raw);

    std::vector<ValCell> out;
    int serial = 0;
    for (const auto& rc : raw) {
        serial++;
        std::string iv = "i" + std::to_string(serial);
        std::string av = "eta" + std::to_string(serial);
        // interval constraint of the raw cell
        std::vector<FPtr> iv_c;
        if (rc.fixed) iv_c.push_back(f_eq(LinFn::var(iv) - LinFn::constant(Rat(Int(*rc.fixed)))));
        if (rc.lo) iv_c.push_back(f_ge(LinFn::var(iv) - LinFn::constant(Rat(Int(*rc.lo + 1)))));
        if (rc.hi) iv_c.push_back(f_le(LinFn::var(iv) - LinFn::constant(Rat(Int(*rc.hi - 1)))));
        FPtr interval = f_and(iv_c);

        std::vector<Rat> pins;
        collect_eta_pins(desc, rc, pins);
        std::sort(pins.begin(), pins.end());
        // pinned-direction branches
        for (const auto& pin : pins) {
            if (std::find(rc.excluded.begin(), rc.excluded.end(), pin) != rc.excluded.end())
                continue;
            FPtr sel = f_simplify(f_and({interval, desc_on_cell(desc, rc, iv, pin)}));
            if (provably_empty(sel)) continue;
            ValCell cell;
            cell.kind = 1;
            cell.center = rc.center;
            cell.ivar = iv;
            cell.acvar = av;
            cell.constraint = sel;
            cell.ac_pin = pin;
            out.push_back(std::move(cell));
        }
        // generic branch: eta off every pinned or excluded direction
        {
            FPtr sel = f_simplify(f_and({interval, desc_on_cell(desc, rc, iv, std::nullopt)}));
            if (!provably_empty(sel)) {
                ValCell cell;
                cell.kind = 1;
                cell.center = rc.center;
                cell.ivar = iv;
                cell.acvar = av;
                cell.constraint = sel;
                cell.ac_excluded = rc.excluded;
                for (const auto& p : pins)
                    if (std::find(cell.ac_excluded.begin(), cell.ac_excluded.end(), p) ==
                        cell.ac_excluded.end())
                        cell.ac_excluded.push_back(p);
                std::sort(cell.ac_excluded.begin(), cell.ac_excluded.end());
                out.push_back(std::move(cell));
            }
        }
    }
    // 0-cells: the centers themselves
    for (const auto& c : centers) {
        FPtr sel = f_simplify(desc_at_point(desc, c));
        if (sel->kind == Formula::FALSE_K) continue;
        ValCell cell;
        cell.kind = 0;
        cell.center = c;
        cell.constraint = sel;
        out.push_back(std::move(cell));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integration

MotFunction integrate_1cell(const ValCell& cell, const MotFunction& psi) {
    if (cell.kind != 1) throw DomainError("integrate_1cell: not a 1-cell");
    // angular factor: either eta pinned to one nonzero value, or eta free
    // off the excluded directions
    GrothClass ang;
    if (cell.ac_pin) {
        ang = GrothClass::from_system({}, {MPoly::var(cell.acvar) - MPoly::constant(*cell.ac_pin)},
                                      {}, {{cell.acvar, cell.acvar}});
    } else {
        std::vector<MPoly> neqs = {MPoly::var(cell.acvar)};
        for (const auto& e : cell.ac_excluded)
            neqs.push_back(MPoly::var(cell.acvar) - MPoly::constant(e));
        ang = GrothClass::from_system({}, {}, neqs, {{cell.acvar, cell.acvar}});
    }
    CPFunction vol = CPFunction::term(MotNum::from_int(Int(1)), {},
                                      -LinFn::var(cell.ivar) - LinFn::constant(1),
                                      cell.constraint);
    MotFunction integrand = psi * MotFunction::term(ang, vol, 0);
    return integrand.push_residue({cell.acvar}).push_z({cell.ivar});
}

MotFunction integrate_0cell(const ValCell& cell, const MotFunction& psi, const LinFn& gamma) {
    if (cell.kind != 0) throw DomainError("integrate_0cell: not a 0-cell");
    CPFunction w = CPFunction::term(MotNum::from_int(Int(1)), {}, gamma, cell.constraint);
    MotFunction r = psi * MotFunction::from_cpf(w);
    // bind any angular parameters the integrand still carries
    std::vector<std::string> acs;
    for (const auto& t : r.terms)
        for (const auto& a : t.cls.ac_params())
            if (std::find(acs.begin(), acs.end(), a) == acs.end()) acs.push_back(a);
    return acs.empty() ? r : r.push_residue(acs);
}

// ---------------------------------------------------------------------------
// Affine maps

SeriesPoint AffineMap::apply(const SeriesPoint& x) const { return a * x + b; }

AffineMap AffineMap::after(const AffineMap& inner) const {
    // this(inner(x)) = a*(a'x + b') + b
    return AffineMap{a * inner.a, a * inner.b + b};
}

AffineMap AffineMap::inverse() const {
    // y = a x + b  =>  x = a^-1 y - a^-1 b ; only exact when a is a monomial
    auto o = a.ord();
    if (!o) throw DomainError("AffineMap::inverse: zero coefficient");
    if (a.coeffs().size() != 1)
        throw DomainError("AffineMap::inverse: coefficient must be a single term");
    SeriesPoint ainv = SeriesPoint::t_power(-*o, Rat(1) / a.ac());
    return AffineMap{ainv, -(ainv * b)};
}

long ordjac(const AffineMap& f) {
    auto o = f.a.ord();
    if (!o) throw DomainError("ordjac: zero derivative");
    return *o;
}

ValCell cell_image(const AffineMap& f, const ValCell& cell) {
    long j = ordjac(f);
    ValCell img = cell;
    img.center = f.apply(cell.center);
    if (cell.kind == 0) return img;
    // ord(y - f(c)) = ord(a) + ord(x - c): shift the order variable
    std::string iv = cell.ivar;
    img.constraint = f_subst(cell.constraint, iv, LinFn::var(iv) - LinFn::constant(Rat(Int(j))));
    Rat aa = f.a.ac();
    if (cell.ac_pin) {
        img.ac_pin = aa * *cell.ac_pin;
    } else {
        for (auto& e : img.ac_excluded) e = aa * e;
        std::sort(img.ac_excluded.begin(), img.ac_excluded.end());
    }
    return img;
}

CVReport change_of_variable(const AffineMap& f, const std::vector<ValCell>& cells,
                            const MotFunction& phi) {
    // mu over the image of the cells
    MotFunction lhs;
    for (const auto& c : cells) {
        ValCell img = cell_image(f, c);
        if (img.kind == 1) lhs = lhs + integrate_1cell(img, phi);
    }
    // mu over the source of L^(-ordjac) * pullback
    MotFunction weighted = phi.scale(MotNum::L_power(-ordjac(f)));
    MotFunction rhs;
    for (const auto& c : cells)
        if (c.kind == 1) rhs = rhs + integrate_1cell(c, weighted);
    return CVReport{lhs, rhs, lhs.is_equal(rhs)};
}

// ---------------------------------------------------------------------------
// Measure

MotFunction measure(const std::vector<ValCell>& cells, const MotFunction& phi) {
    MotFunction acc;
    for (const auto& c : cells) {
        // points are null sets in dimension one
        if (c.kind == 1) acc = acc + integrate_1cell(c, phi);
    }
    return acc.compact();
}

MotFunction measure(const ValDesc& desc, const MotFunction& phi) {
    return measure(annulus_decompose(desc), phi);
}

}  // namespace motint
