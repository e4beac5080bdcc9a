#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "motint/motfn.hpp"

using namespace motint;

static LinFn V(const std::string& v) { return LinFn::var(v); }
static LinFn K(long c) { return LinFn::constant(c); }
static MotNum MI(long n) { return MotNum::from_int(Int(n)); }
static MotNum Lp(long k) { return MotNum::L_power(k); }

TEST_CASE("pullback substitutes and composes") {
    clear_rules();
    // phi = L^(-i) on i >= 1
    MotFunction phi =
        MotFunction::from_cpf(CPFunction::term(MI(1), {}, -V("i"), f_ge(V("i") - K(1))));
    // f: j -> j + 1
    MotFunction pulled = phi.pullback({{"i", V("j") + K(1)}});
    CHECK(pulled.is_equal(MotFunction::from_cpf(
              CPFunction::term(MI(1), {}, -V("j") - K(1), f_ge(V("j"))))) == 1);
    // identity pullback
    CHECK(phi.pullback({{"i", V("i")}}).is_equal(phi) == 1);
    // functoriality: pull g then f equals pull (g after f)
    std::map<std::string, LinFn> f{{"i", V("j") + K(2)}}, g{{"j", V("k") * Rat(2)}};
    MotFunction lhs = phi.pullback(f).pullback(g);
    MotFunction rhs = phi.pullback({{"i", V("k") * Rat(2) + K(2)}});
    CHECK(lhs.is_equal(rhs) == 1);
    // swap of two coordinates is simultaneous
    CPFunction two = CPFunction::term(MI(1), {}, V("a") - V("b") * Rat(2),
                                      f_and({f_ge(V("a")), f_ge(V("b"))}));
    MotFunction sw = MotFunction::from_cpf(two).pullback({{"a", V("b")}, {"b", V("a")}});
    CHECK(sw.is_equal(MotFunction::from_cpf(CPFunction::term(
              MI(1), {}, V("b") - V("a") * Rat(2), f_and({f_ge(V("b")), f_ge(V("a"))})))) == 1);
}

TEST_CASE("push_residue binds class parameters") {
    clear_rules();
    // [base x A^1]: one free residue parameter, unconstrained
    GrothClass cyl = GrothClass::from_system({}, {}, {}, {{"u", "eta"}});
    MotFunction phi = MotFunction::from_class(cyl);
    MotFunction pushed = phi.push_residue({"eta"});
    CHECK(pushed.is_equal(MotFunction::constant(Lp(1))) == 1);
    // [xi^2 = eta over eta in G_m] pushed along eta -> L - 1
    GrothClass c = GrothClass::from_system({"xi"}, {MPoly::parse("xi^2 - 2*eta")}, {},
                                           {{"eta", "eta"}});
    GrothClass gm = GrothClass::from_system({}, {}, {MPoly::var("etabar")},
                                            {{"etabar", "eta"}});
    MotFunction f = MotFunction::from_class(c * gm).push_residue({"eta"});
    CHECK(f.is_equal(MotFunction::constant(Lp(1) - MI(1))) == 1);
    // leak detection
    MotFunction bad = MotFunction::term(cyl, CPFunction::term(MI(1), {}, V("eta"), f_true()));
    CHECK_THROWS_AS(bad.push_residue({"eta"}), DomainError);
}

TEST_CASE("push_z sums the Presburger parts") {
    clear_rules();
    // (L-1) (x) L^(-i-1) on i >= 1 -> L^(-1)
    MotFunction b = MotFunction::from_cpf(
        CPFunction::term(Lp(0) * (Lp(1) - MI(1)), {}, -V("i") - K(1), f_ge(V("i") - K(1))));
    CHECK(b.push_z({"i"}).is_equal(MotFunction::constant(Lp(-1))) == 1);
    // [G_m] (x) L^(-m-1), m >= 1 -> L^(-1)
    GrothClass gm = GrothClass::from_system({"v"}, {}, {MPoly::var("v")});
    MotFunction g = MotFunction::term(gm, CPFunction::term(MI(1), {}, -V("m") - K(1),
                                                           f_ge(V("m") - K(1))));
    CHECK(g.push_z({"m"}).is_equal(MotFunction::constant(Lp(-1))) == 1);
    // 1 on 1 <= i <= 3 -> 3
    MotFunction c = MotFunction::from_cpf(CPFunction::term(
        MI(1), {}, LinFn(), f_and({f_ge(V("i") - K(1)), f_le(V("i") - K(3))})));
    CHECK(c.push_z({"i"}).is_equal(MotFunction::constant(MI(3))) == 1);
    // diagnosis names the term
    MotFunction badf = MotFunction::from_cpf(CPFunction::term(MI(1), {}, V("i"), f_ge(V("i"))));
    CHECK_THROWS_AS(badf.push_z({"i"}), NotIntegrable);
}

TEST_CASE("push_inclusion extends by zero") {
    clear_rules();
    MotFunction phi = MotFunction::constant(MI(5));
    MotFunction emb = phi.push_inclusion(f_eq(V("i") - K(2)));
    CHECK(emb.push_z({"i"}).is_equal(phi) == 1);
    CHECK(phi.push_inclusion(f_false()).is_equal(MotFunction::zero()) == 1);
    CHECK(phi.push_inclusion(f_true()).is_equal(phi) == 1);
}

TEST_CASE("ring version and three-valued equality") {
    clear_rules();
    MotFunction e = MotFunction::from_class(GrothClass::symbol("E"));
    MotFunction three = MotFunction::constant(MI(3));
    MotFunction d = MotFunction::ring_version(e, three);
    CHECK(d.is_equal(e - three) == 1);
    CHECK(MotFunction::ring_version(e, e).is_equal(MotFunction::zero()) == 1);
    CHECK(MotFunction::ring_version(MotFunction::constant(Lp(1)),
                                    MotFunction::constant(Lp(1) - MI(1)))
              .is_equal(MotFunction::constant(MI(1))) == 1);
    // definite inequality for pure numbers
    CHECK(MotFunction::constant(MI(1)).is_equal(MotFunction::constant(MI(2))) == 0);
    // unknown for incomparable symbols
    CHECK(e.is_equal(MotFunction::from_class(GrothClass::symbol("F"))) == -1);
}

TEST_CASE("elliptic decomposition pieces") {
    clear_rules();
    GrothGen pat;
    pat.vars = {"x", "y"};
    pat.eqs = {MPoly::parse("x^2 - y*(y-1)*(y-2)")};
    declare_class_eq(pat, GrothClass::symbol("E"));
    // piece A: ord y = 0, ac y = eta not in {0,1,2}, fiber class
    // {xi^2 = eta(eta-1)(eta-2)}; weight L^(-1) after the unit-ball volume
    GrothClass cA = GrothClass::from_system({"xi"}, {MPoly::parse("xi^2 - e*(e-1)*(e-2)")},
                                            {MPoly::parse("e"), MPoly::parse("e-1"),
                                             MPoly::parse("e-2")},
                                            {{"e", "eta"}});
    MotFunction A = MotFunction::term(cA, CPFunction::constant(Lp(-1)));
    MotFunction piA = A.push_residue({"eta"});
    MotFunction want =
        (MotFunction::from_class(GrothClass::symbol("E")) - MotFunction::constant(MI(3)))
            .scale(Lp(-1));
    CHECK(piA.is_equal(want) == 1);
    // piece B0: ord(y) = 2m, m >= 1, ac = eta in G_m, weight (L-1)-free form:
    // sum over m of L^(-2m) * L^(... ) handled at the cell level elsewhere;
    // here: [eta != 0] (x) L^(-m-1) over m >= 1
    GrothClass cB = GrothClass::from_system({}, {}, {MPoly::var("e")}, {{"e", "eta"}});
    MotFunction B = MotFunction::term(cB, CPFunction::term(MI(1), {}, -V("m") - K(1),
                                                           f_ge(V("m") - K(1))));
    MotFunction piB = B.push_residue({"eta"}).push_z({"m"});
    CHECK(piB.is_equal(MotFunction::constant(Lp(-1))) == 1);
    // total: A + 3 ball pieces = [E] L^(-1)
    MotFunction total = piA + piB + piB + piB;
    CHECK(total.is_equal(MotFunction::from_class(GrothClass::symbol("E")).scale(Lp(-1))) == 1);
    // specialization oracle at p = 5 and 7
    for (long p : {5, 7}) {
        GrothGen raw = pat;
        Rat cnt(count_points(raw, p));
        CHECK(total.theta_count(p, {}) == cnt / p);
    }
}

TEST_CASE("projection formula") {
    clear_rules();
    std::mt19937 rng(4321);
    for (int it = 0; it < 15; it++) {
        // alpha over base var s; beta integrable over i
        CPFunction alpha = CPFunction::term(MI(1 + (long)(rng() % 4)),
                                            {V("s") + K((long)(rng() % 3))}, -V("s"),
                                            f_ge(V("s")));
        CPFunction beta = CPFunction::term(MI(1), {}, -V("i") * Rat(1 + (long)(rng() % 2)),
                                           f_ge(V("i") - V("s")));
        MotFunction am = MotFunction::from_cpf(alpha);
        MotFunction bm = MotFunction::from_cpf(beta);
        MotFunction lhs = (am * bm).push_z({"i"});
        MotFunction rhs = am * bm.push_z({"i"});
        CAPTURE(it);
        REQUIRE(lhs.is_equal(rhs) == 1);
    }
}

TEST_CASE("order exchange of residue and Z projections") {
    clear_rules();
    std::mt19937 rng(9876);
    for (int it = 0; it < 30; it++) {
        GrothClass c = GrothClass::from_system(
            {"w"}, {}, {MPoly::var("w") - MPoly::constant(Rat((long)(rng() % 3)))},
            {{"u", "eta"}});
        if (rng() % 2) c = c * GrothClass::from_system({}, {}, {MPoly::var("z")}, {{"z", "eta"}});
        CPFunction f = CPFunction::term(MI(1), {}, -V("i") * Rat(1 + (long)(rng() % 2)) - K(1),
                                        f_ge(V("i") - K((long)(rng() % 2))));
        MotFunction phi = MotFunction::term(c, f);
        MotFunction a = phi.push_residue({"eta"}).push_z({"i"});
        MotFunction b = phi.push_z({"i"}).push_residue({"eta"});
        CAPTURE(it);
        REQUIRE(a.is_equal(b) == 1);
    }
}

TEST_CASE("fubini over split blocks") {
    clear_rules();
    std::mt19937 rng(1111);
    for (int it = 0; it < 10; it++) {
        CPFunction f = CPFunction::term(
            MI(1), {}, -V("i") - V("j") * Rat(1 + (long)(rng() % 2)),
            f_and({f_ge(V("i")), f_ge(V("j")), f_le(V("j") - V("i") - K(4))}));
        MotFunction phi = MotFunction::from_cpf(f);
        MotFunction oneshot = phi.push_z({"i", "j"});
        MotFunction blocks = phi.push_z({"j"}).push_z({"i"});
        CAPTURE(it);
        REQUIRE(oneshot.is_equal(blocks) == 1);
    }
}

TEST_CASE("monotone integrability witness") {
    clear_rules();
    // phi = psi + chi integrable => the named part psi passes the checker
    CPFunction psi = CPFunction::term(MI(2), {}, -V("i"), f_ge(V("i")));
    CPFunction chi = CPFunction::term(MI(1), {}, -V("i") * Rat(2), f_ge(V("i")));
    CPFunction phi = psi + chi;
    CHECK(is_integrable(phi, {"i"}));
    CHECK(is_integrable(psi, {"i"}));
}

TEST_CASE("poincare series") {
    clear_rules();
    // family: slices (1 - L^-1) L^(-n/2) at even n ("orders of squares")
    MotNum c = MI(1) - Lp(-1);
    MotFunction fam = MotFunction::from_cpf(CPFunction::term(
        c, {}, LinFn::var("n", Rat(-1, 2)),
        f_and({f_ge(V("n")), f_mod(V("n"), Int(0), Int(2))})));
    RationalSeries s = poincare_series(fam, "n");
    CHECK(in_sigma(s));
    REQUIRE(s.terms.size() == 1);
    const RSTerm& t = s.terms[0];
    CHECK(t.c == c);
    CHECK(t.lexp == LinFn());
    REQUIRE(t.denom.size() == 1);
    CHECK(std::get<0>(t.denom.begin()->first) == -1);
    CHECK(std::get<1>(t.denom.begin()->first) == std::vector<long>{2});
    CHECK(t.denom.begin()->second == 1);
    // slices L^(-n): one simple denominator (1 - L^-1 T)
    MotFunction fam2 =
        MotFunction::from_cpf(CPFunction::term(MI(1), {}, -V("n"), f_ge(V("n"))));
    RationalSeries s2 = poincare_series(fam2, "n");
    REQUIRE(s2.terms.size() == 1);
    CHECK(std::get<0>(s2.terms[0].denom.begin()->first) == -1);
    CHECK(std::get<1>(s2.terms[0].denom.begin()->first) == std::vector<long>{1});
    // all-zero family
    CHECK(poincare_series(MotFunction::zero(), "n").terms.empty());
}

TEST_CASE("specialization is a homomorphism across operations") {
    clear_rules();
    GrothClass gm = GrothClass::from_system({"v"}, {}, {MPoly::var("v")});
    MotFunction a = MotFunction::term(gm, CPFunction::term(MI(1), {}, -V("i"), f_ge(V("i"))));
    MotFunction b = MotFunction::constant(Lp(1) - MI(2));
    for (long p : {3, 5}) {
        Env env{{"i", Int(2)}};
        CHECK((a + b).theta_count(p, env) == a.theta_count(p, env) + b.theta_count(p, env));
        CHECK((a * b).theta_count(p, env) == a.theta_count(p, env) * b.theta_count(p, env));
        // push_z then evaluate = sum over i of evaluations
        MotFunction s = a.push_z({"i"});
        Rat direct(0);
        Rat pr(p);
        Rat cnt = gm.count_eval(p);
        Rat powinv = Rat(1);
        for (long i = 0; i <= 200; i++) {
            direct += cnt * powinv;
            powinv /= pr;
        }
        // geometric tail beyond 200 is below any fixed tolerance; compare
        // against the closed form within 1e-12
        double diff = std::abs(s.theta_count(p, {}).get_d() - direct.get_d());
        CHECK(diff < 1e-12);
    }
}
