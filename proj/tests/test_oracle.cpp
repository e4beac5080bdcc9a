#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "motint/oracle.hpp"

using namespace motint;

static LinFn V(const std::string& v) { return LinFn::var(v); }
static LinFn K(long c) { return LinFn::constant(c); }
static MotNum MI(long n) { return MotNum::from_int(Int(n)); }
static MotNum Lp(long k) { return MotNum::L_power(k); }
static SeriesPoint SP(const std::string& s) { return SeriesPoint::parse(s); }

TEST_CASE("pointwise theta evaluation") {
    CPFunction phi = CPFunction::term(Lp(1) - MI(1), {V("i")}, -V("i"), f_ge(V("i")));
    CHECK(theta_at(phi, {{"i", Int(2)}}, Rat(2)) == Rat(1) * 2 * Rat(1, 4));
    CHECK(theta_at(phi, {{"i", Int(-1)}}, Rat(2)) == 0);  // off support
    CHECK(theta_at(phi, {{"i", Int(0)}}, Rat(3)) == 0);   // zero factor
}

TEST_CASE("numeric summation with tail bounds") {
    // geometric: sum L^-i over i >= 1 at q = 2 is 1
    CPFunction geo = CPFunction::term(MI(1), {}, -V("i"), f_ge(V("i") - K(1)));
    NumericSum s = numeric_sum(geo, {"i"}, Rat(2));
    CHECK(s.converged);
    CHECK(s.tail_bound > 0);
    CHECK(s.tail_bound < Rat(1, 1000000));
    Rat gap = Rat(1) - s.value;
    CHECK(gap >= 0);
    CHECK(gap <= s.tail_bound + Rat(1, 1000000000));
    // finite support: 1 on [0,3] sums to 4 with zero tail
    CPFunction box = CPFunction::term(MI(1), {}, LinFn(),
                                      f_and({f_ge(V("i")), f_le(V("i") - K(3))}));
    NumericSum b = numeric_sum(box, {"i"}, Rat(2));
    CHECK(b.converged);
    CHECK(b.value == 4);
    CHECK(b.tail_bound == 0);
    // two variables
    CPFunction two = CPFunction::term(MI(1), {}, -V("i") - V("j"),
                                      f_and({f_ge(V("i") - K(1)), f_ge(V("j") - K(1))}));
    NumericSum t = numeric_sum(two, {"i", "j"}, Rat(2));
    CHECK(t.converged);
    CHECK(Rat(1) - t.value >= 0);
    CHECK(Rat(1) - t.value <= t.tail_bound + Rat(1, 1000000000));
}

TEST_CASE("divergent sums produce growth evidence instead of a bound") {
    CPFunction bad = CPFunction::term(MI(1), {}, V("i"), f_ge(V("i")));
    NumericSum s = numeric_sum(bad, {"i"}, Rat(2));
    CHECK(!s.converged);
    REQUIRE(s.partials.size() == 4);
    CHECK(s.partials[0] < s.partials[1]);
    CHECK(s.partials[1] < s.partials[2]);
    CHECK(s.partials[2] < s.partials[3]);
}

TEST_CASE("symbolic summation agrees with the numeric oracle") {
    clear_rules();
    // i * L^-i over i >= 1
    CPFunction phi = CPFunction::term(MI(1), {V("i")}, -V("i"), f_ge(V("i") - K(1)));
    CPFunction mu = mu_sum(phi, {"i"});
    CheckReport rep = check_sum("weighted geometric sum", mu, phi, {"i"});
    CHECK(rep.all_pass());
    CHECK(rep.items.size() == 2);
    // negative control: a wrong symbolic value is flagged
    CheckReport bad = check_sum("deliberately wrong", CPFunction::constant(Lp(2)), phi, {"i"});
    CHECK(!bad.all_pass());
    CHECK(bad.items[0].verdict == "mismatch");
}

TEST_CASE("residue-ring measures of named sets") {
    SeriesPoint z = SP("0");
    CHECK(padic_measure(vd_ord_ge(z, K(1)), 5, 4) == Rat(1, 5));
    CHECK(padic_measure(vd_ord_eq(z, K(0)), 3, 3) == Rat(2, 3));
    CHECK(padic_measure(vd_ord_ge(z, K(0)), 7, 3) == 1);
    CHECK(padic_measure(vd_ord_ge(z, K(-2)), 3, 6, -2) == 9);
    // depth stability
    ValDesc ann = vd_and({vd_ord_ge(z, K(1)), vd_ord_le(z, K(3))});
    CHECK(padic_measure(ann, 3, 6) == padic_measure(ann, 3, 8));
    // a point is one coset deep in the truncation
    CHECK(padic_measure(vd_point(SP("1 + t")), 5, 4) == Rat(1, 625));
    CHECK_THROWS_AS(padic_measure(vd_ac_eq(z, Rat(1, 3)), 3, 4), DomainError);
}

TEST_CASE("measure pipeline matches residue counts") {
    clear_rules();
    MotFunction one = MotFunction::constant(MI(1));
    ValDesc ball = vd_ord_ge(SP("0"), K(1));
    CheckReport rep = check_measure("unit ball", measure(ball, one), ball);
    CHECK(rep.all_pass());
    CHECK(rep.items.size() == 2);
    // negative control
    CheckReport bad = check_measure("wrong value", MotFunction::constant(Lp(-2)), ball);
    CHECK(!bad.all_pass());
    // report serialization carries the schema and the row fields
    std::string j = rep.to_json();
    CHECK(j.find("\"schema\"") != std::string::npos);
    CHECK(j.find("\"target\"") != std::string::npos);
    CHECK(j.find("\"method\"") != std::string::npos);
    CHECK(j.find("\"expected\"") != std::string::npos);
    CHECK(j.find("\"observed\"") != std::string::npos);
    CHECK(j.find("\"verdict\"") != std::string::npos);
    CHECK(rep.str().find("match") != std::string::npos);
}

TEST_CASE("random safe descriptions: symbolic measure equals residue count") {
    clear_rules();
    std::mt19937 rng(424242);
    std::uniform_int_distribution<long> pickc(0, 4), lev(0, 3), cap(0, 5), mod(2, 3),
        acv(1, 2), nconj(1, 3);
    std::vector<SeriesPoint> centers = {SP("0"), SP("1"), SP("2"), SP("t"), SP("1 + t")};
    MotFunction one = MotFunction::constant(MI(1));
    OracleConfig cfg;
    for (int trial = 0; trial < 8; trial++) {
        std::vector<ValDesc> disjuncts;
        long nd = nconj(rng);
        for (long di = 0; di < nd; di++) {
            SeriesPoint c = centers[(size_t)pickc(rng)];
            long a = lev(rng);
            std::vector<ValDesc> conj = {vd_ord_ge(c, K(a))};
            long style = pickc(rng);
            if (style == 1) conj.push_back(vd_ord_le(c, K(a + cap(rng))));
            if (style == 2) {
                conj.push_back(vd_ord_le(c, K(a + cap(rng))));
                conj.push_back(vd_ord_mod(c, Int(0), Int(mod(rng))));
            }
            if (style == 3) conj.push_back(vd_not(vd_ord_ge(c, K(a + 1 + cap(rng)))));
            if (style == 4) {
                conj.push_back(vd_ord_le(c, K(a + cap(rng))));
                conj.push_back(vd_ac_eq(c, Rat(acv(rng))));
            }
            disjuncts.push_back(vd_and(std::move(conj)));
        }
        ValDesc d = vd_or(std::move(disjuncts));
        MotFunction m = measure(d, one);
        CheckReport rep = check_measure("random description " + std::to_string(trial), m, d, cfg);
        CAPTURE(d.str());
        CHECK(rep.all_pass());
    }
}
