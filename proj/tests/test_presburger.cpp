#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "motint/presburger.hpp"

using namespace motint;

static LinFn V(const std::string& v) { return LinFn::var(v); }
static LinFn K(long c) { return LinFn::constant(c); }

TEST_CASE("formula evaluation") {
    // x >= 0 and x <= 10
    FPtr f = f_and({f_ge(V("x")), f_le(V("x") - K(10))});
    CHECK(f_eval(f, {{"x", Int(0)}}));
    CHECK(f_eval(f, {{"x", Int(10)}}));
    CHECK_FALSE(f_eval(f, {{"x", Int(11)}}));
    CHECK_FALSE(f_eval(f, {{"x", Int(-1)}}));
    FPtr g = f_mod(V("x"), Int(2), Int(3));
    CHECK(f_eval(g, {{"x", Int(5)}}));
    CHECK_FALSE(f_eval(g, {{"x", Int(6)}}));
    CHECK(f_eval(f_not(g), {{"x", Int(6)}}));
}

TEST_CASE("members enumeration") {
    FPtr f = f_mod(V("x"), Int(0), Int(3));
    auto m = members(f, {"x"}, Int(0), Int(9));
    REQUIRE(m.size() == 4);
    CHECK(m[0][0] == 0);
    CHECK(m[3][0] == 9);
    CHECK(members(f_false(), {"x"}, Int(-5), Int(5)).empty());
    auto r = members(f_and({f_ge(V("x") - K(2)), f_le(V("x") - K(4))}), {"x"}, Int(-10), Int(10));
    REQUIRE(r.size() == 3);
    CHECK(r[0][0] == 2);
    CHECK(r[2][0] == 4);
}

static void check_qe_equiv(const FPtr& quantified, const FPtr& eliminated,
                           const std::vector<std::string>& vars, long B) {
    std::function<bool(const FPtr&, Env&)> sat_direct = [&](const FPtr& f, Env& env) -> bool {
        // brute-force semantics including exists over [-3B, 3B]
        switch (f->kind) {
            case Formula::EXISTS: {
                for (Int w(-3 * B); w <= 3 * B; w++) {
                    env[f->var] = w;
                    bool ok = sat_direct(f->kids[0], env);
                    env.erase(f->var);
                    if (ok) return true;
                }
                return false;
            }
            case Formula::AND:
                for (const auto& k : f->kids)
                    if (!sat_direct(k, env)) return false;
                return true;
            case Formula::OR:
                for (const auto& k : f->kids)
                    if (sat_direct(k, env)) return true;
                return false;
            case Formula::NOT:
                return !sat_direct(f->kids[0], env);
            default:
                return f_eval(f, env);
        }
    };
    Env env;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == vars.size()) {
            CAPTURE(eliminated->str());
            bool want = sat_direct(quantified, env);
            bool got = f_eval(eliminated, env);
            REQUIRE(want == got);
            return;
        }
        for (Int v(-B); v <= B; v++) {
            env[vars[i]] = v;
            rec(i + 1);
        }
        env.erase(vars[i]);
    };
    rec(0);
}

TEST_CASE("qe parity example") {
    FPtr f = f_exists("y", f_eq(V("x") - V("y") * Rat(2)));
    FPtr g = qe(f);
    CHECK(f_free_vars(g) == std::vector<std::string>{"x"});
    for (Int x(-20); x <= 20; x++)
        CHECK(f_eval(g, {{"x", x}}) == (mod_pos(x, Int(2)) == 0));
}

TEST_CASE("qe sandwich examples") {
    // exists y. x <= y and y <= x  -> true
    FPtr f = f_exists("y", f_and({f_le(V("x") - V("y")), f_le(V("y") - V("x"))}));
    FPtr g = qe(f);
    for (Int x(-10); x <= 10; x++) CHECK(f_eval(g, {{"x", x}}));
    // exists y. 2y <= x <= 2y+1  -> true for all x
    FPtr h = qe(f_exists("y", f_and({f_le(V("y") * Rat(2) - V("x")),
                                     f_le(V("x") - V("y") * Rat(2) - K(1))})));
    for (Int x(-50); x <= 50; x++) CHECK(f_eval(h, {{"x", x}}));
}

TEST_CASE("qe random formulas against brute force") {
    std::mt19937 rng(4242);
    auto rnd_lin = [&](const std::vector<std::string>& vs) {
        LinFn t = K((long)(rng() % 11) - 5);
        for (const auto& v : vs)
            if (rng() % 2) t = t + LinFn::var(v, Rat((long)(rng() % 7) - 3));
        return t;
    };
    for (int it = 0; it < 40; it++) {
        std::vector<std::string> vs = {"x", "y"};
        std::vector<FPtr> atoms;
        int n = 2 + rng() % 3;
        for (int i = 0; i < n; i++) {
            int k = rng() % 3;
            LinFn t = rnd_lin(vs);
            if (k == 0)
                atoms.push_back(f_le(t));
            else if (k == 1)
                atoms.push_back(f_eq(t));
            else
                atoms.push_back(f_mod(t, Int((long)(rng() % 3)), Int(2 + (long)(rng() % 3))));
        }
        FPtr body = rng() % 2 ? f_and(atoms) : f_or({f_and({atoms[0], atoms[1]}), atoms.back()});
        FPtr q = f_exists("y", body);
        FPtr g = qe(q);
        for (const auto& v : f_free_vars(g)) CHECK(v != "y");
        check_qe_equiv(q, g, {"x"}, 12);
    }
}

static void check_partition(const FPtr& X, const std::vector<PresCell>& cells,
                            const std::vector<std::string>& vars, long B) {
    Env env;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == vars.size()) {
            int hits = 0;
            for (const auto& c : cells) hits += c.contains(env) ? 1 : 0;
            bool in = f_eval(X, env);
            CAPTURE(env.begin()->second.get_str());
            REQUIRE(hits == (in ? 1 : 0));
            return;
        }
        for (Int v(-B); v <= B; v++) {
            env[vars[i]] = v;
            rec(i + 1);
        }
        env.erase(vars[i]);
    };
    rec(0);
}

TEST_CASE("cell decomposition basics") {
    // X = {x >= 0}: one (1)-cell with lower bound 0
    FPtr X = f_ge(V("x"));
    auto cells = cell_decompose(X, {"x"}, {{{f_true(), V("x")}}});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].coords[0].type == 1);
    REQUIRE(cells[0].coords[0].lower.has_value());
    CHECK(*cells[0].coords[0].lower == K(0));
    CHECK_FALSE(cells[0].coords[0].upper.has_value());
    CHECK(cells[0].restrictions.size() == 1);
    CHECK(cells[0].restrictions[0] == V("x"));
    check_partition(X, cells, {"x"}, 60);
}

TEST_CASE("cell decomposition over a base") {
    // X = {(s,x): 0 <= x <= s} over S = {s >= 0}
    FPtr X = f_and({f_ge(V("s")), f_ge(V("x")), f_le(V("x") - V("s"))});
    auto cells = cell_decompose(X, {"x"});
    REQUIRE(cells.size() == 1);
    CHECK(*cells[0].coords[0].lower == K(0));
    CHECK(*cells[0].coords[0].upper == V("s"));
    check_partition(X, cells, {"s", "x"}, 25);
}

TEST_CASE("cell decomposition mixed congruence and point") {
    FPtr X = f_or({f_mod(V("x"), Int(1), Int(2)), f_eq(V("x") - K(4))});
    auto cells = cell_decompose(X, {"x"});
    bool has0 = false, has1 = false;
    for (const auto& c : cells) {
        if (c.coords[0].type == 0) has0 = true;
        if (c.coords[0].type == 1) has1 = true;
    }
    CHECK(has0);
    CHECK(has1);
    check_partition(X, cells, {"x"}, 100);
}

TEST_CASE("cell decomposition with scaled bounds and congruences") {
    std::mt19937 rng(99);
    for (int it = 0; it < 25; it++) {
        // random conjunction/disjunction in (s, x) with coefficients up to 3
        auto lin = [&]() {
            return LinFn::var("x", Rat(1 + (long)(rng() % 3))) +
                   LinFn::var("s", Rat((long)(rng() % 5) - 2)) + K((long)(rng() % 9) - 4);
        };
        FPtr a = f_le(lin());
        FPtr b = f_ge(lin());
        FPtr c = f_mod(V("x") + V("s"), Int((long)(rng() % 2)), Int(2 + (long)(rng() % 2)));
        FPtr X = rng() % 2 ? f_and({a, b, c}) : f_or({f_and({a, c}), f_and({b, c})});
        auto cells = cell_decompose(X, {"x"});
        check_partition(X, cells, {"s", "x"}, 18);
    }
}

TEST_CASE("two-variable decomposition partitions") {
    FPtr X = f_and({f_ge(V("x")), f_ge(V("y") - V("x")), f_le(V("y") - K(12)),
                    f_mod(V("y"), Int(1), Int(3))});
    auto cells = cell_decompose(X, {"x", "y"});
    check_partition(X, cells, {"x", "y"}, 16);
}

TEST_CASE("adaptation returns agreeing restrictions") {
    // f = |x| as a two-piece function on Z
    PiecewiseLin f = {{f_ge(V("x")), V("x")}, {f_le(V("x") + K(1)), -V("x")}};
    FPtr X = f_true();
    auto cells = cell_decompose(X, {"x"}, {f});
    check_partition(X, cells, {"x"}, 40);
    for (const auto& c : cells) {
        REQUIRE(c.restrictions.size() == 1);
        for (Int v(-30); v <= 30; v++) {
            Env env{{"x", v}};
            if (!c.contains(env)) continue;
            CHECK(c.restrictions[0].eval(env) == abs(v));
        }
    }
}

TEST_CASE("json serialization of formulas") {
    FPtr f = f_and({f_ge(V("x")), f_mod(V("x"), Int(1), Int(2))});
    std::string j = f->to_json();
    CHECK(j.find("\"and\"") != std::string::npos);
    CHECK(j.find("\"mod\"") != std::string::npos);
}
