#include "motint/dsl.hpp"

#include <json.hpp>
#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace motint {

// ---------------------------------------------------------------------------
// Expression AST

struct ExprNode {
    enum T {
        NUM,       // integer literal
        LSYM,      // the class of the affine line
        CLASS_SYM, // [Name]
        NAME,      // reference to a prior value
        ADD,
        SUB,
        MUL,
        NEG,
        POW,       // kids[0] ^ ipow
        INV1ML,    // 1 / (1 - L^ipow)
        TERM_LIT,  // term(coeff; [factors]; exp; support)
        CLASS_LIT, // class(vars ...; eqs ...; neqs ...; params ...)
        PUSH_RES,  // push_res(e; ac names)
        PUSH_Z     // push_z(e; z vars)
    } t;
    Int num;
    long ipow = 0;
    std::string name;
    std::vector<EPtr> kids;
    // TERM_LIT payload
    std::vector<LinFn> factors;
    LinFn exp;
    FPtr support = f_true();
    // CLASS_LIT payload
    GrothGen gen;
    std::map<std::string, std::string> params;
    // PUSH_* payload
    std::vector<std::string> vars;
};

namespace {

EPtr mk(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

// ---------------------------------------------------------------------------
// Lexer

struct Token {
    enum T { IDENT, INT, SYM, END } t = END;
    std::string text;
    Int value;
    int line = 1, col = 1;
    size_t pos = 0;
};

struct Lexer {
    const std::string& src;
    size_t i = 0;
    int line = 1, col = 1;
    std::vector<Token> toks;

    explicit Lexer(const std::string& s) : src(s) { run(); }

    [[noreturn]] void fail(const std::string& m) const { throw ParseError(line, col, m); }

    void advance(size_t n) {
        for (size_t k = 0; k < n; k++) {
            if (src[i] == '\n') {
                line++;
                col = 1;
            } else {
                col++;
            }
            i++;
        }
    }

    void run() {
        static const std::vector<std::string> multi = {"->", ">=", "<=", "==", "!="};
        while (i < src.size()) {
            char c = src[i];
            if (c == '#') {  // comment to end of line
                while (i < src.size() && src[i] != '\n') advance(1);
                continue;
            }
            if (isspace((unsigned char)c)) {
                advance(1);
                continue;
            }
            Token tk;
            tk.line = line;
            tk.col = col;
            tk.pos = i;
            if (isalpha((unsigned char)c) || c == '_') {
                size_t j = i;
                while (j < src.size() && (isalnum((unsigned char)src[j]) || src[j] == '_')) j++;
                tk.t = Token::IDENT;
                tk.text = src.substr(i, j - i);
                advance(j - i);
            } else if (isdigit((unsigned char)c)) {
                size_t j = i;
                while (j < src.size() && isdigit((unsigned char)src[j])) j++;
                tk.t = Token::INT;
                tk.text = src.substr(i, j - i);
                tk.value = Int(tk.text);
                advance(j - i);
            } else {
                tk.t = Token::SYM;
                bool matched = false;
                for (const auto& m : multi) {
                    if (src.compare(i, m.size(), m) == 0) {
                        tk.text = m;
                        advance(m.size());
                        matched = true;
                        break;
                    }
                }
                if (!matched) {
                    static const std::string singles = "()[]{};,=+-*^/<>!";
                    if (singles.find(c) == std::string::npos)
                        fail(std::string("unexpected character '") + c + "'");
                    tk.text = std::string(1, c);
                    advance(1);
                }
            }
            toks.push_back(std::move(tk));
        }
        Token end;
        end.t = Token::END;
        end.line = line;
        end.col = col;
        end.pos = src.size();
        toks.push_back(std::move(end));
    }
};

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    const std::string& src;
    std::vector<Token> toks;
    size_t p = 0;
    // statically known names: kind of each defined name
    std::map<std::string, int>& kinds;       // Stmt::Kind values
    std::map<std::string, FPtr>& formulas;   // named presburger formulas

    Parser(const std::string& text, std::map<std::string, int>& k, std::map<std::string, FPtr>& f)
        : src(text), toks(Lexer(text).toks), kinds(k), formulas(f) {}

    const Token& cur() const { return toks[p]; }
    const Token& peek(size_t n = 1) const { return toks[std::min(p + n, toks.size() - 1)]; }

    [[noreturn]] void fail(const std::string& m) const {
        throw ParseError(cur().line, cur().col, m);
    }

    bool at_sym(const std::string& s) const { return cur().t == Token::SYM && cur().text == s; }
    bool at_kw(const std::string& s) const { return cur().t == Token::IDENT && cur().text == s; }

    bool eat_sym(const std::string& s) {
        if (!at_sym(s)) return false;
        p++;
        return true;
    }
    bool eat_kw(const std::string& s) {
        if (!at_kw(s)) return false;
        p++;
        return true;
    }
    void expect_sym(const std::string& s) {
        if (!eat_sym(s)) fail("expected '" + s + "'");
    }
    void expect_kw(const std::string& s) {
        if (!eat_kw(s)) fail("expected '" + s + "'");
    }
    std::string expect_ident(const std::string& what) {
        if (cur().t != Token::IDENT) fail("expected " + what);
        std::string s = cur().text;
        p++;
        return s;
    }
    long expect_int(const std::string& what) {
        bool neg = eat_sym("-");
        if (cur().t != Token::INT) fail("expected " + what);
        long v = to_long(cur().value);
        p++;
        return neg ? -v : v;
    }

    void declare(const std::string& name, int kind) {
        if (kinds.count(name)) fail("name '" + name + "' is already defined");
        kinds[name] = kind;
    }

    // ---- rationals and linear forms -------------------------------------

    Rat parse_rat() {
        bool neg = eat_sym("-");
        if (cur().t != Token::INT) fail("expected a rational number");
        Int num = cur().value;
        p++;
        Int den(1);
        if (eat_sym("/")) {
            if (cur().t != Token::INT) fail("expected a denominator");
            den = cur().value;
            p++;
        }
        Rat r(num, den);
        r.canonicalize();
        return neg ? Rat(-r) : r;
    }

    bool starts_lin_term() const {
        return cur().t == Token::INT || cur().t == Token::IDENT;
    }

    LinFn parse_lin() {
        LinFn acc;
        bool first = true;
        for (;;) {
            int sign = 1;
            if (eat_sym("-"))
                sign = -1;
            else if (eat_sym("+"))
                sign = 1;
            else if (!first)
                break;
            first = false;
            if (cur().t == Token::INT) {
                Rat c = parse_rat();
                if (eat_sym("*")) {
                    std::string v = expect_ident("a variable after '*'");
                    acc = acc + LinFn::var(v, Rat(sign) * c);
                } else {
                    acc = acc + LinFn::constant(Rat(sign) * c);
                }
            } else if (cur().t == Token::IDENT) {
                std::string v = expect_ident("a variable");
                acc = acc + LinFn::var(v, Rat(sign));
            } else {
                fail("expected a linear term");
            }
            if (!at_sym("+") && !at_sym("-")) break;
        }
        return acc;
    }

    // ---- formulas --------------------------------------------------------

    FPtr parse_formula() {
        FPtr a = parse_fconj();
        std::vector<FPtr> alts = {a};
        while (eat_kw("or")) alts.push_back(parse_fconj());
        return alts.size() == 1 ? alts[0] : f_or(std::move(alts));
    }

    FPtr parse_fconj() {
        FPtr a = parse_funit();
        std::vector<FPtr> parts = {a};
        while (eat_kw("and")) parts.push_back(parse_funit());
        return parts.size() == 1 ? parts[0] : f_and(std::move(parts));
    }

    FPtr parse_funit() {
        if (eat_kw("not")) return f_not(parse_funit());
        if (eat_sym("(")) {
            FPtr f = parse_formula();
            expect_sym(")");
            return f;
        }
        if (eat_kw("true")) return f_true();
        if (eat_kw("false")) return f_false();
        // named formula when the identifier is not part of a comparison
        if (cur().t == Token::IDENT && formulas.count(cur().text)) {
            const Token& nx = peek();
            bool cmp = nx.t == Token::SYM &&
                       (nx.text == ">=" || nx.text == "<=" || nx.text == "=" || nx.text == "==" ||
                        nx.text == "<" || nx.text == ">" || nx.text == "!=" || nx.text == "+" ||
                        nx.text == "-" || nx.text == "*");
            if (!cmp) {
                FPtr f = formulas.at(cur().text);
                p++;
                return f;
            }
        }
        return parse_atom();
    }

    FPtr parse_atom() {
        LinFn lhs = parse_lin();
        if (eat_sym(">=")) return f_ge(lhs - parse_lin());
        if (eat_sym("<=")) return f_le(lhs - parse_lin());
        if (eat_sym("<")) return f_le(lhs - parse_lin() + LinFn::constant(1));
        if (eat_sym(">")) return f_ge(lhs - parse_lin() - LinFn::constant(1));
        if (eat_sym("!=")) return f_not(f_eq(lhs - parse_lin()));
        if (eat_sym("=") || eat_sym("==")) {
            LinFn rhs = parse_lin();
            if (eat_kw("mod")) {
                long n = expect_int("a modulus");
                if (!rhs.is_constant()) fail("the residue of a congruence must be constant");
                Rat c = rhs.constant_part();
                if (c.get_den() != 1) fail("the residue of a congruence must be an integer");
                return f_mod(lhs, Int(c.get_num()), Int(n));
            }
            return f_eq(lhs - rhs);
        }
        fail("expected a comparison");
    }

    // ---- Laurent series literals ----------------------------------------

    bool starts_series_term() const {
        if (cur().t == Token::INT) return true;
        if (at_kw("t")) return true;
        if ((at_sym("+") || at_sym("-")) &&
            (peek().t == Token::INT || (peek().t == Token::IDENT && peek().text == "t")))
            return true;
        return false;
    }

    SeriesPoint parse_series() {
        SeriesPoint acc;
        bool first = true;
        for (;;) {
            int sign = 1;
            if (eat_sym("-"))
                sign = -1;
            else if (eat_sym("+"))
                sign = 1;
            else if (!first)
                break;
            first = false;
            Rat coef(1);
            bool have_num = false;
            if (cur().t == Token::INT) {
                coef = parse_rat();
                have_num = true;
                eat_sym("*");
            }
            long e = 0;
            if (eat_kw("t")) {
                e = 1;
                if (eat_sym("^")) e = expect_int("an exponent");
            } else if (!have_num) {
                fail("expected a series term");
            }
            acc = acc + SeriesPoint::t_power(e, Rat(sign) * coef);
            if (!starts_series_term() || (!at_sym("+") && !at_sym("-"))) break;
        }
        return acc;
    }

    // ---- descriptions ----------------------------------------------------

    ValDesc parse_desc() {
        ValDesc a = parse_dconj();
        std::vector<ValDesc> alts = {a};
        while (eat_kw("or")) alts.push_back(parse_dconj());
        return alts.size() == 1 ? alts[0] : vd_or(std::move(alts));
    }

    ValDesc parse_dconj() {
        ValDesc a = parse_dunit();
        std::vector<ValDesc> parts = {a};
        while (eat_kw("and")) parts.push_back(parse_dunit());
        return parts.size() == 1 ? parts[0] : vd_and(std::move(parts));
    }

    SeriesPoint parse_center_tail() {
        // after "ord(x" / "ac(x": optional "- series", then ")"
        SeriesPoint c;
        if (eat_sym("-")) {
            if (eat_sym("(")) {
                c = parse_series();
                expect_sym(")");
            } else {
                c = parse_series();
            }
        }
        expect_sym(")");
        return c;
    }

    ValDesc parse_dunit() {
        if (eat_kw("not")) return vd_not(parse_dunit());
        if (eat_sym("(")) {
            ValDesc d = parse_desc();
            expect_sym(")");
            return d;
        }
        if (eat_kw("ord")) {
            expect_sym("(");
            expect_kw("x");
            SeriesPoint c = parse_center_tail();
            if (eat_sym(">=")) return vd_ord_ge(c, parse_lin());
            if (eat_sym("<=")) return vd_ord_le(c, parse_lin());
            if (eat_sym(">")) return vd_ord_ge(c, parse_lin() + LinFn::constant(1));
            if (eat_sym("<")) return vd_ord_le(c, parse_lin() - LinFn::constant(1));
            if (eat_sym("=") || eat_sym("==")) {
                LinFn rhs = parse_lin();
                if (eat_kw("mod")) {
                    long n = expect_int("a modulus");
                    if (!rhs.is_constant() || rhs.constant_part().get_den() != 1)
                        fail("the residue of a congruence must be an integer");
                    return vd_ord_mod(c, Int(rhs.constant_part().get_num()), Int(n));
                }
                return vd_ord_eq(c, rhs);
            }
            fail("expected a comparison after ord(...)");
        }
        if (eat_kw("ac")) {
            expect_sym("(");
            expect_kw("x");
            SeriesPoint c = parse_center_tail();
            if (!eat_sym("=") && !eat_sym("==")) fail("expected '=' after ac(...)");
            return vd_ac_eq(c, parse_rat());
        }
        if (eat_kw("x")) {
            if (!eat_sym("=") && !eat_sym("==")) fail("expected '=' after x");
            return vd_point(parse_series());
        }
        fail("expected a description atom (ord, ac, x, not, or '(')");
    }

    // ---- cells -----------------------------------------------------------

    ValCell parse_cell() {
        if (eat_kw("cell0")) {
            expect_sym("(");
            ValCell c;
            c.kind = 0;
            c.center = parse_series();
            expect_sym(")");
            return c;
        }
        expect_kw("cell1");
        expect_sym("(");
        ValCell c;
        c.kind = 1;
        c.center = parse_series();
        expect_sym(";");
        c.constraint = parse_formula();
        if (eat_sym(";")) {
            expect_kw("ac");
            if (eat_sym("=") || eat_sym("==")) {
                c.ac_pin = parse_rat();
            } else {
                expect_sym("!=");
                c.ac_excluded.push_back(parse_rat());
                while (eat_sym(",")) c.ac_excluded.push_back(parse_rat());
                std::sort(c.ac_excluded.begin(), c.ac_excluded.end());
            }
        }
        expect_sym(")");
        return c;
    }

    // ---- value expressions -----------------------------------------------

    EPtr parse_expr() {
        EPtr a = parse_term();
        for (;;) {
            if (eat_sym("+")) {
                EPtr b = parse_term();
                a = mk({ExprNode::ADD, {}, 0, "", {a, b}, {}, {}, f_true(), {}, {}, {}});
            } else if (eat_sym("-")) {
                EPtr b = parse_term();
                a = mk({ExprNode::SUB, {}, 0, "", {a, b}, {}, {}, f_true(), {}, {}, {}});
            } else {
                return a;
            }
        }
    }

    EPtr parse_term() {
        EPtr a = parse_pow();
        while (eat_sym("*")) {
            EPtr b = parse_pow();
            a = mk({ExprNode::MUL, {}, 0, "", {a, b}, {}, {}, f_true(), {}, {}, {}});
        }
        return a;
    }

    EPtr parse_pow() {
        EPtr a = parse_primary();
        if (eat_sym("^")) {
            long e = expect_int("an exponent");
            a = mk({ExprNode::POW, {}, e, "", {a}, {}, {}, f_true(), {}, {}, {}});
        }
        return a;
    }

    MPoly parse_poly_until(const std::string& stops) {
        // capture the raw source slice up to the next top-level stop symbol
        size_t start = cur().pos;
        int depth = 0;
        while (cur().t != Token::END) {
            if (at_sym("(")) depth++;
            if (at_sym(")")) {
                if (depth == 0) break;
                depth--;
            }
            if (depth == 0 && cur().t == Token::SYM && cur().text.size() == 1 &&
                stops.find(cur().text[0]) != std::string::npos)
                break;
            p++;
        }
        std::string slice = src.substr(start, cur().pos - start);
        if (slice.empty()) fail("expected a polynomial");
        try {
            return MPoly::parse(slice);
        } catch (const DomainError& e) {
            fail(std::string("bad polynomial: ") + e.what());
        }
    }

    EPtr parse_class_lit() {
        // class(vars a, b; eqs p, q; neqs r; params e -> eta)
        expect_sym("(");
        ExprNode n;
        n.t = ExprNode::CLASS_LIT;
        if (eat_kw("vars")) {
            n.gen.vars.push_back(expect_ident("a variable"));
            while (eat_sym(",")) n.gen.vars.push_back(expect_ident("a variable"));
            if (!at_sym(")")) expect_sym(";");
        }
        if (eat_kw("eqs")) {
            n.gen.eqs.push_back(parse_poly_until(",;"));
            while (eat_sym(",")) n.gen.eqs.push_back(parse_poly_until(",;"));
            if (!at_sym(")")) expect_sym(";");
        }
        if (eat_kw("neqs")) {
            n.gen.neqs.push_back(parse_poly_until(",;"));
            while (eat_sym(",")) n.gen.neqs.push_back(parse_poly_until(",;"));
            if (!at_sym(")")) expect_sym(";");
        }
        if (eat_kw("params")) {
            do {
                std::string v = expect_ident("a parameter variable");
                expect_sym("->");
                std::string ac = expect_ident("a residue coordinate");
                n.params[v] = ac;
            } while (eat_sym(","));
        }
        expect_sym(")");
        return mk(std::move(n));
    }

    EPtr parse_primary() {
        if (eat_sym("(")) {
            EPtr e = parse_expr();
            expect_sym(")");
            return e;
        }
        if (eat_sym("-")) {
            EPtr e = parse_pow();
            return mk({ExprNode::NEG, {}, 0, "", {e}, {}, {}, f_true(), {}, {}, {}});
        }
        if (cur().t == Token::INT) {
            ExprNode n;
            n.t = ExprNode::NUM;
            n.num = cur().value;
            p++;
            return mk(std::move(n));
        }
        if (at_sym("[")) {
            p++;
            std::string s = expect_ident("a class symbol");
            expect_sym("]");
            ExprNode n;
            n.t = ExprNode::CLASS_SYM;
            n.name = s;
            return mk(std::move(n));
        }
        if (at_kw("L")) {
            p++;
            return mk({ExprNode::LSYM, {}, 0, "", {}, {}, {}, f_true(), {}, {}, {}});
        }
        if (eat_kw("inv1mL")) {
            expect_sym("(");
            long a = expect_int("an exponent");
            expect_sym(")");
            ExprNode n;
            n.t = ExprNode::INV1ML;
            n.ipow = a;
            return mk(std::move(n));
        }
        if (eat_kw("term")) {
            expect_sym("(");
            ExprNode n;
            n.t = ExprNode::TERM_LIT;
            n.kids.push_back(parse_expr());  // coefficient
            expect_sym(";");
            expect_sym("[");
            if (!at_sym("]")) {
                n.factors.push_back(parse_lin());
                while (eat_sym(",")) n.factors.push_back(parse_lin());
            }
            expect_sym("]");
            expect_sym(";");
            if (!at_sym(";") && !at_sym(")")) n.exp = parse_lin();
            if (eat_sym(";")) {
                if (!at_sym(")")) n.support = parse_formula();
            }
            expect_sym(")");
            return mk(std::move(n));
        }
        if (at_kw("class")) {
            p++;
            return parse_class_lit();
        }
        if (eat_kw("push_res")) {
            expect_sym("(");
            ExprNode n;
            n.t = ExprNode::PUSH_RES;
            n.kids.push_back(parse_expr());
            expect_sym(";");
            n.vars.push_back(expect_ident("a residue coordinate"));
            while (eat_sym(",")) n.vars.push_back(expect_ident("a residue coordinate"));
            expect_sym(")");
            return mk(std::move(n));
        }
        if (eat_kw("push_z")) {
            expect_sym("(");
            ExprNode n;
            n.t = ExprNode::PUSH_Z;
            n.kids.push_back(parse_expr());
            expect_sym(";");
            n.vars.push_back(expect_ident("a summation variable"));
            while (eat_sym(",")) n.vars.push_back(expect_ident("a summation variable"));
            expect_sym(")");
            return mk(std::move(n));
        }
        if (cur().t == Token::IDENT) {
            std::string s = cur().text;
            if (!kinds.count(s)) fail("unknown name '" + s + "'");
            p++;
            ExprNode n;
            n.t = ExprNode::NAME;
            n.name = s;
            return mk(std::move(n));
        }
        fail("expected an expression");
    }

    // ---- statements ------------------------------------------------------

    Stmt parse_stmt() {
        Stmt s;
        s.line = cur().line;
        s.col = cur().col;
        if (eat_kw("let")) {
            s.kind = Stmt::LET;
            s.name = expect_ident("a name");
            expect_sym("=");
            s.expr = parse_expr();
            declare(s.name, s.kind);
        } else if (eat_kw("class_rule")) {
            s.kind = Stmt::CLASS_RULE;
            expect_kw("class");
            EPtr lit = parse_class_lit();
            if (!lit->params.empty())
                fail("a class rule presentation cannot carry parameters");
            s.pattern = lit->gen;
            expect_sym("=");
            s.expr = parse_expr();
        } else if (eat_kw("presburger")) {
            s.kind = Stmt::PRESBURGER;
            s.name = expect_ident("a name");
            expect_sym("=");
            s.formula = parse_formula();
            declare(s.name, s.kind);
            formulas[s.name] = s.formula;
        } else if (eat_kw("cpf")) {
            s.kind = Stmt::CPF;
            s.name = expect_ident("a name");
            expect_sym("=");
            s.expr = parse_expr();
            declare(s.name, s.kind);
        } else if (eat_kw("cells")) {
            s.kind = Stmt::CELLS;
            s.name = expect_ident("a name");
            expect_sym("=");
            if (eat_kw("decompose")) {
                expect_sym("(");
                s.desc = std::make_shared<ValDesc>(parse_desc());
                expect_sym(")");
            } else {
                expect_sym("{");
                s.cells.push_back(parse_cell());
                while (eat_sym(",")) s.cells.push_back(parse_cell());
                expect_sym("}");
            }
            declare(s.name, s.kind);
        } else if (eat_kw("measure")) {
            s.kind = Stmt::MEASURE;
            s.name = expect_ident("a name");
            expect_sym("=");
            expect_kw("mu");
            expect_sym("(");
            if (cur().t == Token::IDENT && kinds.count(cur().text) &&
                kinds.at(cur().text) == Stmt::CELLS) {
                s.cells_ref = cur().text;
                p++;
            } else {
                s.desc = std::make_shared<ValDesc>(parse_desc());
            }
            if (eat_sym(";")) s.weight = parse_expr();
            expect_sym(")");
            declare(s.name, s.kind);
        } else if (at_kw("sum") || at_kw("mellin") || at_kw("poincare")) {
            std::string kw = cur().text;
            p++;
            s.kind = kw == "sum" ? Stmt::SUM : (kw == "mellin" ? Stmt::MELLIN : Stmt::POINCARE);
            s.name = expect_ident("a name");
            expect_sym("=");
            expect_kw(kw);
            expect_sym("(");
            s.expr = parse_expr();
            expect_sym(";");
            s.vars.push_back(expect_ident("a variable"));
            while (eat_sym(",")) s.vars.push_back(expect_ident("a variable"));
            expect_sym(")");
            if (s.kind == Stmt::POINCARE && s.vars.size() != 1)
                fail("poincare takes exactly one family variable");
            if (s.kind == Stmt::MELLIN && s.vars.size() > 2)
                fail("mellin supports at most two variables");
            declare(s.name, s.kind);
        } else if (eat_kw("check")) {
            s.kind = Stmt::CHECK;
            s.name = expect_ident("a previously defined name");
            if (!kinds.count(s.name)) fail("check references undefined name '" + s.name + "'");
            expect_sym("=");
            s.expr = parse_expr();
        } else if (eat_kw("dump")) {
            s.kind = Stmt::DUMP;
            s.name = expect_ident("a previously defined name");
            if (!kinds.count(s.name)) fail("dump references undefined name '" + s.name + "'");
        } else {
            fail("expected a statement (let, class_rule, presburger, cpf, cells, measure, "
                 "sum, mellin, poincare, check, dump)");
        }
        expect_sym(";");
        return s;
    }

    Script parse_all() {
        Script sc;
        while (cur().t != Token::END) sc.stmts.push_back(parse_stmt());
        return sc;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Interpreter

namespace {

struct Value {
    int kind = Stmt::LET;  // statement kind that produced it
    MotFunction fun;
    FPtr formula = f_true();
    std::vector<ValCell> cells;
    RationalSeries series;
    // oracle provenance
    std::shared_ptr<ValDesc> desc;
    std::shared_ptr<std::pair<CPFunction, std::vector<std::string>>> summed;
};

/// Flatten a purely numeric function (no symbolic classes) to its
/// Presburger part.
CPFunction as_cpf(const MotFunction& f) {
    CPFunction out;
    for (const auto& t : f.terms) {
        MotNum c = t.cls.as_motnum();
        CPFunction scaled = t.pres.scale(c);
        out = out + scaled;
    }
    return out.compact();
}

struct Evaluator {
    RunFlags flags;
    std::map<std::string, Value> env;
    CheckReport checks;
    bool check_failed = false;

    MotFunction eval(const EPtr& e) {
        switch (e->t) {
            case ExprNode::NUM:
                return MotFunction::constant(MotNum::from_int(e->num));
            case ExprNode::LSYM:
                return MotFunction::constant(MotNum::L_power(1));
            case ExprNode::CLASS_SYM:
                return MotFunction::from_class(GrothClass::symbol(e->name));
            case ExprNode::NAME: {
                const Value& v = env.at(e->name);
                if (v.kind == Stmt::PRESBURGER || v.kind == Stmt::CELLS ||
                    v.kind == Stmt::MELLIN || v.kind == Stmt::POINCARE)
                    throw RunError("'" + e->name + "' is not a function value");
                return v.fun;
            }
            case ExprNode::ADD:
                return eval(e->kids[0]) + eval(e->kids[1]);
            case ExprNode::SUB:
                return eval(e->kids[0]) - eval(e->kids[1]);
            case ExprNode::MUL:
                return eval(e->kids[0]) * eval(e->kids[1]);
            case ExprNode::NEG:
                return -eval(e->kids[0]);
            case ExprNode::POW: {
                if (e->kids[0]->t == ExprNode::LSYM)
                    return MotFunction::constant(MotNum::L_power(e->ipow));
                if (e->ipow < 0) throw RunError("negative powers are only defined for L");
                MotFunction base = eval(e->kids[0]);
                MotFunction acc = MotFunction::constant(MotNum::from_int(Int(1)));
                for (long k = 0; k < e->ipow; k++) acc = acc * base;
                return acc;
            }
            case ExprNode::INV1ML:
                return MotFunction::constant(MotNum::inv_one_minus_L(e->ipow));
            case ExprNode::TERM_LIT: {
                MotFunction coeff = eval(e->kids[0]);
                MotNum c = coeff.as_motnum();
                return MotFunction::from_cpf(CPFunction::term(c, e->factors, e->exp, e->support));
            }
            case ExprNode::CLASS_LIT: {
                GrothGen g = e->gen;
                return MotFunction::from_class(
                    GrothClass::from_system(g.vars, g.eqs, g.neqs, e->params));
            }
            case ExprNode::PUSH_RES:
                return eval(e->kids[0]).push_residue(e->vars);
            case ExprNode::PUSH_Z:
                return eval(e->kids[0]).push_z(e->vars);
        }
        throw RunError("unreachable expression node");
    }

    std::string fun_text(const MotFunction& f) {
        // constants print as ring elements
        try {
            return f.as_motnum().str();
        } catch (const DomainError&) {
        }
        try {
            GrothClass c = f.as_class();
            MotFunction cf = MotFunction::from_class(c);
            if (f.is_equal(cf) == 1) return c.str();
        } catch (const DomainError&) {
        }
        return f.str();
    }

    std::string exec(const Stmt& s) {
        std::ostringstream out;
        switch (s.kind) {
            case Stmt::LET:
            case Stmt::CPF: {
                Value v;
                v.kind = s.kind;
                v.fun = eval(s.expr).compact();
                if (s.kind == Stmt::CPF) as_cpf(v.fun);  // must be class-free
                out << s.name << " = " << fun_text(v.fun) << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::CLASS_RULE: {
                GrothClass value = eval(s.expr).as_class();
                int id = declare_class_eq(s.pattern, value);
                out << "class_rule #" << id << ": " << s.pattern.str() << " = " << value.str()
                    << "\n";
                break;
            }
            case Stmt::PRESBURGER: {
                Value v;
                v.kind = s.kind;
                v.formula = s.formula;
                out << s.name << " = " << s.formula->str() << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::CELLS: {
                Value v;
                v.kind = s.kind;
                v.cells = s.desc ? annulus_decompose(*s.desc) : s.cells;
                v.desc = s.desc;
                out << s.name << " = " << v.cells.size() << " cells\n";
                for (const auto& c : v.cells) out << "  " << c.str() << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::MEASURE: {
                Value v;
                v.kind = s.kind;
                MotFunction psi = s.weight
                                      ? eval(s.weight)
                                      : MotFunction::constant(MotNum::from_int(Int(1)));
                if (s.desc) {
                    v.fun = measure(*s.desc, psi);
                    v.desc = s.desc;
                } else {
                    const Value& cv = env.at(s.cells_ref);
                    v.fun = measure(cv.cells, psi);
                    v.desc = cv.desc;
                }
                out << s.name << " = " << fun_text(v.fun) << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::SUM: {
                Value v;
                v.kind = s.kind;
                MotFunction operand = eval(s.expr);
                try {
                    v.summed = std::make_shared<std::pair<CPFunction, std::vector<std::string>>>(
                        as_cpf(operand), s.vars);
                } catch (const DomainError&) {
                    // symbolic classes: no numeric provenance
                }
                v.fun = operand.push_z(s.vars);
                out << s.name << " = " << fun_text(v.fun) << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::MELLIN: {
                Value v;
                v.kind = s.kind;
                v.series = mellin(as_cpf(eval(s.expr)), s.vars);
                out << s.name << " = " << v.series.str() << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::POINCARE: {
                Value v;
                v.kind = s.kind;
                v.series = poincare_series(eval(s.expr), s.vars[0]);
                out << s.name << " = " << v.series.str() << "\n";
                env[s.name] = std::move(v);
                break;
            }
            case Stmt::CHECK: {
                const Value& v = env.at(s.name);
                if (v.kind == Stmt::PRESBURGER || v.kind == Stmt::CELLS ||
                    v.kind == Stmt::MELLIN || v.kind == Stmt::POINCARE)
                    throw RunError("check needs a function-valued name");
                MotFunction want = eval(s.expr);
                int eq = v.fun.is_equal(want);
                CheckItem item;
                item.target = s.name;
                item.method = "symbolic identity";
                item.parameters = "-";
                item.expected = fun_text(want);
                item.observed = fun_text(v.fun);
                item.pass = eq == 1;
                item.verdict = eq == 1 ? "match" : (eq == 0 ? "mismatch" : "unknown");
                checks.items.push_back(item);
                if (eq != 1) check_failed = true;
                out << "check " << s.name << ": " << (eq == 1 ? "pass" : "FAIL") << "\n";
                if (flags.oracle) {
                    CheckReport extra;
                    if (v.desc) {
                        extra = check_measure(s.name, v.fun, *v.desc, flags.cfg);
                    } else if (v.summed) {
                        try {
                            extra = check_sum(s.name, as_cpf(v.fun), v.summed->first,
                                              v.summed->second, {}, flags.cfg);
                        } catch (const DomainError&) {
                        }
                    } else {
                        // constant results: theta_q comparison against the
                        // expected side evaluated the same way
                        try {
                            Rat lhs, rhs;
                            for (long pr : flags.cfg.primes) {
                                lhs = v.fun.theta_count(pr, {});
                                rhs = want.theta_count(pr, {});
                                extra.items.push_back(check_value(
                                    s.name, "point-count specialization",
                                    "p=" + std::to_string(pr), rhs, lhs));
                            }
                        } catch (const DomainError&) {
                        }
                    }
                    for (auto& it : extra.items) {
                        if (!it.pass) check_failed = true;
                        out << "  oracle [" << it.verdict << "] " << it.method << " ("
                            << it.parameters << "): expected " << it.expected << ", observed "
                            << it.observed << "\n";
                        checks.items.push_back(std::move(it));
                    }
                }
                break;
            }
            case Stmt::DUMP: {
                const Value& v = env.at(s.name);
                out << s.name << " = ";
                if (v.kind == Stmt::PRESBURGER)
                    out << v.formula->str();
                else if (v.kind == Stmt::CELLS) {
                    out << v.cells.size() << " cells";
                    for (const auto& c : v.cells) out << "\n  " << c.str();
                } else if (v.kind == Stmt::MELLIN || v.kind == Stmt::POINCARE)
                    out << v.series.str();
                else
                    out << fun_text(v.fun);
                out << "\n";
                break;
            }
        }
        return out.str();
    }

    std::string json() const {
        using nlohmann::json;
        json results = json::object();
        for (const auto& [name, v] : env) {
            if (v.kind == Stmt::PRESBURGER)
                results[name] = json::parse(v.formula->to_json());
            else if (v.kind == Stmt::CELLS) {
                json arr = json::array();
                for (const auto& c : v.cells) arr.push_back(json::parse(c.to_json()));
                results[name] = arr;
            } else if (v.kind == Stmt::MELLIN || v.kind == Stmt::POINCARE)
                results[name] = json::parse(v.series.to_json());
            else
                results[name] = json::parse(v.fun.to_json());
        }
        json root;
        root["schema"] = 1;
        root["results"] = results;
        root["checks"] = json::parse(checks.to_json())["checks"];
        return root.dump(2);
    }
};

}  // namespace

Script parse_script(const std::string& text) {
    std::map<std::string, int> kinds;
    std::map<std::string, FPtr> formulas;
    Parser parser(text, kinds, formulas);
    return parser.parse_all();
}

RunResult run_script(const Script& script, const RunFlags& flags) {
    RunResult r;
    Evaluator ev;
    ev.flags = flags;
    std::ostringstream out;
    for (const auto& s : script.stmts) {
        try {
            out << ev.exec(s);
        } catch (const NotIntegrable& e) {
            out << "error (line " << s.line << "): not integrable: " << e.what() << "\n";
            r.exit_code = 3;
            r.output = out.str();
            r.json = ev.json();
            return r;
        } catch (const std::exception& e) {
            out << "error (line " << s.line << "): " << e.what() << "\n";
            r.exit_code = 2;
            r.output = out.str();
            r.json = ev.json();
            return r;
        }
    }
    r.exit_code = ev.check_failed ? 1 : 0;
    r.output = out.str();
    r.json = ev.json();
    return r;
}

RunResult run_text(const std::string& text, const RunFlags& flags) {
    try {
        Script sc = parse_script(text);
        return run_script(sc, flags);
    } catch (const ParseError& e) {
        RunResult r;
        r.exit_code = 2;
        r.output = std::string("syntax error: ") + e.what() + "\n";
        r.json = "{\"schema\":1,\"error\":\"syntax\"}";
        return r;
    }
}

int repl_loop(std::istream& in, std::ostream& out, const RunFlags& flags) {
    Evaluator ev;
    ev.flags = flags;
    std::map<std::string, int> kinds;
    std::map<std::string, FPtr> formulas;
    std::string buffer;
    out << "motint repl; statements end with ';', quit with 'exit;' or end-of-input\n";
    out << "> " << std::flush;
    std::string line;
    while (std::getline(in, line)) {
        buffer += line + "\n";
        std::string trimmed = buffer;
        trimmed.erase(trimmed.find_last_not_of(" \t\n\r") + 1);
        if (!trimmed.empty() && trimmed.back() == ';') {
            if (trimmed == "exit;" || trimmed == "quit;") break;
            auto save_kinds = kinds;
            auto save_formulas = formulas;
            try {
                Parser parser(buffer, kinds, formulas);
                while (parser.cur().t != Token::END) {
                    Stmt s = parser.parse_stmt();
                    out << ev.exec(s);
                }
            } catch (const std::exception& e) {
                kinds = std::move(save_kinds);
                formulas = std::move(save_formulas);
                out << "error: " << e.what() << "\n";
            }
            buffer.clear();
            out << "> " << std::flush;
        } else if (trimmed.empty()) {
            buffer.clear();
            out << "> " << std::flush;
        } else {
            out << ". " << std::flush;
        }
    }
    out << "\n";
    return 0;
}

}  // namespace motint
