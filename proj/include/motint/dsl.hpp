#pragma once

#include <iosfwd>

#include "motint/oracle.hpp"

namespace motint {

/// Syntax error with source position; maps to exit code 2.
struct ParseError : std::runtime_error {
    int line, col;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) +
                             ": " + msg),
          line(l),
          col(c) {}
};

/// Evaluation error other than integrability; maps to exit code 2.
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExprNode;
using EPtr = std::shared_ptr<const ExprNode>;

/// One parsed statement. Formulas, descriptions, and cell literals are
/// resolved during parsing (they are pure syntax); value expressions are
/// kept as ASTs and evaluated by the interpreter.
struct Stmt {
    enum Kind {
        LET,
        CLASS_RULE,
        PRESBURGER,
        CPF,
        CELLS,
        MEASURE,
        SUM,
        MELLIN,
        POINCARE,
        CHECK,
        DUMP
    } kind;
    std::string name;
    int line = 1, col = 1;
    EPtr expr;                            // LET/CPF rhs, CHECK rhs, SUM/MELLIN/POINCARE operand
    FPtr formula;                         // PRESBURGER
    std::shared_ptr<ValDesc> desc;        // MEASURE / CELLS via a description
    std::vector<ValCell> cells;           // CELLS literal
    std::string cells_ref;                // MEASURE over a named cell list
    EPtr weight;                          // MEASURE integrand (optional)
    std::vector<std::string> vars;        // SUM/MELLIN/POINCARE variables
    GrothGen pattern;                     // CLASS_RULE lhs presentation
};

struct Script {
    std::vector<Stmt> stmts;
};

struct RunFlags {
    bool oracle = false;
    OracleConfig cfg;
    unsigned long seed = 0;
};

struct RunResult {
    int exit_code = 0;   // 0 ok, 1 check failure, 2 static error, 3 not integrable
    std::string output;  // printed text
    std::string json;    // machine-readable results + checks
};

/// Parse a whole script; throws ParseError with position info.
Script parse_script(const std::string& text);

/// Execute a parsed script.
RunResult run_script(const Script& script, const RunFlags& flags = {});

/// Parse + run, folding parse errors into the exit code.
RunResult run_text(const std::string& text, const RunFlags& flags = {});

/// Interactive loop: one statement per `;`, errors reported and recovered.
int repl_loop(std::istream& in, std::ostream& out, const RunFlags& flags = {});

}  // namespace motint
