#pragma once

#include "omt/formula.hpp"
#include "omt/linear.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace omt {

struct SourcePos {
    int line = 1;
    int col = 1;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourcePos pos)
        : std::runtime_error(msg + " at " + std::to_string(pos.line) + ":" +
                             std::to_string(pos.col)),
          pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

/// S-expression: a token leaf or a parenthesized list.
struct SExpr {
    SourcePos pos;
    bool list = false;
    std::string token;
    std::vector<SExpr> items;

    bool is_leaf() const { return !list; }
    std::string str() const;
};

/// Reads all top-level s-expressions; comments start with ';'.
std::vector<SExpr> read_sexprs(std::string_view text);

enum class CmdKind {
    SetOption,
    DeclareFun,
    Assert,
    Minimize,
    Maximize,
    Push,
    Pop,
    CheckSat,
    GetObjectives,
    GetModel,
    Exit
};

struct Command {
    CmdKind kind;
    SExpr form;
};

struct Script {
    std::vector<Command> commands;
};

/// Syntactic command pass: recognizes command heads, leaves bodies raw.
Script parse_script(std::string_view text);

/// Symbol environment for term elaboration.
struct TermEnv {
    std::function<std::optional<VarId>(const std::string&)> lookup;
    std::function<Sort(VarId)> sort_of;
    std::function<Formula(LinearTerm, InputRel)> mk_atom;
};

/// Elaborates a Bool-sorted expression; raises ParseError on unknown symbols,
/// arity errors, sort mismatches and nonlinear terms.
Formula elaborate_formula(const SExpr& e, const TermEnv& env);

/// Elaborates an arithmetic term (linear fragment only).
LinearTerm elaborate_arith(const SExpr& e, const TermEnv& env);

} // namespace omt
