#include "omt/parser.hpp"

#include <cassert>
#include <map>

namespace omt {

std::string SExpr::str() const {
    if (is_leaf()) return token;
    std::string s = "(";
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) s += " ";
        s += items[i].str();
    }
    s += ")";
    return s;
}

namespace {

struct Reader {
    std::string_view text;
    size_t i = 0;
    SourcePos pos{};

    char peek() const { return text[i]; }
    bool done() const { return i >= text.size(); }

    void advance() {
        if (text[i] == '\n') {
            pos.line++;
            pos.col = 1;
        } else {
            pos.col++;
        }
        i++;
    }

    void skip_space() {
        while (!done()) {
            if (peek() == ';') {
                while (!done() && peek() != '\n') advance();
            } else if (isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        skip_space();
        if (done()) throw ParseError("unexpected end of input", pos);
        SourcePos start = pos;
        if (peek() == '(') {
            advance();
            SExpr e;
            e.pos = start;
            e.list = true;
            while (true) {
                skip_space();
                if (done()) throw ParseError("unbalanced '('", start);
                if (peek() == ')') {
                    advance();
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (peek() == ')') throw ParseError("unexpected ')'", pos);
        SExpr e;
        e.pos = start;
        std::string tok;
        while (!done() && !isspace(static_cast<unsigned char>(peek())) && peek() != '(' &&
               peek() != ')' && peek() != ';') {
            tok += peek();
            advance();
        }
        e.token = std::move(tok);
        return e;
    }
};

} // namespace

std::vector<SExpr> read_sexprs(std::string_view text) {
    Reader r{text, 0, {}};
    std::vector<SExpr> out;
    while (true) {
        r.skip_space();
        if (r.done()) break;
        out.push_back(r.read());
    }
    return out;
}

Script parse_script(std::string_view text) {
    static const std::map<std::string, CmdKind> heads = {
        {"set-option", CmdKind::SetOption},   {"declare-fun", CmdKind::DeclareFun},
        {"declare-const", CmdKind::DeclareFun}, {"assert", CmdKind::Assert},
        {"minimize", CmdKind::Minimize},      {"maximize", CmdKind::Maximize},
        {"push", CmdKind::Push},              {"pop", CmdKind::Pop},
        {"check-sat", CmdKind::CheckSat},     {"get-objectives", CmdKind::GetObjectives},
        {"get-model", CmdKind::GetModel},     {"exit", CmdKind::Exit}};

    Script script;
    for (auto& form : read_sexprs(text)) {
        if (!form.list || form.items.empty() || !form.items[0].is_leaf())
            throw ParseError("expected a command form", form.pos);
        auto it = heads.find(form.items[0].token);
        if (it == heads.end())
            throw ParseError("unknown command '" + form.items[0].token + "'", form.items[0].pos);
        script.commands.push_back({it->second, std::move(form)});
    }
    return script;
}

namespace {

/// Either a Bool formula or a linear arithmetic term.
struct Elab {
    std::optional<Formula> formula;
    std::optional<LinearTerm> arith;
    SourcePos pos;
};

Elab elaborate(const SExpr& e, const TermEnv& env);

LinearTerm want_arith(Elab v) {
    if (!v.arith) throw ParseError("expected an arithmetic term", v.pos);
    return std::move(*v.arith);
}

Formula want_formula(Elab v) {
    if (!v.formula) throw ParseError("expected a Bool expression", v.pos);
    return std::move(*v.formula);
}

Formula chain_compare(const SExpr& e, const TermEnv& env, InputRel rel) {
    if (e.items.size() < 3) throw ParseError("comparison needs at least 2 arguments", e.pos);
    std::vector<Formula> parts;
    LinearTerm prev = want_arith(elaborate(e.items[1], env));
    for (size_t i = 2; i < e.items.size(); ++i) {
        LinearTerm cur = want_arith(elaborate(e.items[i], env));
        parts.push_back(env.mk_atom(prev - cur, rel)); // prev rel cur
        prev = std::move(cur);
    }
    return Formula::conj(std::move(parts));
}

Elab elaborate(const SExpr& e, const TermEnv& env) {
    Elab out;
    out.pos = e.pos;
    if (e.is_leaf()) {
        const std::string& t = e.token;
        if (t == "true") {
            out.formula = Formula::constant(true);
            return out;
        }
        if (t == "false") {
            out.formula = Formula::constant(false);
            return out;
        }
        if (!t.empty() && (isdigit(static_cast<unsigned char>(t[0])) ||
                           ((t[0] == '-' || t[0] == '+') && t.size() > 1))) {
            auto r = Rational::parse(t);
            if (!r) throw ParseError("malformed number '" + t + "'", e.pos);
            out.arith = LinearTerm(*r);
            return out;
        }
        auto v = env.lookup(t);
        if (!v) throw ParseError("unknown symbol '" + t + "'", e.pos);
        if (env.sort_of(*v) == Sort::Bool) out.formula = Formula::prop(*v);
        else out.arith = LinearTerm::variable(*v);
        return out;
    }

    if (e.items.empty() || !e.items[0].is_leaf())
        throw ParseError("expected an operator application", e.pos);
    const std::string& op = e.items[0].token;
    size_t n = e.items.size() - 1;
    auto arg = [&](size_t k) -> const SExpr& { return e.items[k + 1]; };

    if (op == "and" || op == "or") {
        std::vector<Formula> parts;
        for (size_t k = 0; k < n; ++k) parts.push_back(want_formula(elaborate(arg(k), env)));
        out.formula = op == "and" ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
        return out;
    }
    if (op == "not") {
        if (n != 1) throw ParseError("'not' takes one argument", e.pos);
        out.formula = !want_formula(elaborate(arg(0), env));
        return out;
    }
    if (op == "=>") {
        if (n < 2) throw ParseError("'=>' needs at least 2 arguments", e.pos);
        // right-associative chain
        Formula acc = want_formula(elaborate(arg(n - 1), env));
        for (size_t k = n - 1; k-- > 0;)
            acc = Formula::implies(want_formula(elaborate(arg(k), env)), std::move(acc));
        out.formula = std::move(acc);
        return out;
    }
    if (op == "<=") { out.formula = chain_compare(e, env, InputRel::LE); return out; }
    if (op == "<") { out.formula = chain_compare(e, env, InputRel::LT); return out; }
    if (op == ">=") { out.formula = chain_compare(e, env, InputRel::GE); return out; }
    if (op == ">") { out.formula = chain_compare(e, env, InputRel::GT); return out; }
    if (op == "=") {
        if (n < 2) throw ParseError("'=' needs at least 2 arguments", e.pos);
        Elab first = elaborate(arg(0), env);
        if (first.formula) {
            std::vector<Formula> parts;
            Formula prev = std::move(*first.formula);
            for (size_t k = 1; k < n; ++k) {
                Formula cur = want_formula(elaborate(arg(k), env));
                parts.push_back(Formula::iff(prev, cur));
                prev = std::move(cur);
            }
            out.formula = Formula::conj(std::move(parts));
            return out;
        }
        std::vector<Formula> parts;
        LinearTerm prev = want_arith(std::move(first));
        for (size_t k = 1; k < n; ++k) {
            LinearTerm cur = want_arith(elaborate(arg(k), env));
            parts.push_back(env.mk_atom(prev - cur, InputRel::EQ));
            prev = std::move(cur);
        }
        out.formula = Formula::conj(std::move(parts));
        return out;
    }
    if (op == "+") {
        LinearTerm acc;
        for (size_t k = 0; k < n; ++k) acc += want_arith(elaborate(arg(k), env));
        out.arith = std::move(acc);
        return out;
    }
    if (op == "-") {
        if (n == 0) throw ParseError("'-' needs arguments", e.pos);
        LinearTerm acc = want_arith(elaborate(arg(0), env));
        if (n == 1) {
            out.arith = -acc;
            return out;
        }
        for (size_t k = 1; k < n; ++k) acc -= want_arith(elaborate(arg(k), env));
        out.arith = std::move(acc);
        return out;
    }
    if (op == "*") {
        // linear fragment: at most one non-constant factor
        std::optional<LinearTerm> var_part;
        Rational scale(1);
        for (size_t k = 0; k < n; ++k) {
            LinearTerm t = want_arith(elaborate(arg(k), env));
            if (t.is_constant()) {
                scale *= t.constant();
            } else if (!var_part) {
                var_part = std::move(t);
            } else {
                throw ParseError("nonlinear term", e.pos);
            }
        }
        if (var_part) {
            *var_part *= scale;
            out.arith = std::move(*var_part);
        } else {
            out.arith = LinearTerm(scale);
        }
        return out;
    }
    if (op == "/") {
        if (n != 2) throw ParseError("'/' takes two arguments", e.pos);
        LinearTerm num = want_arith(elaborate(arg(0), env));
        LinearTerm den = want_arith(elaborate(arg(1), env));
        if (!den.is_constant()) throw ParseError("nonlinear term", e.pos);
        if (den.constant().is_zero()) throw ParseError("division by zero", e.pos);
        num *= den.constant().inverse();
        out.arith = std::move(num);
        return out;
    }
    throw ParseError("unknown operator '" + op + "'", e.items[0].pos);
}

} // namespace

Formula elaborate_formula(const SExpr& e, const TermEnv& env) {
    return want_formula(elaborate(e, env));
}

LinearTerm elaborate_arith(const SExpr& e, const TermEnv& env) {
    return want_arith(elaborate(e, env));
}

} // namespace omt
