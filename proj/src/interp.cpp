#include "omt/interp.hpp"

#include <cassert>
#include <map>
#include <sstream>

namespace omt {

std::string term_sexpr(const LinearTerm& t, const std::function<std::string(VarId)>& name) {
    std::vector<std::string> parts;
    for (const auto& [v, c] : t.coeffs()) {
        if (c == Rational(1)) parts.push_back(name(v));
        else parts.push_back("(* " + c.smt() + " " + name(v) + ")");
    }
    if (!t.constant().is_zero() || parts.empty()) parts.push_back(t.constant().smt());
    if (parts.size() == 1) return parts[0];
    std::string s = "(+";
    for (const auto& p : parts) s += " " + p;
    return s + ")";
}

std::string atom_sexpr(const LinearAtom& a, const std::function<std::string(VarId)>& name) {
    // print as `lhs rel rhs` with the constant moved to the right-hand side
    LinearTerm lhs;
    for (const auto& [v, c] : a.term.coeffs()) lhs.add(v, c);
    Rational rhs = -a.term.constant();
    const char* rel = a.rel == Rel::LE ? "<=" : a.rel == Rel::LT ? "<" : "=";
    return std::string("(") + rel + " " + term_sexpr(lhs, name) + " " + rhs.smt() + ")";
}

std::string formula_sexpr(const Formula& f, const Atoms& atoms,
                          const std::function<std::string(VarId)>& name) {
    switch (f.kind()) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Prop: return name(f.id());
    case Formula::Kind::Atom: return atom_sexpr(atoms[f.id()], name);
    case Formula::Kind::Not: return "(not " + formula_sexpr(f.children()[0], atoms, name) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::string s = f.kind() == Formula::Kind::And ? "(and" : "(or";
        for (const auto& c : f.children()) s += " " + formula_sexpr(c, atoms, name);
        return s + ")";
    }
    }
    return "";
}

std::string Instance::to_script() const {
    std::ostringstream out;
    auto name = [this](VarId v) { return vars[v].first; };
    for (const auto& [nm, sort] : vars)
        out << "(declare-fun " << nm << " () " << sort_name(sort) << ")\n";
    for (const auto& a : assertions)
        out << "(assert " << formula_sexpr(a, atoms, name) << ")\n";
    for (const auto& o : objectives) {
        out << (o.maximize ? "(maximize " : "(minimize ") << term_sexpr(o.term, name);
        if (o.lower) out << " :lower " << o.lower->smt();
        if (o.upper) out << " :upper " << o.upper->smt();
        out << ")\n";
    }
    out << "(check-sat)\n(get-objectives)\n";
    return out.str();
}

namespace {

Formula translate(const Formula& f, const std::vector<Formula>& atom_map,
                  std::map<const void*, Formula>& memo) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Prop:
        return f;
    case Formula::Kind::Atom:
        return atom_map[f.id()];
    default: {
        auto it = memo.find(f.key());
        if (it != memo.end()) return it->second;
        std::vector<Formula> kids;
        kids.reserve(f.children().size());
        for (const auto& c : f.children()) kids.push_back(translate(c, atom_map, memo));
        Formula out = f.kind() == Formula::Kind::Not ? !kids[0]
                      : f.kind() == Formula::Kind::And ? Formula::conj(std::move(kids))
                                                       : Formula::disj(std::move(kids));
        memo.emplace(f.key(), out);
        return out;
    }
    }
}

} // namespace

std::unique_ptr<Context> make_context(const Instance& inst, const Options& opts,
                                      bool with_objectives) {
    auto ctx = std::make_unique<Context>(opts);
    for (const auto& [nm, sort] : inst.vars) ctx->declare_var(nm, sort);
    std::vector<Formula> atom_map;
    atom_map.reserve(inst.atoms.size());
    for (size_t i = 0; i < inst.atoms.size(); ++i) {
        const LinearAtom& a = inst.atoms[static_cast<int>(i)];
        InputRel rel = a.rel == Rel::LE ? InputRel::LE : a.rel == Rel::LT ? InputRel::LT
                                                                          : InputRel::EQ;
        atom_map.push_back(ctx->atom_formula(a.term, rel));
    }
    std::map<const void*, Formula> memo;
    for (const auto& f : inst.assertions) ctx->assert_formula(translate(f, atom_map, memo));
    if (with_objectives)
        for (const auto& o : inst.objectives)
            ctx->add_objective(o.term, o.maximize, o.lower, o.upper, o.name);
    return ctx;
}

void assert_on(Context& ctx, const LinearTerm& term, InputRel rel) {
    ctx.assert_formula(ctx.atom_formula(term, rel));
}

namespace {

Sort parse_sort(const SExpr& e) {
    if (e.is_leaf()) {
        if (e.token == "Bool") return Sort::Bool;
        if (e.token == "Int") return Sort::Int;
        if (e.token == "Real") return Sort::Real;
    }
    throw ParseError("unknown sort '" + e.str() + "'", e.pos);
}

struct DeclParts {
    std::string name;
    Sort sort;
};

DeclParts parse_declare(const SExpr& form) {
    // (declare-fun name () Sort) or (declare-const name Sort)
    const std::string& head = form.items[0].token;
    if (head == "declare-const") {
        if (form.items.size() != 3 || !form.items[1].is_leaf())
            throw ParseError("expected (declare-const name Sort)", form.pos);
        return {form.items[1].token, parse_sort(form.items[2])};
    }
    if (form.items.size() != 4 || !form.items[1].is_leaf())
        throw ParseError("expected (declare-fun name () Sort)", form.pos);
    if (!form.items[2].list || !form.items[2].items.empty())
        throw ParseError("only 0-arity declarations are supported", form.items[2].pos);
    return {form.items[1].token, parse_sort(form.items[3])};
}

struct ObjParts {
    LinearTerm term;
    std::optional<Rational> lower, upper;
    std::string name;
};

ObjParts parse_objective(const SExpr& form, const TermEnv& env) {
    if (form.items.size() < 2) throw ParseError("objective needs a term", form.pos);
    ObjParts out;
    out.term = elaborate_arith(form.items[1], env);
    out.name = form.items[1].str();
    size_t i = 2;
    while (i < form.items.size()) {
        if (!form.items[i].is_leaf() || form.items[i].token[0] != ':')
            throw ParseError("expected an attribute", form.items[i].pos);
        const std::string& key = form.items[i].token;
        if (i + 1 >= form.items.size())
            throw ParseError("attribute " + key + " needs a value", form.items[i].pos);
        LinearTerm val = elaborate_arith(form.items[i + 1], env);
        if (!val.is_constant())
            throw ParseError("attribute " + key + " needs a numeral", form.items[i + 1].pos);
        if (key == ":lower") out.lower = val.constant();
        else if (key == ":upper") out.upper = val.constant();
        else throw ParseError("unknown attribute " + key, form.items[i].pos);
        i += 2;
    }
    return out;
}

int parse_count(const SExpr& form) {
    if (form.items.size() == 1) return 1;
    if (form.items.size() == 2 && form.items[1].is_leaf()) {
        auto r = Rational::parse(form.items[1].token);
        if (r && r->is_integer() && !r->is_negative()) {
            return static_cast<int>(r->numerator().convert_to<long long>());
        }
    }
    throw ParseError("expected a non-negative numeral", form.pos);
}

std::string value_text(const ObjectiveResult& r) {
    switch (r.status) {
    case ObjStatus::Unresolved: return "unresolved";
    case ObjStatus::Unknown: return "unknown";
    default: return r.printed_value().smt();
    }
}

} // namespace

std::string objectives_block(const std::vector<ObjectiveResult>& objectives) {
    std::ostringstream out;
    out << "(objectives\n";
    for (const auto& r : objectives) {
        out << "  (" << r.name << " " << value_text(r) << " :attained "
            << (r.attained ? "true" : "false") << ")\n";
    }
    out << ")\n";
    return out.str();
}

Instance instance_from_script(std::string_view text) {
    Script script = parse_script(text);
    Instance inst;
    std::map<std::string, VarId> names;
    TermEnv env{
        [&](const std::string& n) -> std::optional<VarId> {
            auto it = names.find(n);
            if (it == names.end()) return std::nullopt;
            return it->second;
        },
        [&](VarId v) { return inst.vars[v].second; },
        [&](LinearTerm t, InputRel rel) {
            NormalizedAtom n = normalize_atom(std::move(t), rel);
            if (n.constant) return Formula::constant(*n.constant);
            return Formula::atom(inst.atoms.intern(n.atom), n.positive);
        }};

    for (const auto& cmd : script.commands) {
        switch (cmd.kind) {
        case CmdKind::DeclareFun: {
            DeclParts d = parse_declare(cmd.form);
            if (names.count(d.name))
                throw ParseError("symbol already declared: " + d.name, cmd.form.pos);
            names.emplace(d.name, static_cast<VarId>(inst.vars.size()));
            inst.vars.emplace_back(d.name, d.sort);
            break;
        }
        case CmdKind::Assert:
            if (cmd.form.items.size() != 2) throw ParseError("assert takes one term", cmd.form.pos);
            inst.assertions.push_back(elaborate_formula(cmd.form.items[1], env));
            break;
        case CmdKind::Minimize:
        case CmdKind::Maximize: {
            ObjParts o = parse_objective(cmd.form, env);
            inst.objectives.push_back(
                {std::move(o.term), cmd.kind == CmdKind::Maximize, o.lower, o.upper, o.name});
            break;
        }
        case CmdKind::Push:
        case CmdKind::Pop:
            throw ParseError("incremental commands are not supported here", cmd.form.pos);
        default:
            break; // set-option / check-sat / get-* / exit are irrelevant here
        }
    }
    return inst;
}

RunResult run_script_text(std::string_view text, const RunConfig& cfg) {
    RunResult result;
    std::ostringstream out;
    try {
        Script script = parse_script(text);
        Context ctx(cfg.options);
        TermEnv env{[&](const std::string& n) { return ctx.lookup(n); },
                    [&](VarId v) { return ctx.var_sort(v); },
                    [&](LinearTerm t, InputRel rel) { return ctx.atom_formula(std::move(t), rel); }};
        std::optional<Outcome> last;
        bool done = false;

        for (const auto& cmd : script.commands) {
            if (done) break;
            switch (cmd.kind) {
            case CmdKind::SetOption: {
                // recognized: (set-option :mode m) (set-option :search s)
                if (cmd.form.items.size() == 3 && cmd.form.items[1].is_leaf() &&
                    cmd.form.items[2].is_leaf()) {
                    const std::string& key = cmd.form.items[1].token;
                    const std::string& val = cmd.form.items[2].token;
                    Options& o = ctx.options();
                    if (key == ":mode") {
                        if (val == "single") o.mode = ObjCombine::Single;
                        else if (val == "boxed") o.mode = ObjCombine::Boxed;
                        else if (val == "lex") o.mode = ObjCombine::Lex;
                    } else if (key == ":search") {
                        if (val == "lin") o.search = SearchMode::Linear;
                        else if (val == "bin") o.search = SearchMode::Binary;
                        else if (val == "ada") o.search = SearchMode::Adaptive;
                    }
                }
                break;
            }
            case CmdKind::DeclareFun: {
                DeclParts d = parse_declare(cmd.form);
                ctx.declare_var(d.name, d.sort);
                break;
            }
            case CmdKind::Assert:
                if (cmd.form.items.size() != 2)
                    throw ParseError("assert takes one term", cmd.form.pos);
                ctx.assert_formula(elaborate_formula(cmd.form.items[1], env));
                break;
            case CmdKind::Minimize:
            case CmdKind::Maximize: {
                ObjParts o = parse_objective(cmd.form, env);
                ctx.add_objective(o.term, cmd.kind == CmdKind::Maximize, o.lower, o.upper, o.name);
                break;
            }
            case CmdKind::Push:
                for (int k = parse_count(cmd.form); k > 0; --k) ctx.push();
                break;
            case CmdKind::Pop: {
                int k = parse_count(cmd.form);
                if (k > ctx.frame_depth())
                    throw ParseError("pop exceeds push depth", cmd.form.pos);
                while (k-- > 0) ctx.pop();
                break;
            }
            case CmdKind::CheckSat: {
                Outcome oc = ctx.check();
                switch (oc.status) {
                case SolveStatus::Sat: out << "sat\n"; break;
                case SolveStatus::Unsat: out << "unsat\n"; break;
                default: out << "unknown\n"; break;
                }
                if (cfg.options.stats)
                    for (const auto& [k, v] : ctx.stats().ordered())
                        out << "; stats: " << k << "=" << v << "\n";
                last = std::move(oc);
                break;
            }
            case CmdKind::GetObjectives:
                if (last) out << objectives_block(last->objectives);
                else out << "(objectives\n)\n";
                break;
            case CmdKind::GetModel:
                if (last && last->has_model) {
                    out << "(model\n";
                    for (VarId v = 0; v < static_cast<VarId>(ctx.num_user_vars()); ++v) {
                        if (!ctx.var_visible(v)) continue;
                        out << "  (define-fun " << ctx.var_name(v) << " () "
                            << sort_name(ctx.var_sort(v)) << " ";
                        if (ctx.var_sort(v) == Sort::Bool) {
                            auto it = last->bool_model.find(v);
                            out << ((it != last->bool_model.end() && it->second) ? "true" : "false");
                        } else {
                            auto it = last->arith_model.find(v);
                            out << (it != last->arith_model.end() ? it->second.smt() : "0");
                        }
                        out << ")\n";
                    }
                    out << ")\n";
                } else {
                    out << "(error \"model is not available\")\n";
                }
                break;
            case CmdKind::Exit:
                done = true;
                break;
            }
        }
        result.output = out.str();
    } catch (const std::exception& e) {
        out << "(error \"" << e.what() << "\")\n";
        result.output = out.str();
        result.exit_code = 1;
    }
    return result;
}

} // namespace omt
