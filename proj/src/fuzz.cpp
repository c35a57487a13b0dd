#include "omt/fuzz.hpp"

#include "omt/verify.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace omt {

namespace {

int rand_int(std::mt19937_64& rng, int lo, int hi) {
    return static_cast<int>(lo + rng() % (hi - lo + 1));
}

bool chance(std::mt19937_64& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

Rational rand_coeff(std::mt19937_64& rng, int range, bool nonzero) {
    int v = rand_int(rng, -range, range);
    if (nonzero && v == 0) v = rand_int(rng, 0, 1) ? 1 : -1;
    return Rational(v);
}

struct Gen {
    std::mt19937_64& rng;
    const FuzzConfig& cfg;
    Instance inst;
    std::vector<VarId> arith_vars;
    std::vector<VarId> bool_vars;

    Formula atom(LinearTerm t, InputRel rel) {
        NormalizedAtom n = normalize_atom(std::move(t), rel);
        if (n.constant) return Formula::constant(*n.constant);
        return Formula::atom(inst.atoms.intern(n.atom), n.positive);
    }

    LinearTerm random_term(int max_vars, bool allow_constant) {
        LinearTerm t;
        int n = rand_int(rng, 1, std::min<int>(max_vars, static_cast<int>(arith_vars.size())));
        std::vector<VarId> pool = arith_vars;
        for (int k = 0; k < n && !pool.empty(); ++k) {
            size_t i = rng() % pool.size();
            t.add(pool[i], rand_coeff(rng, cfg.coeff_range, true));
            pool.erase(pool.begin() + i);
        }
        if (allow_constant) t.add_constant(rand_coeff(rng, cfg.coeff_range, false));
        return t;
    }

    Formula random_atom() {
        static const InputRel rels[] = {InputRel::LE, InputRel::LE, InputRel::LT, InputRel::GE,
                                        InputRel::GT, InputRel::EQ};
        InputRel rel = rels[rng() % 6];
        return atom(random_term(3, true), rel);
    }

    Formula random_literal() {
        if (!bool_vars.empty() && chance(rng, 0.25)) {
            Formula p = Formula::prop(bool_vars[rng() % bool_vars.size()]);
            return chance(rng, 0.5) ? p : !p;
        }
        Formula a = random_atom();
        return chance(rng, 0.2) ? !a : a;
    }
};

} // namespace

Instance generate_instance(std::mt19937_64& rng, const FuzzConfig& cfg) {
    Gen g{rng, cfg, {}, {}, {}};

    // sorts: pure-Q, pure-Z or mixed
    int kind = rand_int(rng, 0, 2);
    int nvars = rand_int(rng, 1, cfg.max_arith_vars);
    for (int i = 0; i < nvars; ++i) {
        Sort s = kind == 0 ? Sort::Real : kind == 1 ? Sort::Int
                                                    : (i % 2 == 0 ? Sort::Int : Sort::Real);
        std::string name = (s == Sort::Int ? "i" : "q") + std::to_string(i);
        g.arith_vars.push_back(static_cast<VarId>(g.inst.vars.size()));
        g.inst.vars.emplace_back(name, s);
    }
    int nbool = chance(rng, 0.4) ? rand_int(rng, 1, cfg.max_bool_vars) : 0;
    for (int i = 0; i < nbool; ++i) {
        g.bool_vars.push_back(static_cast<VarId>(g.inst.vars.size()));
        g.inst.vars.emplace_back("b" + std::to_string(i), Sort::Bool);
    }

    bool aim_unbounded = chance(rng, cfg.unbounded_bias);

    // integer variables are always boxed so branch&bound and the grid oracle
    // terminate; rational variables stay free when aiming at -oo
    for (size_t i = 0; i < g.arith_vars.size(); ++i) {
        VarId v = g.arith_vars[i];
        bool is_int = g.inst.vars[v].second == Sort::Int;
        bool box = is_int || !aim_unbounded || i + 1 < g.arith_vars.size();
        if (!box) continue;
        int b = cfg.int_box;
        LinearTerm lo = LinearTerm::variable(v);
        lo.add_constant(Rational(b));
        g.inst.assertions.push_back(g.atom(std::move(lo), InputRel::GE)); // v >= -b
        LinearTerm hi = LinearTerm::variable(v);
        hi.add_constant(Rational(-b));
        g.inst.assertions.push_back(g.atom(std::move(hi), InputRel::LE)); // v <= b
    }

    int budget = std::max(2, cfg.max_atoms - 2 * nvars);
    bool disjunctive = chance(rng, cfg.disjunctive_bias);
    while (budget > 0) {
        if (disjunctive && budget >= 2 && chance(rng, 0.7)) {
            // (lit & lit) | lit | ...
            int width = rand_int(rng, 2, 3);
            std::vector<Formula> parts;
            for (int k = 0; k < width && budget > 0; ++k) {
                if (chance(rng, 0.3) && budget >= 2) {
                    parts.push_back(Formula::conj({g.random_literal(), g.random_literal()}));
                    budget -= 2;
                } else {
                    parts.push_back(g.random_literal());
                    budget -= 1;
                }
            }
            g.inst.assertions.push_back(Formula::disj(std::move(parts)));
        } else if (!g.bool_vars.empty() && chance(rng, 0.2)) {
            Formula p = Formula::prop(g.bool_vars[rng() % g.bool_vars.size()]);
            g.inst.assertions.push_back(
                Formula::implies(chance(rng, 0.5) ? p : !p, g.random_literal()));
            budget -= 1;
        } else {
            g.inst.assertions.push_back(g.random_literal());
            budget -= 1;
        }
    }

    int nobj = rand_int(rng, 1, cfg.max_objectives);
    for (int k = 0; k < nobj; ++k) {
        ObjectiveSpec o;
        o.term = g.random_term(3, false);
        o.maximize = chance(rng, 0.3);
        o.name = "goal" + std::to_string(k);
        g.inst.objectives.push_back(std::move(o));
    }
    return g.inst;
}

namespace {

/// The magnitude of a delta part is derivation-dependent; two optimization
/// results agree iff the real parts match and both are (not) attained.
bool value_equiv(const ExtendedValue& a, const ExtendedValue& b) {
    if (a.is_finite() != b.is_finite()) return false;
    if (!a.is_finite()) return a.kind() == b.kind();
    return a.value().real == b.value().real &&
           a.value().delta.is_zero() == b.value().delta.is_zero() &&
           a.value().delta.is_negative() == b.value().delta.is_negative();
}

bool matches(const ObjectiveResult& got, const OracleResult& want, std::string& why) {
    switch (want.status) {
    case OracleResult::Status::Unsat:
        if (got.status != ObjStatus::Unsatisfiable) {
            why = "expected unsat";
            return false;
        }
        return true;
    case OracleResult::Status::Unbounded:
        if (got.status != ObjStatus::Unbounded) {
            why = "expected -oo";
            return false;
        }
        return true;
    case OracleResult::Status::Optimal: {
        if (got.status != ObjStatus::Optimal) {
            why = "expected optimum " + want.value.str();
            return false;
        }
        if (!value_equiv(got.value, ExtendedValue(want.value))) {
            why = "value " + got.value.str() + " != oracle " + want.value.str();
            return false;
        }
        if (got.attained != want.attained) {
            why = "attained flag mismatch";
            return false;
        }
        return true;
    }
    default:
        why = "oracle refused";
        return false;
    }
}

Options base_options() {
    Options o;
    o.search = SearchMode::Linear;
    o.bnb = BnbMode::Advanced;
    o.mode = ObjCombine::Single;
    return o;
}

bool instance_has_ints(const Instance& inst) {
    for (const auto& [n, s] : inst.vars)
        if (s == Sort::Int) return true;
    return false;
}

} // namespace

InstanceVerdict check_instance(const Instance& inst, const FuzzConfig& cfg) {
    InstanceVerdict verdict;
    std::ostringstream why;

    std::vector<OracleResult> expected;
    for (size_t i = 0; i < inst.objectives.size(); ++i) {
        expected.push_back(oracle_optimum(inst, i));
        if (expected.back().status == OracleResult::Status::Refused) {
            verdict.refused = true;
            return verdict;
        }
    }

    const SearchMode searches[] = {SearchMode::Linear, SearchMode::Binary, SearchMode::Adaptive};
    const char* search_names[] = {"lin", "bin", "ada"};
    std::vector<std::pair<BnbMode, const char*>> bnbs = {{BnbMode::Advanced, "adv"},
                                                         {BnbMode::Truncated, "trn"}};
    if (cfg.with_basic && instance_has_ints(inst)) bnbs.push_back({BnbMode::Basic, "basic"});

    for (int si = 0; si < 3; ++si) {
        for (const auto& [bnb, bname] : bnbs) {
            for (ObjCombine combine : {ObjCombine::Single, ObjCombine::Boxed}) {
                Options opts = base_options();
                opts.search = searches[si];
                opts.bnb = bnb;
                opts.mode = combine;
                auto ctx = make_context(inst, opts);
                Outcome out = ctx->check();
                if (out.objectives.size() != inst.objectives.size()) {
                    verdict.pass = false;
                    why << "[" << search_names[si] << "-" << bname << "] objective count mismatch; ";
                    continue;
                }
                for (size_t i = 0; i < expected.size(); ++i) {
                    std::string detail;
                    if (!matches(out.objectives[i], expected[i], detail)) {
                        verdict.pass = false;
                        why << "[" << search_names[si] << "-" << bname << "-"
                            << (combine == ObjCombine::Single ? "single" : "boxed") << "] "
                            << inst.objectives[i].name << ": " << detail << "; ";
                    }
                }
                // self-verification protocol on the solved outcome
                if (si == 0 && bnb == BnbMode::Advanced) {
                    VerificationReport vr = verify_outcome(inst, out, opts);
                    if (!vr.pass) {
                        verdict.pass = false;
                        why << "[verify-"
                            << (combine == ObjCombine::Single ? "single" : "boxed") << "] failed; ";
                    }
                }
            }
        }
    }

    // boxed enumerates no more assignments than the sequential runs
    if (inst.objectives.size() >= 2) {
        verdict.multi_checked = true;
        Options opts = base_options();
        opts.mode = ObjCombine::Boxed;
        auto boxed = make_context(inst, opts);
        boxed->check();
        verdict.boxed_assignments = boxed->stats().sat_assignments;
        uint64_t seq = 0;
        for (size_t i = 0; i < inst.objectives.size(); ++i) {
            Instance one = inst;
            one.objectives = {inst.objectives[i]};
            Options sopts = base_options();
            auto ctx = make_context(one, sopts);
            ctx->check();
            seq += ctx->stats().sat_assignments;
        }
        verdict.sequential_assignments = seq;
        if (verdict.boxed_assignments > seq) {
            verdict.pass = false;
            why << "[boxed-count] " << verdict.boxed_assignments << " > " << seq << "; ";
        }
    }

    // lexicographic stage-wise comparison
    if (cfg.lex && inst.objectives.size() >= 2) {
        std::vector<OracleResult> stages = oracle_lex(inst);
        Options opts = base_options();
        opts.mode = ObjCombine::Lex;
        auto ctx = make_context(inst, opts);
        Outcome out = ctx->check();
        bool refused = false;
        for (const auto& s : stages)
            if (s.status == OracleResult::Status::Refused) refused = true;
        if (!refused) {
            verdict.lex_checked = true;
            for (size_t i = 0; i < stages.size(); ++i) {
                std::string detail;
                if (!matches(out.objectives[i], stages[i], detail)) {
                    verdict.pass = false;
                    why << "[lex stage " << i << "] " << detail << "; ";
                }
            }
            for (size_t i = stages.size(); i < out.objectives.size(); ++i) {
                if (out.objectives[i].status != ObjStatus::Unresolved) {
                    verdict.pass = false;
                    why << "[lex stage " << i << "] expected unresolved; ";
                }
            }
        }
    }

    verdict.message = why.str();
    return verdict;
}

FuzzSummary fuzz_round(const FuzzConfig& cfg) {
    FuzzSummary summary;
    std::mt19937_64 rng(cfg.seed);
    for (int n = 0; n < cfg.count; ++n) {
        Instance inst = generate_instance(rng, cfg);
        InstanceVerdict v = check_instance(inst, cfg);
        summary.total++;
        if (v.refused) {
            summary.refused++;
            continue;
        }
        summary.boxed_assignments += v.boxed_assignments;
        summary.sequential_assignments += v.sequential_assignments;
        if (v.pass) {
            summary.passed++;
        } else {
            summary.failed++;
            std::string label = "instance " + std::to_string(n) + ": " + v.message;
            summary.failures.push_back(label);
            if (!cfg.keep_failing_dir.empty()) {
                std::filesystem::create_directories(cfg.keep_failing_dir);
                std::ofstream f(cfg.keep_failing_dir + "/fuzz_" + std::to_string(cfg.seed) + "_" +
                                std::to_string(n) + ".smt2");
                f << inst.to_script();
            }
        }
    }
    return summary;
}

FuzzSummary fuzz_incremental(const FuzzConfig& cfg) {
    FuzzSummary summary;
    std::mt19937_64 rng(cfg.seed);

    for (int n = 0; n < cfg.count; ++n) {
        summary.total++;
        FuzzConfig icfg = cfg;
        icfg.max_objectives = 1;
        Instance proto = generate_instance(rng, icfg);
        proto.objectives.clear();

        Options opts = base_options();
        auto live = make_context(proto, opts, false);

        // mirror of the live assertion stack for flat replays
        struct Level {
            std::vector<Formula> assertions;
            std::vector<ObjectiveSpec> objectives;
        };
        std::vector<Level> stack(1);

        Gen g{rng, icfg, {}, {}, {}};
        g.inst = proto; // extend the same atom table
        for (VarId v = 0; v < static_cast<VarId>(proto.vars.size()); ++v) {
            if (proto.vars[v].second == Sort::Bool) g.bool_vars.push_back(v);
            else g.arith_vars.push_back(v);
        }

        bool ok = true;
        std::string why;
        int steps = rand_int(rng, 5, 10);
        int obj_counter = 0;
        for (int s = 0; s < steps && ok; ++s) {
            int action = rand_int(rng, 0, 5);
            if (action == 0) {
                live->push();
                stack.emplace_back();
            } else if (action == 1 && stack.size() > 1) {
                live->pop();
                stack.pop_back();
            } else if (action <= 3) {
                Formula f = chance(rng, 0.5) ? g.random_literal()
                                             : Formula::disj({g.random_literal(), g.random_literal()});
                stack.back().assertions.push_back(f);
                // translate onto the live context (formulas are tiny)
                std::function<Formula(const Formula&)> tr = [&](const Formula& ff) -> Formula {
                    switch (ff.kind()) {
                    case Formula::Kind::Atom: {
                        const LinearAtom& a = g.inst.atoms[ff.id()];
                        InputRel rel = a.rel == Rel::LE ? InputRel::LE
                                       : a.rel == Rel::LT ? InputRel::LT : InputRel::EQ;
                        return live->atom_formula(a.term, rel);
                    }
                    case Formula::Kind::Not: return !tr(ff.children()[0]);
                    case Formula::Kind::And:
                    case Formula::Kind::Or: {
                        std::vector<Formula> kids;
                        for (const auto& c : ff.children()) kids.push_back(tr(c));
                        return ff.kind() == Formula::Kind::And ? Formula::conj(std::move(kids))
                                                               : Formula::disj(std::move(kids));
                    }
                    default: return ff;
                    }
                };
                live->assert_formula(tr(f));
            } else if (action == 4) {
                ObjectiveSpec o;
                o.term = g.random_term(2, false);
                o.maximize = chance(rng, 0.3);
                o.name = "inc" + std::to_string(obj_counter++);
                stack.back().objectives.push_back(o);
                live->add_objective(o.term, o.maximize, o.lower, o.upper, o.name);
            } else {
                // check-sat: compare against a fresh flat solve
                Instance flat;
                flat.vars = proto.vars;
                flat.atoms = g.inst.atoms;
                flat.assertions = proto.assertions;
                for (const auto& lvl : stack) {
                    for (const auto& f : lvl.assertions) flat.assertions.push_back(f);
                    for (const auto& o : lvl.objectives) flat.objectives.push_back(o);
                }
                Outcome inc = live->check();
                auto fresh = make_context(flat, opts);
                Outcome ref = fresh->check();
                if (inc.status != ref.status || inc.objectives.size() != ref.objectives.size()) {
                    ok = false;
                    why = "status mismatch vs flat solve";
                } else {
                    for (size_t i = 0; i < ref.objectives.size() && ok; ++i) {
                        const auto& a = inc.objectives[i];
                        const auto& b = ref.objectives[i];
                        if (a.status != b.status || !value_equiv(a.value, b.value) ||
                            a.attained != b.attained) {
                            ok = false;
                            why = "objective mismatch vs flat solve";
                        }
                    }
                }
                if (ok) {
                    // an identical re-solve must not cost more conflicts
                    Outcome again = live->check();
                    if (again.conflicts > inc.conflicts) {
                        ok = false;
                        why = "re-solve cost more conflicts (" + std::to_string(again.conflicts) +
                              " > " + std::to_string(inc.conflicts) + ")";
                    }
                    for (size_t i = 0; i < again.objectives.size() && ok; ++i) {
                        if (!value_equiv(again.objectives[i].value, inc.objectives[i].value)) {
                            ok = false;
                            why = "re-solve changed a value";
                        }
                    }
                }
            }
        }
        if (ok) summary.passed++;
        else {
            summary.failed++;
            summary.failures.push_back("incremental " + std::to_string(n) + ": " + why);
        }
    }
    return summary;
}

} // namespace omt
