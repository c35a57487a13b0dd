#pragma once

#include "omt/engine.hpp"
#include "omt/parser.hpp"

#include <memory>
#include <string>

namespace omt {

struct ObjectiveSpec {
    LinearTerm term; // user-facing; maximization is handled by the context
    bool maximize = false;
    std::optional<Rational> lower, upper;
    std::string name;
};

/// Flat problem: declarations, a conjunction of assertions, objectives.
/// Carrier type for the harness: oracle input, fresh-context construction,
/// replayable script rendering.
struct Instance {
    std::vector<std::pair<std::string, Sort>> vars;
    Atoms atoms;
    std::vector<Formula> assertions;
    std::vector<ObjectiveSpec> objectives;

    std::string to_script() const;
};

/// Renders a term over instance/context variable names.
std::string term_sexpr(const LinearTerm& t, const std::function<std::string(VarId)>& name);
std::string atom_sexpr(const LinearAtom& a, const std::function<std::string(VarId)>& name);
std::string formula_sexpr(const Formula& f, const Atoms& atoms,
                          const std::function<std::string(VarId)>& name);

/// Fresh context loaded with the instance (objectives optional).
std::unique_ptr<Context> make_context(const Instance& inst, const Options& opts,
                                      bool with_objectives = true);

/// Asserts one more constraint `term rel 0` on an existing context.
void assert_on(Context& ctx, const LinearTerm& term, InputRel rel);

/// Loads a flat script (no push/pop) into an Instance.
Instance instance_from_script(std::string_view text);

struct RunConfig {
    Options options;
    bool verify = false;
};

struct RunResult {
    int exit_code = 0;
    std::string output;
};

/// Executes a command script against one solver context, collecting the
/// printed results.
RunResult run_script_text(std::string_view text, const RunConfig& cfg);

std::string objectives_block(const std::vector<ObjectiveResult>& objectives);

} // namespace omt
