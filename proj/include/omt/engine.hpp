#pragma once

#include "omt/cnf.hpp"
#include "omt/formula.hpp"
#include "omt/theory.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace omt {

enum class SearchMode { Linear, Binary, Adaptive };
enum class ObjCombine { Single, Boxed, Lex };

struct Options {
    SearchMode search = SearchMode::Linear;
    BnbMode bnb = BnbMode::Advanced;
    int branch_limit = 250;
    ObjCombine mode = ObjCombine::Single;
    uint64_t seed = 0;
    int bin_max_streak = 2;      // force a linear step after this many pivots
    Rational ada_shrink{1, 2};   // adaptive: go binary when a linear step shrank less
    uint64_t node_budget = 500000;
    int64_t timeout_ms = -1;
    bool stats = false;
};

struct Statistics {
    uint64_t sat_assignments = 0;
    uint64_t minimize_calls = 0;
    uint64_t learned_cost_clauses = 0;
    uint64_t pivots_decided = 0;
    uint64_t bnb_nodes = 0;
    uint64_t restarts = 0;
    uint64_t solve_calls = 0;

    std::vector<std::pair<std::string, uint64_t>> ordered() const {
        return {{"sat_assignments", sat_assignments},
                {"minimize_calls", minimize_calls},
                {"learned_cost_clauses", learned_cost_clauses},
                {"pivots_decided", pivots_decided},
                {"bnb_nodes", bnb_nodes},
                {"restarts", restarts},
                {"solve_calls", solve_calls}};
    }
};

enum class ObjStatus { Pending, Optimal, Unbounded, Unsatisfiable, Unknown, Unresolved };

struct ObjectiveResult {
    std::string name;
    ObjStatus status = ObjStatus::Pending;
    ExtendedValue value;   // internal minimization value; negate when maximize
    bool attained = false;
    bool maximize = false;

    /// Printable optimum: sign-flipped for maximization, real part only.
    ExtendedValue printed_value() const {
        if (!maximize) {
            if (!value.is_finite()) return value;
            return ExtendedValue(DeltaRational(value.value().real));
        }
        if (value.is_pos_inf()) return ExtendedValue::neg_inf();
        if (value.is_neg_inf()) return ExtendedValue::pos_inf();
        return ExtendedValue(DeltaRational(-value.value().real));
    }
};

struct Outcome {
    SolveStatus status = SolveStatus::Unknown;
    std::vector<ObjectiveResult> objectives;
    bool has_model = false;
    std::map<VarId, Rational> arith_model;
    std::map<VarId, bool> bool_model;
    uint64_t conflicts = 0; // conflicts spent by this check
};

/// One solver instance: variables, assertion frames, objectives, the CDCL
/// engine, the theory layer, and the optimization driver on top.
class Context final : public TheoryClient {
public:
    explicit Context(Options opts = {});

    Options& options() { return opts_; }
    const Statistics& stats() const { return stats_; }

    VarId declare_var(const std::string& name, Sort sort);
    std::optional<VarId> lookup(const std::string& name) const;
    const std::string& var_name(VarId v) const { return vars_[v].name; }
    Sort var_sort(VarId v) const { return vars_[v].sort; }
    size_t num_user_vars() const { return vars_.size(); }
    bool var_visible(VarId v) const { return !vars_[v].hidden && vars_[v].frame <= frame_depth(); }

    /// Normalizes `term rel 0` into a formula over an interned atom (or a
    /// boolean constant when the term is constant).
    Formula atom_formula(LinearTerm term, InputRel rel);

    void assert_formula(const Formula& f);

    void push();
    void pop();
    int frame_depth() const { return static_cast<int>(frames_.size()); }

    /// Declares an objective in the current frame. `lower`/`upper` are bounds
    /// on the user-facing term (asserted as unit constraints). Returns the
    /// objective id.
    int add_objective(const LinearTerm& term, bool maximize, std::optional<Rational> lower,
                      std::optional<Rational> upper, std::string name);
    size_t num_objectives() const { return objectives_.size(); }

    /// Optimizes all active objectives per the configured mode; with no
    /// active objectives behaves like check_decision.
    Outcome check();

    /// Plain satisfiability of the current assertion stack.
    Outcome check_decision();

    // TheoryClient
    std::optional<Clause> check(SatSolver& solver, bool complete) override;
    void on_backjump(size_t trail_size) override;
    std::optional<Lit> suggest_decision(SatSolver& solver) override;
    ModelResult on_model(SatSolver& solver) override;

private:
    struct VarRec {
        std::string name;
        Sort sort;
        TVar tvar = -1;    // arithmetic sorts
        int sat_var = -1;  // Bool sort
        int frame = 0;
        bool hidden = false;
    };
    struct FrameRec {
        int guard_var;
        std::vector<VarId> vars;
        std::vector<int> objectives;
    };
    struct Objective {
        std::string name;
        LinearTerm term; // user-facing
        bool maximize = false;
        VarId cost_var = -1;
        TVar cost_tvar = -1;
        int frame = 0;
        bool retired = false;
        ExtendedValue initial_upper; // +oo unless a user bound was given
        // per-run state
        ExtendedValue best;
        bool has_model = false;
        std::vector<DeltaRational> best_model;
        std::vector<Rational> best_concrete;
        std::vector<lbool> best_bools;
        bool active = true; // multi-objective C* membership
        // binary/adaptive search state
        std::optional<Rational> last_pivot;
        int pivot_streak = 0;
        bool force_linear = false;
        bool prefer_binary = false;
        std::optional<Rational> width_before_model;
    };

    enum class RunMode { Decision, Single, Boxed };

    int atom_sat_var(int atom_index);
    int bool_sat_var(VarId v);
    TVar tvar_of(VarId v);
    /// Atom encoding `cost < v` over the rationals: `cost <= v.real` when v
    /// has a positive delta part, else `cost < v.real`. Returns the interned
    /// atom index.
    int strict_below_atom(VarId cost_var, const DeltaRational& v);
    void add_guarded(std::vector<Clause> tops);
    void scan_for_negative_equalities(const std::vector<Clause>& clauses);
    BnbLimits make_limits();
    void capture_model(Objective& obj, const std::vector<DeltaRational>& model,
                       const SatSolver& solver);
    void update_range(const SatSolver& solver, const Objective& obj, ExtendedValue& lo,
                      ExtendedValue& hi) const;
    SolveStatus run_solve(std::vector<Lit> extra_assumptions);
    void run_single_objective(int obj_idx, ObjectiveResult& out, const Objective* seed_from,
                              const std::vector<Lit>& extra_assumptions);
    Outcome run_boxed(const std::vector<int>& objs);
    Outcome run_lex(const std::vector<int>& objs);
    std::vector<Lit> frame_assumptions() const;
    void fill_models(Outcome& out, const Objective* model_source);
    void setup_deadline();

    TheoryClient::ModelResult on_model_single(SatSolver& solver);
    TheoryClient::ModelResult on_model_boxed(SatSolver& solver);

    Options opts_;
    Statistics stats_;
    SatSolver solver_;
    TheoryLayer theory_;
    Atoms atoms_;
    std::vector<int> atom_vars_;     // atom index -> sat var
    std::vector<int> var_atom_;      // sat var -> atom index (-1 otherwise)
    std::vector<char> atom_split_;   // trichotomy emitted for EQ atom
    std::vector<VarRec> vars_;
    std::map<std::string, VarId> names_;
    std::vector<FrameRec> frames_;
    std::vector<Objective> objectives_;
    std::unique_ptr<Clausifier> clausifier_;
    std::chrono::steady_clock::time_point deadline_{};
    bool has_deadline_ = false;

    // live solve state
    RunMode run_mode_ = RunMode::Decision;
    int current_obj_ = -1;
    std::vector<int> boxed_objs_;
    int run_guard_ = -1;
    std::optional<uint32_t> last_cmu_;
    bool stop_unbounded_ = false;
    bool stop_optimal_ = false;
};

} // namespace omt
