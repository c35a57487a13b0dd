#pragma once

#include "omt/clause.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace omt {

enum class lbool : uint8_t { False = 0, True = 1, Undef = 2 };

enum class SolveStatus { Sat, Unsat, Unknown };

class SatSolver;

/// Hooks connecting the propositional engine to the theory layer and the
/// optimization driver. All callbacks run inside SatSolver::solve.
class TheoryClient {
public:
    virtual ~TheoryClient() = default;

    enum class ModelAction { Accept, Continue, Stop };
    struct ModelResult {
        ModelAction action = ModelAction::Accept;
        std::vector<Clause> clauses;
    };

    /// Consistency check over the literals assigned so far; `complete` is true
    /// when the propositional assignment is total. Returns a conflict clause
    /// (all literals false under the current trail) or nullopt. May call
    /// SatSolver::theory_propagate for deductions.
    virtual std::optional<Clause> check(SatSolver& solver, bool complete) = 0;

    /// The trail shrank to `trail_size` literals.
    virtual void on_backjump(size_t trail_size) = 0;

    /// Consulted once all assumptions are placed, before each heuristic
    /// decision. Returning a literal forces it as the next decision.
    virtual std::optional<Lit> suggest_decision(SatSolver& solver) { (void)solver; return std::nullopt; }

    /// Called on a theory-consistent total assignment. Continue: add the
    /// returned clauses and keep searching. Accept/Stop end the solve as Sat.
    virtual ModelResult on_model(SatSolver& solver) = 0;
};

/// Conflict-driven clause-learning engine with theory hooks, assumptions and
/// dynamic clause/variable addition. Deterministic for a fixed option set.
class SatSolver {
public:
    struct Counters {
        uint64_t conflicts = 0;
        uint64_t decisions = 0;
        uint64_t propagations = 0;
        uint64_t restarts = 0;
        uint64_t gc_runs = 0;
    };

    SatSolver() = default;

    int new_var();
    int num_vars() const { return static_cast<int>(assigns_.size()); }

    void set_theory(TheoryClient* theory) { theory_ = theory; }
    void set_stop_hook(std::function<bool()> hook) { stop_hook_ = std::move(hook); }

    /// Adds a clause at any decision level, repairing the trail as needed
    /// (backjumps when the clause is unit or falsified below the current
    /// level). An empty clause makes the context permanently unsat. Returns
    /// a handle usable with remove_clause, or nullopt for dropped clauses.
    std::optional<uint32_t> add_clause(std::vector<Lit> lits, Origin origin);

    /// Detaches a clause unless it is currently the reason of an assignment.
    bool remove_clause(uint32_t cref);

    /// Makes the running solve return Unknown at the next loop iteration.
    void request_stop() { external_stop_ = true; }

    SolveStatus solve(std::vector<Lit> assumptions = {});

    /// Subset of the assumptions responsible for the last Unsat answer.
    const std::vector<Lit>& core() const { return core_; }

    bool permanently_unsat() const { return unsat_; }

    lbool value(int var) const { return assigns_[var]; }
    lbool value(Lit l) const {
        lbool v = assigns_[l.var()];
        if (v == lbool::Undef) return v;
        return (v == lbool::True) != l.sign() ? lbool::True : lbool::False;
    }
    int level(int var) const { return levels_[var]; }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    const std::vector<Lit>& trail() const { return trail_; }

    /// Number of decision levels occupied by assumptions once placement is
    /// complete; literals at or below this level are permanent for the call.
    int assumption_levels() const { return static_cast<int>(assumptions_.size()); }
    bool at_assumption_boundary() const { return decision_level() == assumption_levels(); }

    bool lit_true_at_root(Lit l) const {
        return value(l) == lbool::True && levels_[l.var()] <= assumption_levels();
    }

    /// Model of the last Sat answer.
    lbool model_value(int var) const { return model_[var]; }

    /// Theory deduction: enqueue `p` (must be unassigned) with the deduction
    /// clause as its reason. The clause is learned as a T-lemma.
    void theory_propagate(Lit p, std::vector<Lit> reason_clause);

    const Counters& counters() const { return counters_; }

    /// Marks a retired assumption variable: asserts its negation at root so
    /// clauses guarded by it become inert, then garbage-collects inert
    /// Augmented clauses when they dominate the learned database.
    void retire_guard(int var);

    void set_phase(int var, bool negative) { polarity_[var] = negative ? 1 : 0; }

private:
    struct InternalClause {
        std::vector<Lit> lits;
        Origin origin = Origin::Input;
        bool removed = false;
    };
    struct Watcher {
        uint32_t cref;
        Lit blocker;
    };

    static constexpr int32_t reason_none = -1;

    void enqueue(Lit p, int32_t reason);
    std::optional<uint32_t> propagate();
    void cancel_until(int level);
    void analyze(uint32_t confl, std::vector<Lit>& out_learnt, int& out_btlevel);
    void analyze_final(Lit failing_assumption);
    void analyze_final_conflict(uint32_t confl);
    uint32_t store_clause(std::vector<Lit> lits, Origin origin);
    void attach(uint32_t cref);
    /// Integrates a clause at the current level; returns a conflicting cref
    /// if the clause is falsified after repair.
    std::optional<uint32_t> integrate_clause(std::vector<Lit> lits, Origin origin,
                                             std::optional<uint32_t>* stored = nullptr);
    bool handle_conflict(uint32_t confl); // false => final Unsat
    void bump(int var);
    void decay() { var_inc_ /= 0.95; }
    void heap_insert(int var);
    int heap_pop();
    void heap_percolate_up(int i);
    void heap_percolate_down(int i);
    bool heap_less(int a, int b) const {
        return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
    }
    void rescale_activity();
    void run_gc();
    static int64_t luby(int64_t i);

    std::vector<InternalClause> clauses_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<lbool> assigns_;
    std::vector<int> levels_;
    std::vector<int32_t> reasons_;
    std::vector<double> activity_;
    std::vector<char> polarity_;
    std::vector<char> seen_;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::vector<Lit> assumptions_;
    std::vector<Lit> core_;
    std::vector<lbool> model_;
    std::vector<uint32_t> pending_conflicts_;
    size_t qhead_ = 0;
    double var_inc_ = 1.0;
    bool unsat_ = false;
    bool in_solve_ = false;
    bool external_stop_ = false;
    size_t num_learned_ = 0;
    TheoryClient* theory_ = nullptr;
    std::function<bool()> stop_hook_;
    Counters counters_;
};

} // namespace omt
