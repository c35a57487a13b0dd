#pragma once

#include "omt/bnb.hpp"
#include "omt/linear.hpp"
#include "omt/sat.hpp"
#include "omt/simplex.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace omt {

/// Interning table: structurally equal canonical atoms share one index.
class Atoms {
public:
    int intern(const LinearAtom& a) {
        auto it = index_.find(a);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(atoms_.size());
        atoms_.push_back(a);
        index_.emplace(a, id);
        return id;
    }
    const LinearAtom& operator[](int i) const { return atoms_[i]; }
    size_t size() const { return atoms_.size(); }

private:
    std::vector<LinearAtom> atoms_;
    std::map<LinearAtom, int> index_;
};

/// Bounds a SAT literal imposes on a tableau variable, per phase. Negated
/// equalities impose nothing (the trichotomy clause introduces the strict
/// atoms that do).
struct TheoryAtomInfo {
    int sat_var = -1;
    TVar target = -1;
    std::optional<DeltaRational> pos_upper, pos_lower, neg_upper, neg_lower;
};

/// Keeps the tableau in sync with the SAT trail: asserts bounds for theory
/// literals as they appear, restores them on backjumps, runs consistency
/// checks (with branch&bound for integral content on complete assignments),
/// performs bound-implication deductions, and exposes minimization.
class TheoryLayer {
public:
    explicit TheoryLayer(SatSolver& solver) : solver_(solver) {}

    Simplex& simplex() { return simplex_; }

    TVar new_arith_var(bool integral) { return simplex_.new_var(integral); }

    /// Registers the canonical atom under `sat_var`; `tvar_of` maps formula
    /// variables to tableau variables.
    void register_atom(int sat_var, const LinearAtom& atom,
                       const std::function<TVar(VarId)>& tvar_of);

    /// Synthetic equality `target = value` (used for lexicographic stages).
    void register_pin(int sat_var, TVar target, const DeltaRational& value);

    const TheoryAtomInfo* atom_info(int sat_var) const {
        if (sat_var >= static_cast<int>(infos_.size()) || infos_[sat_var].sat_var < 0)
            return nullptr;
        return &infos_[sat_var];
    }

    const std::vector<int>& atoms_on(TVar target) const {
        static const std::vector<int> empty;
        if (target >= static_cast<int>(atoms_on_.size())) return empty;
        return atoms_on_[target];
    }

    /// Trail sync plus consistency check; `complete` additionally enforces
    /// integrality and stashes a witnessing model. Returns a conflict clause
    /// or nullopt; sets the unknown flag when a resource budget is hit.
    std::optional<Clause> check(SatSolver& solver, bool complete, const BnbLimits& limits,
                                uint64_t& bnb_nodes);

    void on_backjump(size_t trail_size);

    bool unknown_flagged() const { return unknown_; }
    void clear_unknown() { unknown_ = false; }

    /// The tableau was touched outside the sync path (probes, minimization):
    /// force a real check next time.
    void mark_dirty() { needs_check_ = true; }

    bool has_integral_vars() const;

    /// Model of the last successful complete check (all tableau variables),
    /// plus its rational concretization computed while the bounds were live.
    const std::vector<DeltaRational>& stashed_model() const { return stash_; }
    const std::vector<Rational>& stashed_concrete() const { return stash_concrete_; }

    /// Minimizes `cost` over the current complete, consistent state.
    BnbResult minimize(TVar cost, BnbMode mode, const BnbLimits& limits);

    /// Substitutes a concrete positive rational for epsilon, small enough
    /// that every currently active bound stays satisfied.
    std::vector<Rational> concretize(const std::vector<DeltaRational>& model) const;

private:
    std::optional<Clause> conflict_clause(const Simplex::Conflict& c) const;
    void deduce_from_bound(SatSolver& solver, Lit trigger, TVar target, bool upper_changed);

    SatSolver& solver_;
    Simplex simplex_;
    std::vector<TheoryAtomInfo> infos_; // indexed by sat var
    std::vector<std::vector<int>> atoms_on_;
    std::map<LinearTerm, TVar> slack_of_;
    // one entry per theory literal asserted, in trail order
    std::vector<std::pair<size_t, size_t>> assert_log_; // (trail index, simplex mark)
    size_t synced_ = 0;
    bool needs_check_ = true;
    bool unknown_ = false;
    std::vector<DeltaRational> stash_;
    std::vector<Rational> stash_concrete_;
};

} // namespace omt
