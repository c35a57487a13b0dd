#include "omt/theory.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <cstdlib>

namespace omt {

void TheoryLayer::register_atom(int sat_var, const LinearAtom& atom,
                                const std::function<TVar(VarId)>& tvar_of) {
    if (sat_var >= static_cast<int>(infos_.size())) infos_.resize(sat_var + 1);
    assert(infos_[sat_var].sat_var < 0);

    TheoryAtomInfo info;
    info.sat_var = sat_var;

    const auto& coeffs = atom.term.coeffs();
    assert(!coeffs.empty());
    Rational rhs;
    bool flipped = false;
    if (coeffs.size() == 1) {
        const auto& [v, a] = coeffs.front();
        info.target = tvar_of(v);
        rhs = -atom.term.constant() / a;
        flipped = a.is_negative();
    } else {
        // slack variable shared by all atoms over the same combination
        LinearTerm key;
        for (const auto& [v, a] : coeffs) key.add(v, a);
        auto it = slack_of_.find(key);
        if (it != slack_of_.end()) {
            info.target = it->second;
        } else {
            std::vector<std::pair<TVar, Rational>> combo;
            bool integral = true;
            for (const auto& [v, a] : coeffs) {
                TVar tv = tvar_of(v);
                combo.push_back({tv, a});
                integral = integral && simplex_.is_integral(tv) && a.is_integer();
            }
            info.target = simplex_.new_slack(combo, integral);
            slack_of_.emplace(key, info.target);
        }
        rhs = -atom.term.constant();
    }

    const DeltaRational at(rhs);
    const DeltaRational just_below(rhs, Rational(-1));
    const DeltaRational just_above(rhs, Rational(1));
    switch (atom.rel) {
    case Rel::LE:
        if (!flipped) { // target <= rhs
            info.pos_upper = at;
            info.neg_lower = just_above;
        } else { // target >= rhs
            info.pos_lower = at;
            info.neg_upper = just_below;
        }
        break;
    case Rel::LT:
        if (!flipped) { // target < rhs
            info.pos_upper = just_below;
            info.neg_lower = at;
        } else { // target > rhs
            info.pos_lower = just_above;
            info.neg_upper = at;
        }
        break;
    case Rel::EQ:
        info.pos_upper = at;
        info.pos_lower = at;
        // negated equalities are handled by the trichotomy clause
        break;
    }

    if (info.target >= static_cast<int>(atoms_on_.size())) atoms_on_.resize(info.target + 1);
    atoms_on_[info.target].push_back(sat_var);
    infos_[sat_var] = std::move(info);
}

void TheoryLayer::register_pin(int sat_var, TVar target, const DeltaRational& value) {
    if (sat_var >= static_cast<int>(infos_.size())) infos_.resize(sat_var + 1);
    assert(infos_[sat_var].sat_var < 0);
    TheoryAtomInfo info;
    info.sat_var = sat_var;
    info.target = target;
    info.pos_upper = value;
    info.pos_lower = value;
    if (target >= static_cast<int>(atoms_on_.size())) atoms_on_.resize(target + 1);
    atoms_on_[target].push_back(sat_var);
    infos_[sat_var] = std::move(info);
}

bool TheoryLayer::has_integral_vars() const {
    for (TVar v = 0; v < simplex_.num_vars(); ++v)
        if (simplex_.is_integral(v)) return true;
    return false;
}

std::optional<Clause> TheoryLayer::conflict_clause(const Simplex::Conflict& c) const {
    assert(!c.internal());
    Clause out;
    out.origin = Origin::TLemma;
    for (Lit l : c.lits) out.lits.push_back(~l);
    std::sort(out.lits.begin(), out.lits.end());
    out.lits.erase(std::unique(out.lits.begin(), out.lits.end()), out.lits.end());
    return out;
}

void TheoryLayer::deduce_from_bound(SatSolver& solver, Lit trigger, TVar target,
                                    bool upper_changed) {
    // bound implications among atoms on the same tableau variable
    const DeltaRational& bound = upper_changed ? simplex_.upper(target) : simplex_.lower(target);
    for (int sv : atoms_on_[target]) {
        if (sv == trigger.var()) continue;
        if (solver.value(sv) != lbool::Undef) continue;
        const TheoryAtomInfo& info = infos_[sv];
        std::optional<Lit> implied;
        if (upper_changed) {
            if (info.pos_upper && !info.pos_lower && bound <= *info.pos_upper)
                implied = mk_lit(sv);
            else if (info.pos_lower && *info.pos_lower > bound)
                implied = mk_lit(sv, true);
        } else {
            if (info.pos_lower && !info.pos_upper && bound >= *info.pos_lower)
                implied = mk_lit(sv);
            else if (info.pos_upper && *info.pos_upper < bound)
                implied = mk_lit(sv, true);
        }
        if (!implied) continue;
        // the implied literal must carry theory meaning under its phase,
        // otherwise asserting it later is a no-op and the deduction clause
        // is still valid
        solver.theory_propagate(*implied, {~trigger, *implied});
    }
}

std::optional<Clause> TheoryLayer::check(SatSolver& solver, bool complete, const BnbLimits& limits,
                                         uint64_t& bnb_nodes) {
    // note: theory propagation grows the trail while we iterate
    for (; synced_ < solver.trail().size(); ++synced_) {
        Lit lit = solver.trail()[synced_];
        const TheoryAtomInfo* info = atom_info(lit.var());
        if (!info) continue;
        const auto& up = lit.sign() ? info->neg_upper : info->pos_upper;
        const auto& lo = lit.sign() ? info->neg_lower : info->pos_lower;
        if (!up && !lo) continue;
        assert_log_.push_back({synced_, simplex_.mark()});
        needs_check_ = true;
        if (up) {
            if (auto c = simplex_.assert_upper(info->target, *up, lit)) return conflict_clause(*c);
            deduce_from_bound(solver, lit, info->target, true);
        }
        if (lo) {
            if (auto c = simplex_.assert_lower(info->target, *lo, lit)) return conflict_clause(*c);
            deduce_from_bound(solver, lit, info->target, false);
        }
    }

    if (needs_check_) {
        if (auto c = simplex_.check()) return conflict_clause(*c);
        needs_check_ = false;
    }

    if (complete && std::getenv("OMT_DEBUG")) {
        std::fprintf(stderr, "[theory] complete check: trail=%zu synced=%zu log=%zu\n",
                     solver.trail().size(), synced_, assert_log_.size());
        for (size_t i = 0; i < solver.trail().size(); ++i) {
            Lit l = solver.trail()[i];
            const TheoryAtomInfo* info = atom_info(l.var());
            std::fprintf(stderr, "  [%zu] var=%d sign=%d lvl=%d %s target=%d\n", i, l.var(),
                         l.sign() ? 1 : 0, solver.level(l.var()),
                         info ? "atom" : "bool", info ? info->target : -1);
        }
    }
    if (complete) {
        if (has_integral_vars()) {
            BnbResult feas = bnb_find_integral(simplex_, limits);
            bnb_nodes += feas.nodes_explored;
            needs_check_ = true; // branch search can leave basic variables off their bounds
            switch (feas.status) {
            case BnbStatus::Optimal:
                stash_ = std::move(feas.model);
                stash_concrete_ = concretize(stash_);
                break;
            case BnbStatus::Infeasible: {
                // no short explanation: blame every asserted theory literal
                Clause out;
                out.origin = Origin::TLemma;
                for (const auto& [idx, mark] : assert_log_) {
                    (void)mark;
                    out.lits.push_back(~solver.trail()[idx]);
                }
                std::sort(out.lits.begin(), out.lits.end());
                out.lits.erase(std::unique(out.lits.begin(), out.lits.end()), out.lits.end());
                return out;
            }
            default:
                unknown_ = true;
                return std::nullopt;
            }
        } else {
            stash_.clear();
            for (TVar v = 0; v < simplex_.num_vars(); ++v) stash_.push_back(simplex_.value_of(v));
            stash_concrete_ = concretize(stash_);
        }
    }
    return std::nullopt;
}

void TheoryLayer::on_backjump(size_t trail_size) {
    while (!assert_log_.empty() && assert_log_.back().first >= trail_size) {
        simplex_.backtrack_to(assert_log_.back().second);
        assert_log_.pop_back();
    }
    synced_ = std::min(synced_, trail_size);
}

BnbResult TheoryLayer::minimize(TVar cost, BnbMode mode, const BnbLimits& limits) {
    needs_check_ = true; // minimization pivots the tableau
    // earlier branch searches may have left basic variables off their bounds;
    // minimize requires a feasible assignment
    auto repair = simplex_.check();
    assert(!repair && "minimize called on an inconsistent state");
    if (repair) return {};
    if (has_integral_vars()) return bnb_minimize(simplex_, cost, mode, limits, stash_);
    auto m = simplex_.minimize(cost);
    BnbResult res;
    if (m.unbounded) {
        res.status = BnbStatus::Unbounded;
        return res;
    }
    res.status = BnbStatus::Optimal;
    res.value = m.value;
    res.model.reserve(simplex_.num_vars());
    for (TVar v = 0; v < simplex_.num_vars(); ++v) res.model.push_back(simplex_.value_of(v));
    return res;
}

std::vector<Rational> TheoryLayer::concretize(const std::vector<DeltaRational>& model) const {
    // choose epsilon = delta small enough that all active bounds still hold
    Rational delta(1);
    auto refine = [&](const DeltaRational& low, const DeltaRational& high) {
        // need low.real + low.delta*d <= high.real + high.delta*d
        if (low.real < high.real && low.delta > high.delta) {
            Rational candidate = (high.real - low.real) / (low.delta - high.delta);
            if (candidate < delta) delta = candidate;
        }
    };
    for (TVar v = 0; v < simplex_.num_vars() && v < static_cast<int>(model.size()); ++v) {
        if (simplex_.has_lower(v)) refine(simplex_.lower(v), model[v]);
        if (simplex_.has_upper(v)) refine(model[v], simplex_.upper(v));
    }
    delta = delta / Rational(2);
    std::vector<Rational> out;
    out.reserve(model.size());
    for (const auto& m : model) out.push_back(m.real + m.delta * delta);
    return out;
}

} // namespace omt
