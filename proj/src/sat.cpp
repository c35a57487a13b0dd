#include "omt/sat.hpp"

#include <algorithm>
#include <cassert>

namespace omt {

int SatSolver::new_var() {
    int v = num_vars();
    assigns_.push_back(lbool::Undef);
    levels_.push_back(0);
    reasons_.push_back(reason_none);
    activity_.push_back(0.0);
    polarity_.push_back(1); // default phase: negative
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    model_.push_back(lbool::Undef);
    heap_insert(v);
    return v;
}

void SatSolver::enqueue(Lit p, int32_t reason) {
    assert(value(p) == lbool::Undef);
    int v = p.var();
    assigns_[v] = p.sign() ? lbool::False : lbool::True;
    levels_[v] = decision_level();
    reasons_[v] = reason;
    trail_.push_back(p);
}

std::optional<uint32_t> SatSolver::propagate() {
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        counters_.propagations++;
        auto& ws = watches_[p.code]; // clauses watching ~p
        size_t i = 0, j = 0;
        while (i < ws.size()) {
            Watcher w = ws[i];
            InternalClause& c = clauses_[w.cref];
            if (c.removed) { i++; continue; }
            if (value(w.blocker) == lbool::True) { ws[j++] = ws[i++]; continue; }
            if (c.lits[0] == ~p) std::swap(c.lits[0], c.lits[1]);
            assert(c.lits[1] == ~p);
            i++;
            Lit first = c.lits[0];
            if (value(first) == lbool::True) {
                ws[j++] = {w.cref, first};
                continue;
            }
            bool found = false;
            for (size_t k = 2; k < c.lits.size(); ++k) {
                if (value(c.lits[k]) != lbool::False) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[(~c.lits[1]).code].push_back({w.cref, first});
                    found = true;
                    break;
                }
            }
            if (found) continue;
            ws[j++] = {w.cref, first};
            if (value(first) == lbool::False) {
                while (i < ws.size()) ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return w.cref;
            }
            enqueue(first, static_cast<int32_t>(w.cref));
        }
        ws.resize(j);
    }
    return std::nullopt;
}

void SatSolver::cancel_until(int level) {
    if (decision_level() <= level) return;
    size_t bound = static_cast<size_t>(trail_lim_[level]);
    for (size_t k = trail_.size(); k-- > bound;) {
        int v = trail_[k].var();
        assigns_[v] = lbool::Undef;
        polarity_[v] = trail_[k].sign() ? 1 : 0;
        reasons_[v] = reason_none;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(bound);
    trail_lim_.resize(level);
    qhead_ = bound;
    if (theory_) theory_->on_backjump(bound);
}

void SatSolver::bump(int var) {
    activity_[var] += var_inc_;
    if (activity_[var] > 1e100) rescale_activity();
    if (heap_pos_[var] >= 0) heap_percolate_up(heap_pos_[var]);
}

void SatSolver::rescale_activity() {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
}

void SatSolver::heap_insert(int var) {
    if (heap_pos_[var] >= 0) return;
    heap_pos_[var] = static_cast<int>(heap_.size());
    heap_.push_back(var);
    heap_percolate_up(heap_pos_[var]);
}

int SatSolver::heap_pop() {
    int top = heap_[0];
    heap_pos_[top] = -1;
    if (heap_.size() > 1) {
        heap_[0] = heap_.back();
        heap_pos_[heap_[0]] = 0;
        heap_.pop_back();
        heap_percolate_down(0);
    } else {
        heap_.pop_back();
    }
    return top;
}

void SatSolver::heap_percolate_up(int i) {
    int v = heap_[i];
    while (i > 0) {
        int parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = i;
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

void SatSolver::heap_percolate_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    while (2 * i + 1 < n) {
        int child = 2 * i + 1;
        if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) child++;
        if (!heap_less(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = i;
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

uint32_t SatSolver::store_clause(std::vector<Lit> lits, Origin origin) {
    uint32_t cref = static_cast<uint32_t>(clauses_.size());
    clauses_.push_back({std::move(lits), origin, false});
    if (origin != Origin::Input) num_learned_++;
    return cref;
}

void SatSolver::attach(uint32_t cref) {
    const auto& lits = clauses_[cref].lits;
    assert(lits.size() >= 2);
    watches_[(~lits[0]).code].push_back({cref, lits[1]});
    watches_[(~lits[1]).code].push_back({cref, lits[0]});
}

std::optional<uint32_t> SatSolver::integrate_clause(std::vector<Lit> lits, Origin origin,
                                                    std::optional<uint32_t>* stored) {
    if (stored) stored->reset();
    // dedupe and drop tautologies
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (size_t i = 0; i + 1 < lits.size(); ++i)
        if (lits[i].var() == lits[i + 1].var()) return std::nullopt;

    if (lits.empty()) {
        unsat_ = true;
        return std::nullopt;
    }

    // order: non-false literals first, then false ones by descending level
    std::stable_sort(lits.begin(), lits.end(), [&](Lit a, Lit b) {
        bool fa = value(a) == lbool::False;
        bool fb = value(b) == lbool::False;
        if (fa != fb) return !fa;
        if (fa && fb) return levels_[a.var()] > levels_[b.var()];
        return false;
    });

    size_t non_false = 0;
    while (non_false < lits.size() && value(lits[non_false]) != lbool::False) non_false++;

    if (lits.size() == 1) {
        // unit clauses are not watched: they must live at level 0
        Lit p = lits[0];
        uint32_t cref = store_clause(std::move(lits), origin);
        if (stored) *stored = cref;
        if (value(p) == lbool::True && levels_[p.var()] == 0) return std::nullopt;
        cancel_until(0);
        if (value(p) == lbool::False) {
            unsat_ = true;
            return std::nullopt;
        }
        if (value(p) == lbool::Undef) enqueue(p, static_cast<int32_t>(cref));
        return std::nullopt;
    }

    if (non_false >= 2) {
        uint32_t cref = store_clause(std::move(lits), origin);
        if (stored) *stored = cref;
        attach(cref);
        return std::nullopt;
    }

    if (non_false == 1) {
        // unit under the current trail
        Lit p = lits[0];
        int assertion_level = 0;
        for (size_t k = 1; k < lits.size(); ++k)
            assertion_level = std::max(assertion_level, levels_[lits[k].var()]);
        uint32_t cref = store_clause(std::move(lits), origin);
        if (stored) *stored = cref;
        attach(cref);
        if (value(p) == lbool::True) return std::nullopt; // already satisfied
        cancel_until(assertion_level);
        if (value(p) == lbool::Undef) enqueue(p, static_cast<int32_t>(cref));
        // p may have been unassigned by the backjump only if its level was
        // higher; if it is still False the clause is conflicting here
        else if (value(p) == lbool::False) return cref;
        return std::nullopt;
    }

    // all literals false: conflict once we are at the highest involved level
    int max_level = 0;
    for (Lit l : lits) max_level = std::max(max_level, levels_[l.var()]);
    uint32_t cref = store_clause(std::move(lits), origin);
    if (stored) *stored = cref;
    attach(cref);
    cancel_until(max_level);
    return cref;
}

std::optional<uint32_t> SatSolver::add_clause(std::vector<Lit> lits, Origin origin) {
    std::optional<uint32_t> stored;
    auto confl = integrate_clause(std::move(lits), origin, &stored);
    if (!confl) return stored;
    if (!in_solve_) {
        // outside solve: resolve the conflict to a consistent state
        if (!handle_conflict(*confl)) unsat_ = true;
        else {
            while (auto c = propagate()) {
                if (!handle_conflict(*c)) { unsat_ = true; break; }
            }
        }
        return stored;
    }
    pending_conflicts_.push_back(*confl);
    return stored;
}

bool SatSolver::remove_clause(uint32_t cref) {
    if (clauses_[cref].removed) return true;
    for (Lit l : trail_)
        if (reasons_[l.var()] == static_cast<int32_t>(cref)) return false;
    clauses_[cref].removed = true;
    if (clauses_[cref].origin != Origin::Input && num_learned_ > 0) num_learned_--;
    return true;
}

void SatSolver::analyze(uint32_t confl, std::vector<Lit>& out_learnt, int& out_btlevel) {
    int path_count = 0;
    Lit p;
    out_learnt.clear();
    out_learnt.push_back(p); // placeholder for the asserting literal
    size_t index = trail_.size();

    uint32_t cur = confl;
    do {
        InternalClause& c = clauses_[cur];
        for (Lit q : c.lits) {
            if (p.valid() && q == p) continue;
            int v = q.var();
            if (!seen_[v] && levels_[v] > 0) {
                seen_[v] = 1;
                bump(v);
                if (levels_[v] >= decision_level()) path_count++;
                else out_learnt.push_back(q);
            }
        }
        while (!seen_[trail_[--index].var()]) {}
        p = trail_[index];
        seen_[p.var()] = 0;
        path_count--;
        if (path_count > 0) {
            assert(reasons_[p.var()] != reason_none);
            cur = static_cast<uint32_t>(reasons_[p.var()]);
        }
    } while (path_count > 0);
    out_learnt[0] = ~p;

    out_btlevel = 0;
    if (out_learnt.size() > 1) {
        size_t max_i = 1;
        for (size_t i = 2; i < out_learnt.size(); ++i)
            if (levels_[out_learnt[i].var()] > levels_[out_learnt[max_i].var()]) max_i = i;
        std::swap(out_learnt[1], out_learnt[max_i]);
        out_btlevel = levels_[out_learnt[1].var()];
    }
    for (Lit l : out_learnt) seen_[l.var()] = 0;
}

void SatSolver::analyze_final(Lit failing_assumption) {
    core_.clear();
    core_.push_back(failing_assumption);
    if (decision_level() == 0) return;
    seen_[failing_assumption.var()] = 1;
    for (size_t i = trail_.size(); i-- > static_cast<size_t>(trail_lim_[0]);) {
        int v = trail_[i].var();
        if (!seen_[v]) continue;
        if (reasons_[v] == reason_none) {
            // decision at an assumption level: part of the core
            if (trail_[i] != failing_assumption) core_.push_back(trail_[i]);
        } else {
            for (Lit q : clauses_[reasons_[v]].lits)
                if (q.var() != v && levels_[q.var()] > 0) seen_[q.var()] = 1;
        }
        seen_[v] = 0;
    }
    seen_[failing_assumption.var()] = 0;
}

void SatSolver::analyze_final_conflict(uint32_t confl) {
    // conflict whose literals all sit at assumption levels
    core_.clear();
    for (Lit q : clauses_[confl].lits)
        if (levels_[q.var()] > 0) seen_[q.var()] = 1;
    for (size_t i = trail_.size(); i-- > static_cast<size_t>(trail_lim_.empty() ? trail_.size() : trail_lim_[0]);) {
        int v = trail_[i].var();
        if (!seen_[v]) continue;
        if (reasons_[v] == reason_none) {
            core_.push_back(trail_[i]);
        } else {
            for (Lit q : clauses_[reasons_[v]].lits)
                if (q.var() != v && levels_[q.var()] > 0) seen_[q.var()] = 1;
        }
        seen_[v] = 0;
    }
}

bool SatSolver::handle_conflict(uint32_t confl) {
    counters_.conflicts++;
    if (decision_level() == 0) {
        core_.clear();
        unsat_ = true;
        return false;
    }
    if (decision_level() <= static_cast<int>(assumptions_.size())) {
        // every decision on the trail is an assumption: extract the core
        analyze_final_conflict(confl);
        return false;
    }
    std::vector<Lit> learnt;
    int bt = 0;
    analyze(confl, learnt, bt);
    cancel_until(std::max(bt, 0));
    if (learnt.size() == 1) {
        Lit p = learnt[0];
        uint32_t cref = store_clause(std::move(learnt), Origin::TLemma);
        if (value(p) == lbool::Undef) enqueue(p, static_cast<int32_t>(cref));
        else if (value(p) == lbool::False) {
            core_.clear();
            unsat_ = decision_level() == 0;
            if (!unsat_) analyze_final(~p);
            return false;
        }
    } else {
        uint32_t cref = store_clause(std::move(learnt), Origin::TLemma);
        attach(cref);
        Lit p = clauses_[cref].lits[0];
        if (value(p) == lbool::Undef) enqueue(p, static_cast<int32_t>(cref));
    }
    decay();
    return true;
}

int64_t SatSolver::luby(int64_t i) {
    // sequence 1 1 2 1 1 2 4 ...
    int64_t k = 1;
    while ((1LL << k) - 1 < i + 1) k++;
    while ((1LL << k) - 1 != i + 1) {
        i -= (1LL << (k - 1)) - 1;
        k = 1;
        while ((1LL << k) - 1 < i + 1) k++;
    }
    return 1LL << (k - 1);
}

SolveStatus SatSolver::solve(std::vector<Lit> assumptions) {
    assumptions_ = std::move(assumptions);
    core_.clear();
    external_stop_ = false;
    if (unsat_) return SolveStatus::Unsat;
    cancel_until(0);
    in_solve_ = true;

    int64_t restart_index = 0;
    int64_t conflicts_left = luby(restart_index) * 64;
    uint64_t check_tick = 0;

    auto finish = [&](SolveStatus st) {
        in_solve_ = false;
        assumptions_.clear();
        pending_conflicts_.clear();
        cancel_until(0);
        return st;
    };

    if (stop_hook_ && stop_hook_()) return finish(SolveStatus::Unknown);

    while (true) {
        if (external_stop_) {
            external_stop_ = false;
            return finish(SolveStatus::Unknown);
        }
        if (stop_hook_ && (++check_tick & 63) == 0 && stop_hook_()) return finish(SolveStatus::Unknown);

        std::optional<uint32_t> confl = propagate();
        if (!confl && !pending_conflicts_.empty()) {
            confl = pending_conflicts_.back();
            pending_conflicts_.pop_back();
            // stale pending conflicts may have been repaired by backjumps
            bool falsified = true;
            for (Lit l : clauses_[*confl].lits)
                if (value(l) != lbool::False) { falsified = false; break; }
            if (!falsified) continue;
        }

        if (confl) {
            if (!handle_conflict(*confl)) return finish(SolveStatus::Unsat);
            if (--conflicts_left <= 0) {
                counters_.restarts++;
                restart_index++;
                conflicts_left = luby(restart_index) * 64;
                cancel_until(0);
            }
            continue;
        }

        // theory check at the propagation fixpoint
        bool total = trail_.size() == static_cast<size_t>(num_vars());
        if (theory_) {
            auto tconfl = theory_->check(*this, total);
            if (external_stop_) {
                external_stop_ = false;
                return finish(SolveStatus::Unknown);
            }
            if (tconfl) {
                Origin origin = tconfl->origin;
                auto cref = integrate_clause(std::move(tconfl->lits), origin);
                if (unsat_) return finish(SolveStatus::Unsat);
                if (cref) pending_conflicts_.push_back(*cref);
                continue;
            }
            if (qhead_ < trail_.size() || !pending_conflicts_.empty()) continue;
        }

        // place pending assumptions
        if (decision_level() < static_cast<int>(assumptions_.size())) {
            Lit p = assumptions_[decision_level()];
            if (value(p) == lbool::True) {
                trail_lim_.push_back(static_cast<int>(trail_.size())); // dummy level
            } else if (value(p) == lbool::False) {
                analyze_final(p);
                return finish(SolveStatus::Unsat);
            } else {
                trail_lim_.push_back(static_cast<int>(trail_.size()));
                enqueue(p, reason_none);
            }
            continue;
        }

        // decision: driver suggestions (pivots) take precedence, and may fire
        // even on a total assignment by introducing a fresh atom
        Lit next;
        if (theory_) {
            auto suggested = theory_->suggest_decision(*this);
            if (suggested && value(*suggested) == lbool::Undef) next = *suggested;
        }
        while (!next.valid() && !heap_.empty()) {
            int v = heap_[0];
            heap_pop();
            if (assigns_[v] == lbool::Undef) next = Lit(v, polarity_[v] != 0);
        }
        if (next.valid()) {
            counters_.decisions++;
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            enqueue(next, reason_none);
            continue;
        }

        // no decision left: the assignment is total and theory-consistent
        assert(trail_.size() == static_cast<size_t>(num_vars()));
        TheoryClient::ModelResult mr;
        if (theory_) mr = theory_->on_model(*this);
        switch (mr.action) {
        case TheoryClient::ModelAction::Accept:
        case TheoryClient::ModelAction::Stop:
            model_ = assigns_;
            return finish(SolveStatus::Sat);
        case TheoryClient::ModelAction::Continue:
            // progress clauses may also have been added directly
            for (auto& c : mr.clauses) {
                auto cref = integrate_clause(std::move(c.lits), c.origin);
                if (unsat_) return finish(SolveStatus::Unsat);
                if (cref) pending_conflicts_.push_back(*cref);
            }
            continue;
        }
    }
}

void SatSolver::theory_propagate(Lit p, std::vector<Lit> reason_clause) {
    assert(value(p) == lbool::Undef);
    uint32_t cref = store_clause(std::move(reason_clause), Origin::TLemma);
    auto& lits = clauses_[cref].lits;
    // put p first so the clause is a valid reason
    for (size_t i = 0; i < lits.size(); ++i)
        if (lits[i] == p) { std::swap(lits[0], lits[i]); break; }
    assert(lits[0] == p);
    if (lits.size() >= 2) attach(cref);
    enqueue(p, static_cast<int32_t>(cref));
}

void SatSolver::retire_guard(int var) {
    add_clause({Lit(var, true)}, Origin::Input);
    run_gc();
}

void SatSolver::run_gc() {
    // remove Augmented clauses that are satisfied at root level once they
    // exceed half of the learned database
    size_t inert = 0;
    std::vector<uint32_t> victims;
    for (uint32_t i = 0; i < clauses_.size(); ++i) {
        auto& c = clauses_[i];
        if (c.removed || c.origin != Origin::Augmented) continue;
        for (Lit l : c.lits) {
            if (value(l) == lbool::True && levels_[l.var()] == 0) {
                inert++;
                victims.push_back(i);
                break;
            }
        }
    }
    if (num_learned_ == 0 || inert * 2 <= num_learned_) return;
    counters_.gc_runs++;
    for (uint32_t i : victims) {
        clauses_[i].removed = true;
        num_learned_--;
    }
}

} // namespace omt
