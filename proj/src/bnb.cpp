#include "omt/bnb.hpp"

#include <algorithm>
#include <cassert>

namespace omt {

namespace {

// tag for the global (cost < ub) cut, distinct from branch-frame tags
constexpr int cost_cut_tag = 1 << 20;

std::vector<DeltaRational> snapshot(const Simplex& s) {
    std::vector<DeltaRational> m;
    m.reserve(s.num_vars());
    for (TVar v = 0; v < s.num_vars(); ++v) m.push_back(s.value_of(v));
    return m;
}

bool assignment_integral(const Simplex& s) {
    for (TVar v = 0; v < s.num_vars(); ++v)
        if (s.is_integral(v) && !s.value_of(v).is_integral()) return false;
    return true;
}

/// Most fractional integral variable, ties by lowest id; -1 if none.
TVar pick_branch_var(const Simplex& s) {
    TVar best = -1;
    Rational best_dist;
    for (TVar v = 0; v < s.num_vars(); ++v) {
        if (!s.is_integral(v)) continue;
        const DeltaRational& val = s.value_of(v);
        if (val.is_integral()) continue;
        Rational frac = val.real - val.real.floor();
        Rational dist = std::min(frac, Rational(1) - frac);
        if (best < 0 || dist > best_dist) {
            best = v;
            best_dist = dist;
        }
    }
    return best;
}

struct Frame {
    TVar var;
    Rational floor_val;
    int phase = 0; // 0: floor branch active, 1: ceiling branch active
    size_t mark = 0;
    std::vector<int> accumulated; // foreign tags from the failed branch
};

void merge_tags(std::vector<int>& into, const std::vector<int>& tags, int skip) {
    for (int t : tags) {
        if (t == skip) continue;
        if (std::find(into.begin(), into.end(), t) == into.end()) into.push_back(t);
    }
}

enum class SearchOutcome { Found, Infeasible, Budget };

/// DFS over floor/ceiling cuts with conflict-driven backjumping. When
/// `cost >= 0` every feasible node is first driven to its relaxation optimum
/// so branching happens on optimal fractional assignments. Stops at the
/// first integral assignment, leaving the tableau on it (cuts still
/// asserted; callers backtrack).
SearchOutcome branch_search(Simplex& s, TVar cost, const BnbLimits& limits, int branch_limit,
                            uint64_t& nodes) {
    std::vector<Frame> frames;
    uint64_t used = 0;

    auto budget_exceeded = [&]() {
        return used > limits.node_budget ||
               (branch_limit >= 0 && used >= static_cast<uint64_t>(branch_limit)) ||
               (limits.stop && limits.stop());
    };

    // asserts the branch cut of `f` for its current phase
    auto try_branch = [&](Frame& f, int tag) -> std::optional<Simplex::Conflict> {
        nodes++;
        used++;
        auto confl = f.phase == 0
                         ? s.assert_upper(f.var, DeltaRational(f.floor_val), Lit(), tag)
                         : s.assert_lower(f.var, DeltaRational(f.floor_val + Rational(1)), Lit(), tag);
        if (confl) return confl;
        return s.check();
    };

    while (true) {
        if (budget_exceeded()) return SearchOutcome::Budget;
        // state here is feasible; drive to the node optimum when minimizing
        if (cost >= 0) {
            auto m = s.minimize(cost);
            assert(!m.unbounded);
            (void)m;
        }
        TVar v = pick_branch_var(s);
        if (v < 0) return SearchOutcome::Found;

        frames.push_back({v, s.value_of(v).floor(), 0, s.mark(), {}});
        auto confl = try_branch(frames.back(), static_cast<int>(frames.size()) - 1);
        if (!confl) continue;

        // conflict handling: backjump to the deepest involved frame
        std::vector<int> tags = confl->cut_tags;
        while (true) {
            if (budget_exceeded()) return SearchOutcome::Budget;
            if (frames.empty()) return SearchOutcome::Infeasible;
            int own = static_cast<int>(frames.size()) - 1;
            Frame& f = frames.back();
            if (std::find(tags.begin(), tags.end(), own) == tags.end()) {
                // conflict independent of this cut: the sibling fails the same way
                s.backtrack_to(f.mark);
                frames.pop_back();
                continue;
            }
            merge_tags(f.accumulated, tags, own);
            if (f.phase == 0) {
                if (budget_exceeded()) return SearchOutcome::Budget;
                f.phase = 1;
                s.backtrack_to(f.mark);
                auto c2 = try_branch(f, own);
                if (!c2) break; // ceiling branch feasible: resume exploring
                tags = c2->cut_tags;
                continue;
            }
            // both branches failed: the parent is infeasible with the union
            tags = f.accumulated;
            s.backtrack_to(f.mark);
            frames.pop_back();
        }
    }
}

} // namespace

BnbResult bnb_find_integral(Simplex& s, const BnbLimits& limits) {
    BnbResult res;
    if (assignment_integral(s)) {
        res.status = BnbStatus::Optimal;
        res.model = snapshot(s);
        return res;
    }
    size_t base = s.mark();
    SearchOutcome out = branch_search(s, -1, limits, -1, res.nodes_explored);
    if (out == SearchOutcome::Found) {
        res.status = BnbStatus::Optimal;
        res.model = snapshot(s);
    } else {
        res.status = out == SearchOutcome::Infeasible ? BnbStatus::Infeasible : BnbStatus::Unknown;
    }
    s.backtrack_to(base);
    return res;
}

namespace {

/// Chronological DFS with relaxation-optimum pruning against the incumbent.
struct BasicSearch {
    Simplex& s;
    TVar cost;
    const BnbLimits& limits;
    DeltaRational ub;
    std::vector<DeltaRational> best;
    uint64_t nodes = 0;
    bool budget_hit = false;

    void node() {
        if (budget_hit) return;
        nodes++;
        if (nodes > limits.node_budget || (limits.stop && limits.stop())) {
            budget_hit = true;
            return;
        }
        if (s.check()) return; // infeasible
        auto m = s.minimize(cost);
        assert(!m.unbounded);
        if (m.value >= ub) return; // cannot contain a better solution
        if (assignment_integral(s)) {
            ub = m.value;
            best = snapshot(s);
            return;
        }
        TVar v = pick_branch_var(s);
        assert(v >= 0);
        Rational fl = s.value_of(v).floor();
        size_t mark = s.mark();
        if (!s.assert_upper(v, DeltaRational(fl), Lit(), 0)) node();
        s.backtrack_to(mark);
        if (!s.assert_lower(v, DeltaRational(fl + Rational(1)), Lit(), 0)) node();
        s.backtrack_to(mark);
    }
};

} // namespace

BnbResult bnb_minimize(Simplex& s, TVar cost, BnbMode mode, const BnbLimits& limits,
                       const std::vector<DeltaRational>& start_model) {
    BnbResult res;
    assert(static_cast<size_t>(cost) < start_model.size());

    // a feasible MILP problem is unbounded iff its continuous relaxation is
    auto rel = s.minimize(cost);
    if (rel.unbounded) {
        res.status = BnbStatus::Unbounded;
        return res;
    }
    if (assignment_integral(s)) {
        // the relaxation optimum is LA-compliant: globally optimal
        res.status = BnbStatus::Optimal;
        res.value = rel.value;
        res.model = snapshot(s);
        return res;
    }

    if (mode == BnbMode::Basic) {
        BasicSearch search{s, cost, limits, start_model[cost], start_model};
        size_t base = s.mark();
        search.node();
        s.backtrack_to(base);
        res.nodes_explored = search.nodes;
        if (search.budget_hit) {
            res.status = BnbStatus::Unknown;
            return res;
        }
        res.status = BnbStatus::Optimal;
        res.value = search.ub;
        res.model = std::move(search.best);
        return res;
    }

    // advanced / truncated: repeatedly push (cost < ub) and look for any
    // LA-compliant solution, restarting with a tighter cut on each find
    DeltaRational ub = start_model[cost];
    std::vector<DeltaRational> best = start_model;
    int branch_budget = mode == BnbMode::Truncated ? limits.branch_limit : -1;
    while (true) {
        size_t base = s.mark();
        DeltaRational cut(ub.real, ub.delta - Rational(1)); // cost < ub
        auto c0 = s.assert_upper(cost, cut, Lit(), cost_cut_tag);
        std::optional<Simplex::Conflict> c1;
        if (!c0) c1 = s.check();
        if (c0 || c1) {
            s.backtrack_to(base);
            res.status = BnbStatus::Optimal;
            res.value = ub;
            res.model = std::move(best);
            return res;
        }
        SearchOutcome out = branch_search(s, cost, limits, branch_budget, res.nodes_explored);
        if (out == SearchOutcome::Found) {
            DeltaRational v = s.value_of(cost);
            best = snapshot(s);
            s.backtrack_to(base);
            assert(v < ub);
            ub = v;
            if (mode == BnbMode::Truncated) {
                // sub-optimum: stop at the first solution found
                res.status = BnbStatus::Suboptimal;
                res.value = ub;
                res.model = std::move(best);
                return res;
            }
            continue;
        }
        s.backtrack_to(base);
        if (out == SearchOutcome::Infeasible) {
            res.status = BnbStatus::Optimal;
            res.value = ub;
            res.model = std::move(best);
            return res;
        }
        // budget exhausted: best-so-far as a sub-optimum in truncated mode
        if (mode == BnbMode::Truncated) {
            res.status = BnbStatus::Suboptimal;
            res.value = ub;
            res.model = std::move(best);
            return res;
        }
        res.status = BnbStatus::Unknown;
        return res;
    }
}

} // namespace omt
