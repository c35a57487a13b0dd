#include "omt/simplex.hpp"

#include <algorithm>
#include <cassert>

namespace omt {

TVar Simplex::new_var(bool integral) {
    TVar x = num_vars();
    values_.emplace_back();
    lower_.emplace_back();
    upper_.emplace_back();
    integral_.push_back(integral ? 1 : 0);
    row_of_.push_back(-1);
    return x;
}

TVar Simplex::new_slack(const std::vector<std::pair<TVar, Rational>>& combo, bool integral) {
    TVar s = new_var(integral);
    // expand basic variables through their rows so the new row mentions only
    // nonbasic variables
    std::vector<std::pair<TVar, Rational>> terms;
    auto add_term = [&](TVar v, const Rational& c) {
        if (c.is_zero()) return;
        auto it = std::lower_bound(terms.begin(), terms.end(), v,
                                   [](const auto& p, TVar id) { return p.first < id; });
        if (it != terms.end() && it->first == v) {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        } else {
            terms.insert(it, {v, c});
        }
    };
    DeltaRational val;
    for (const auto& [v, c] : combo) {
        val += c * values_[v];
        if (is_basic(v)) {
            for (const auto& [w, cw] : rows_[row_of_[v]].terms) add_term(w, c * cw);
        } else {
            add_term(v, c);
        }
    }
    row_of_[s] = static_cast<int>(rows_.size());
    rows_.push_back({s, std::move(terms)});
    values_[s] = val;
    return s;
}

Rational Simplex::row_coeff(const Row& r, TVar x) const {
    for (const auto& [v, c] : r.terms)
        if (v == x) return c;
    return Rational(0);
}

void Simplex::set_row_coeff(Row& r, TVar x, Rational c) {
    auto it = std::lower_bound(r.terms.begin(), r.terms.end(), x,
                               [](const auto& p, TVar id) { return p.first < id; });
    bool present = it != r.terms.end() && it->first == x;
    if (c.is_zero()) {
        if (present) r.terms.erase(it);
    } else if (present) {
        it->second = std::move(c);
    } else {
        r.terms.insert(it, {x, std::move(c)});
    }
}

void Simplex::update_nonbasic(TVar x, const DeltaRational& v) {
    assert(!is_basic(x));
    DeltaRational delta = v - values_[x];
    if (delta == DeltaRational()) return;
    for (auto& row : rows_) {
        Rational c = row_coeff(row, x);
        if (!c.is_zero()) values_[row.basic] += c * delta;
    }
    values_[x] = v;
}

void Simplex::add_bound_explanation(Conflict& c, const Bound& b) const {
    assert(b.active);
    if (b.reason.valid()) c.lits.push_back(b.reason);
    if (b.cut_tag >= 0) c.cut_tags.push_back(b.cut_tag);
}

std::optional<Simplex::Conflict> Simplex::after_tighten(TVar x) {
    if (lower_[x].active && upper_[x].active && lower_[x].value > upper_[x].value) {
        Conflict c;
        add_bound_explanation(c, lower_[x]);
        add_bound_explanation(c, upper_[x]);
        return c;
    }
    return std::nullopt;
}

std::optional<Simplex::Conflict> Simplex::assert_upper(TVar x, DeltaRational v, Lit reason, int cut_tag) {
    if (integral_[x]) v = DeltaRational(v.floor());
    if (upper_[x].active && upper_[x].value <= v) return std::nullopt;
    bound_trail_.push_back({x, true, upper_[x]});
    upper_[x] = {std::move(v), reason, cut_tag, true};
    if (auto c = after_tighten(x)) return c;
    if (!is_basic(x) && values_[x] > upper_[x].value) update_nonbasic(x, upper_[x].value);
    return std::nullopt;
}

std::optional<Simplex::Conflict> Simplex::assert_lower(TVar x, DeltaRational v, Lit reason, int cut_tag) {
    if (integral_[x]) v = DeltaRational(v.ceil());
    if (lower_[x].active && lower_[x].value >= v) return std::nullopt;
    bound_trail_.push_back({x, false, lower_[x]});
    lower_[x] = {std::move(v), reason, cut_tag, true};
    if (auto c = after_tighten(x)) return c;
    if (!is_basic(x) && values_[x] < lower_[x].value) update_nonbasic(x, lower_[x].value);
    return std::nullopt;
}

void Simplex::backtrack_to(size_t mark) {
    while (bound_trail_.size() > mark) {
        BoundRecord& rec = bound_trail_.back();
        (rec.is_upper ? upper_ : lower_)[rec.var] = rec.previous;
        bound_trail_.pop_back();
    }
}

Simplex::Conflict Simplex::explain_row_lower(const Row& row) const {
    // basic variable below its lower bound and no nonbasic slack to raise it
    Conflict c;
    add_bound_explanation(c, lower_[row.basic]);
    for (const auto& [v, coeff] : row.terms)
        add_bound_explanation(c, coeff.is_positive() ? upper_[v] : lower_[v]);
    return c;
}

Simplex::Conflict Simplex::explain_row_upper(const Row& row) const {
    Conflict c;
    add_bound_explanation(c, upper_[row.basic]);
    for (const auto& [v, coeff] : row.terms)
        add_bound_explanation(c, coeff.is_positive() ? lower_[v] : upper_[v]);
    return c;
}

void Simplex::pivot(int row_index, TVar entering) {
    Row& row = rows_[row_index];
    TVar leaving = row.basic;
    Rational a = row_coeff(row, entering);
    assert(!a.is_zero());

    // rewrite: leaving = ... + a*entering + ...  =>  entering = ...
    std::vector<std::pair<TVar, Rational>> new_terms;
    Rational inv_a = a.inverse();
    new_terms.push_back({leaving, inv_a});
    for (const auto& [v, c] : row.terms)
        if (v != entering) new_terms.push_back({v, -(c * inv_a)});
    std::sort(new_terms.begin(), new_terms.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });
    row.basic = entering;
    row.terms = std::move(new_terms);
    row_of_[leaving] = -1;
    row_of_[entering] = row_index;

    // substitute the new definition of `entering` into the other rows
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
        if (i == row_index) continue;
        Row& other = rows_[i];
        Rational c = row_coeff(other, entering);
        if (c.is_zero()) continue;
        set_row_coeff(other, entering, Rational(0));
        for (const auto& [v, cv] : rows_[row_index].terms) {
            Rational add = c * cv;
            Rational cur = row_coeff(other, v);
            set_row_coeff(other, v, cur + add);
        }
    }
    pivots_++;
}

void Simplex::pivot_and_update(TVar leaving, TVar entering, const DeltaRational& leaving_target) {
    int ri = row_of_[leaving];
    const Row& row = rows_[ri];
    Rational a = row_coeff(row, entering);
    DeltaRational theta = Rational(1) / a * (leaving_target - values_[leaving]);
    values_[leaving] = leaving_target;
    values_[entering] += theta;
    for (const auto& r : rows_) {
        if (r.basic == leaving) continue;
        Rational c = row_coeff(r, entering);
        if (!c.is_zero()) values_[r.basic] += c * theta;
    }
    pivot(ri, entering);
}

std::optional<Simplex::Conflict> Simplex::check() {
    const uint64_t bland_threshold = 3ull * static_cast<uint64_t>(num_vars());
    uint64_t steps = 0;
    while (true) {
        // select a violated basic variable
        int chosen_row = -1;
        bool below = false;
        DeltaRational best_violation;
        bool bland = steps > bland_threshold;
        for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
            TVar b = rows_[i].basic;
            DeltaRational violation;
            bool is_below;
            if (lower_[b].active && values_[b] < lower_[b].value) {
                violation = lower_[b].value - values_[b];
                is_below = true;
            } else if (upper_[b].active && values_[b] > upper_[b].value) {
                violation = values_[b] - upper_[b].value;
                is_below = false;
            } else {
                continue;
            }
            if (chosen_row < 0 || (!bland && violation > best_violation) ||
                (bland && b < rows_[chosen_row].basic)) {
                chosen_row = i;
                below = is_below;
                best_violation = violation;
            }
        }
        if (chosen_row < 0) return std::nullopt;

        const Row& row = rows_[chosen_row];
        TVar b = row.basic;
        // entering variable with slack in the needed direction
        TVar entering = -1;
        Rational entering_coeff;
        for (const auto& [v, c] : row.terms) {
            bool usable;
            if (below) // need to increase the basic variable
                usable = (c.is_positive() && (!upper_[v].active || values_[v] < upper_[v].value)) ||
                         (c.is_negative() && (!lower_[v].active || values_[v] > lower_[v].value));
            else
                usable = (c.is_positive() && (!lower_[v].active || values_[v] > lower_[v].value)) ||
                         (c.is_negative() && (!upper_[v].active || values_[v] < upper_[v].value));
            if (!usable) continue;
            if (entering < 0) {
                entering = v;
                entering_coeff = c;
                if (bland) break; // terms sorted by id: first usable is Bland's choice
            } else if (!bland && c.abs() > entering_coeff.abs()) {
                entering = v;
                entering_coeff = c;
            }
        }
        if (entering < 0) return below ? explain_row_lower(row) : explain_row_upper(row);
        pivot_and_update(b, entering, below ? lower_[b].value : upper_[b].value);
        steps++;
    }
}

Simplex::MinimizeResult Simplex::minimize(TVar cost) {
    const uint64_t bland_threshold = 3ull * static_cast<uint64_t>(num_vars());
    uint64_t steps = 0;
    while (true) {
        bool bland = steps > bland_threshold;
        if (!is_basic(cost)) {
            // decrease the cost column directly
            if (lower_[cost].active && values_[cost] == lower_[cost].value)
                return {false, values_[cost]};
            bool limited = false;
            DeltaRational step_limit; // maximum decrease
            int blocking_row = -1;    // -1 = own lower bound blocks
            TVar blocking_var = -1;
            if (lower_[cost].active) {
                limited = true;
                step_limit = values_[cost] - lower_[cost].value;
                blocking_var = cost;
            }
            for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
                const Row& r = rows_[i];
                Rational c = row_coeff(r, cost);
                if (c.is_zero()) continue;
                TVar b = r.basic;
                // cost decreases by d: value(b) changes by -c*d
                std::optional<DeltaRational> row_limit;
                if (c.is_positive() && lower_[b].active)
                    row_limit = Rational(1) / c * (values_[b] - lower_[b].value);
                else if (c.is_negative() && upper_[b].active)
                    row_limit = Rational(1) / -c * (upper_[b].value - values_[b]);
                if (!row_limit) continue;
                if (!limited || *row_limit < step_limit ||
                    (*row_limit == step_limit && b < blocking_var)) {
                    limited = true;
                    step_limit = *row_limit;
                    blocking_row = i;
                    blocking_var = b;
                }
            }
            if (!limited) return {true, {}};
            if (blocking_row < 0) {
                // own lower bound is the strictest limit: optimum reached
                update_nonbasic(cost, lower_[cost].value);
                return {false, values_[cost]};
            }
            TVar b = rows_[blocking_row].basic;
            Rational c = row_coeff(rows_[blocking_row], cost);
            DeltaRational target = c.is_positive() ? lower_[b].value : upper_[b].value;
            pivot_and_update(b, cost, target);
            steps++;
            continue;
        }

        const Row& row = rows_[row_of_[cost]];
        // entering candidate that can reduce the cost
        TVar entering = -1;
        Rational ec;
        bool decrease_entering = false;
        for (const auto& [v, c] : row.terms) {
            bool can_dec = !lower_[v].active || values_[v] > lower_[v].value;
            bool can_inc = !upper_[v].active || values_[v] < upper_[v].value;
            bool usable = (c.is_positive() && can_dec) || (c.is_negative() && can_inc);
            if (!usable) continue;
            if (entering < 0) {
                entering = v;
                ec = c;
                decrease_entering = c.is_positive();
                if (bland) break;
            } else if (!bland && c.abs() > ec.abs()) {
                entering = v;
                ec = c;
                decrease_entering = c.is_positive();
            }
        }
        if (entering < 0) return {false, values_[cost]};

        // ratio test over the entering direction
        bool limited = false;
        DeltaRational move_limit; // maximum |change| of entering variable
        int blocking_row = -1;    // -1 = entering variable's own bound
        TVar blocking_var = -1;
        if (decrease_entering && lower_[entering].active) {
            limited = true;
            move_limit = values_[entering] - lower_[entering].value;
            blocking_var = entering;
        } else if (!decrease_entering && upper_[entering].active) {
            limited = true;
            move_limit = upper_[entering].value - values_[entering];
            blocking_var = entering;
        }
        for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
            const Row& r = rows_[i];
            Rational c = row_coeff(r, entering);
            if (c.is_zero()) continue;
            TVar b = r.basic;
            // entering moves by s (signed): value(b) changes by c*s
            bool basic_increases = decrease_entering ? c.is_negative() : c.is_positive();
            std::optional<DeltaRational> row_limit;
            if (basic_increases && upper_[b].active)
                row_limit = Rational(1) / c.abs() * (upper_[b].value - values_[b]);
            else if (!basic_increases && lower_[b].active)
                row_limit = Rational(1) / c.abs() * (values_[b] - lower_[b].value);
            if (!row_limit) continue;
            if (!limited || *row_limit < move_limit ||
                (*row_limit == move_limit && b < blocking_var)) {
                limited = true;
                move_limit = *row_limit;
                blocking_row = i;
                blocking_var = b;
            }
        }
        if (!limited) return {true, {}};
        if (blocking_row < 0) {
            // entering slides to its own bound; cost stays basic
            DeltaRational target = decrease_entering
                                       ? lower_[entering].value
                                       : upper_[entering].value;
            update_nonbasic(entering, target);
        } else {
            TVar b = rows_[blocking_row].basic;
            Rational c = row_coeff(rows_[blocking_row], entering);
            bool basic_increases = decrease_entering ? c.is_negative() : c.is_positive();
            DeltaRational target = basic_increases ? upper_[b].value : lower_[b].value;
            pivot_and_update(b, entering, target);
        }
        steps++;
    }
}

} // namespace omt
