#pragma once

#include "omt/clause.hpp"
#include "omt/delta.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace omt {

using TVar = int;

/// Incremental, backtrackable simplex over delta-rationals. Rows express
/// basic variables as linear combinations of nonbasic ones; every variable
/// carries optional lower/upper DeltaRational bounds with the literal that
/// introduced them. Strict bounds on integral variables are tightened to
/// integral non-strict bounds at assertion time.
class Simplex {
public:
    struct Conflict {
        std::vector<Lit> lits;     // explanation literals of the involved bounds
        std::vector<int> cut_tags; // internal bounds (branch cuts, pins) involved
        bool internal() const { return !cut_tags.empty(); }
    };

    struct MinimizeResult {
        bool unbounded = false;
        DeltaRational value;
    };

    TVar new_var(bool integral);

    /// Defines a new variable equal to the given combination of existing
    /// variables; the combination may mention basic variables.
    TVar new_slack(const std::vector<std::pair<TVar, Rational>>& combo, bool integral);

    int num_vars() const { return static_cast<int>(values_.size()); }
    bool is_integral(TVar x) const { return integral_[x]; }

    /// Tightens a bound. `reason` is the asserting literal; internal bounds
    /// (branch&bound cuts, stage pins) pass an invalid literal and a tag.
    std::optional<Conflict> assert_upper(TVar x, DeltaRational v, Lit reason, int cut_tag = -1);
    std::optional<Conflict> assert_lower(TVar x, DeltaRational v, Lit reason, int cut_tag = -1);

    /// Restores feasibility. On success every row equation holds under the
    /// assignment and all variables sit within their bounds.
    std::optional<Conflict> check();

    /// Minimizes the variable over the current bound set; requires a feasible
    /// state (a preceding successful check). Leaves the tableau at the
    /// optimum, so the assignment is a witnessing model.
    MinimizeResult minimize(TVar cost);

    size_t mark() const { return bound_trail_.size(); }
    void backtrack_to(size_t mark);

    const DeltaRational& value_of(TVar x) const { return values_[x]; }

    bool has_lower(TVar x) const { return lower_[x].active; }
    bool has_upper(TVar x) const { return upper_[x].active; }
    const DeltaRational& lower(TVar x) const { return lower_[x].value; }
    const DeltaRational& upper(TVar x) const { return upper_[x].value; }

    uint64_t pivots() const { return pivots_; }

private:
    struct Bound {
        DeltaRational value;
        Lit reason;
        int cut_tag = -1;
        bool active = false;
    };
    struct Row {
        TVar basic;
        std::vector<std::pair<TVar, Rational>> terms; // nonbasic vars, sorted by id
    };
    struct BoundRecord {
        TVar var;
        bool is_upper;
        Bound previous;
    };

    bool is_basic(TVar x) const { return row_of_[x] >= 0; }
    Rational row_coeff(const Row& r, TVar x) const;
    void set_row_coeff(Row& r, TVar x, Rational c);
    void update_nonbasic(TVar x, const DeltaRational& v);
    void pivot(int row_index, TVar entering);
    void pivot_and_update(TVar leaving, TVar entering, const DeltaRational& leaving_target);
    Conflict explain_row_lower(const Row& row) const; // basic below lower
    Conflict explain_row_upper(const Row& row) const; // basic above upper
    void add_bound_explanation(Conflict& c, const Bound& b) const;
    std::optional<Conflict> after_tighten(TVar x);

    std::vector<DeltaRational> values_;
    std::vector<Bound> lower_;
    std::vector<Bound> upper_;
    std::vector<char> integral_;
    std::vector<int> row_of_; // -1 when nonbasic
    std::vector<Row> rows_;
    std::vector<BoundRecord> bound_trail_;
    uint64_t pivots_ = 0;
};

} // namespace omt
