#pragma once

#include "omt/simplex.hpp"

#include <functional>
#include <vector>

namespace omt {

enum class BnbMode { Basic, Advanced, Truncated };

enum class BnbStatus { Optimal, Suboptimal, Infeasible, Unbounded, Unknown };

struct BnbResult {
    BnbStatus status = BnbStatus::Unknown;
    DeltaRational value;
    std::vector<DeltaRational> model; // full tableau assignment snapshot
    uint64_t nodes_explored = 0;
};

struct BnbLimits {
    int branch_limit = 250;        // truncated-mode branching budget
    uint64_t node_budget = 500000; // safety valve, all modes
    std::function<bool()> stop;
};

/// Searches for an assignment giving every integral variable an integral
/// value, starting from a feasible tableau. Branch cuts are floor/ceiling
/// bounds asserted through the incremental interface; conflict-set cut tags
/// drive backjumping inside the branch tree. The tableau's bound state is
/// restored before returning.
BnbResult bnb_find_integral(Simplex& s, const BnbLimits& limits);

/// LP-based branch&bound minimization of `cost` over the current bound set,
/// in three variants. Requires a feasible tableau and an LA-compliant witness
/// `start_model` from the preceding feasibility check. Unboundedness is
/// decided on the continuous relaxation.
BnbResult bnb_minimize(Simplex& s, TVar cost, BnbMode mode, const BnbLimits& limits,
                       const std::vector<DeltaRational>& start_model);

} // namespace omt
