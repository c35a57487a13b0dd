#pragma once

#include "omt/interp.hpp"

#include <optional>

namespace omt {

/// Result of the brute-force optimum computation.
struct OracleResult {
    enum class Status { Optimal, Unbounded, Unsat, Refused };
    Status status = Status::Refused;
    DeltaRational value; // infimum; attained iff delta part is zero
    bool attained = false;
};

/// Equality substitution from an earlier lexicographic stage: the objective's
/// term is pinned to the stage value.
struct OraclePin {
    size_t objective;
    DeltaRational value;
};

/// Independent optimum: enumerates propositional assignments of the Boolean
/// abstraction, splits disequalities, derives integer boxes, and computes
/// per-branch infima by Fourier-Motzkin elimination over delta-rationals
/// (grid enumeration over the boxes for integer variables). Refuses
/// instances outside tractable size.
OracleResult oracle_optimum(const Instance& inst, size_t objective_index,
                            const std::vector<OraclePin>& pins = {});

/// Stage-wise lexicographic reference: optimum vector with equality
/// substitution after each stage. Empty when refused.
std::vector<OracleResult> oracle_lex(const Instance& inst);

} // namespace omt
