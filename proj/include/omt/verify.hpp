#pragma once

#include "omt/interp.hpp"

namespace omt {

struct ObjectiveCheck {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

struct VerificationReport {
    bool pass = true;
    std::vector<ObjectiveCheck> checks;

    std::string render() const;
};

/// Cross-checks a solved outcome on fresh decision-mode contexts: for each
/// finite optimum min, phi && (cost < min) must be unsat and, when attained,
/// phi && (cost = min) must be sat. Non-attained infima are verified by
/// sampling: phi && (cost <= min) unsat and phi && (cost < min + d) sat for
/// d in {1, 1/2, 1/4, 1/8}. Unbounded objectives are spot-checked with
/// escalating cost caps. Lexicographic outcomes apply earlier stages as
/// equality substitutions before checking each stage.
VerificationReport verify_outcome(const Instance& inst, const Outcome& outcome,
                                  const Options& opts);

} // namespace omt
