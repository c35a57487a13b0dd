#pragma once

#include "omt/interp.hpp"
#include "omt/oracle.hpp"

#include <random>
#include <string>

namespace omt {

struct FuzzConfig {
    uint64_t seed = 42;
    int count = 100;
    int max_arith_vars = 4;
    int max_atoms = 12;
    int coeff_range = 5;
    int max_bool_vars = 2;
    int max_objectives = 3;
    int int_box = 4;               // integer variables are boxed in [-box, box]
    double disjunctive_bias = 0.3; // portion of instances with Or structure
    double unbounded_bias = 0.1;   // portion aiming at unbounded objectives
    std::string keep_failing_dir;  // dump mismatching instances here
    bool with_basic = true;        // differential-test basic branch&bound
    bool lex = false;              // compare against the stage-wise oracle
};

struct FuzzSummary {
    int total = 0;
    int passed = 0;
    int failed = 0;
    int refused = 0; // oracle refused (instance dropped)
    std::vector<std::string> failures;
    // counter totals backing the boxed-vs-sequential comparison
    uint64_t boxed_assignments = 0;
    uint64_t sequential_assignments = 0;
};

Instance generate_instance(std::mt19937_64& rng, const FuzzConfig& cfg);

struct InstanceVerdict {
    bool pass = true;
    bool refused = false;
    bool multi_checked = false; // boxed-vs-sequential comparison ran
    bool lex_checked = false;   // lexicographic comparison ran
    std::string message;
    uint64_t boxed_assignments = 0;
    uint64_t sequential_assignments = 0;
};

/// Runs the instance through every mode combination, compares each optimum
/// with the oracle exactly, checks cross-mode agreement, boxed-vs-sequential
/// equality and the self-verification protocol.
InstanceVerdict check_instance(const Instance& inst, const FuzzConfig& cfg);

FuzzSummary fuzz_round(const FuzzConfig& cfg);

/// Random push/assert/minimize/pop scripts: every check-sat outcome must
/// equal a fresh flat solve, and re-solving an identical query must not cost
/// more conflicts.
FuzzSummary fuzz_incremental(const FuzzConfig& cfg);

} // namespace omt
