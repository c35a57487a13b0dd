#pragma once

#include "omt/interp.hpp"

#include <string>
#include <vector>

namespace omt {

struct BenchConfig {
    std::string dir;
    std::string csv_path;
    int64_t timeout_ms = 10000;
    std::vector<std::string> configs; // e.g. "lin-adv-single", "bin-trn-boxed"
    bool zero_wall = false;           // write wall_ms=0 for byte-identical runs
};

/// Parses "search-bnb-combine" into solver options; combine `single` solves
/// one fresh context per objective, `inc` reuses one context sequentially.
struct BenchOptions {
    Options options;
    bool fresh_per_objective = false;
};
BenchOptions parse_config(const std::string& name);

/// Runs every instance under every configuration and writes one CSV row per
/// instance x config x objective. Timeouts are recorded and the run
/// continues. Returns a process exit code.
int run_benchmark(const BenchConfig& cfg);

} // namespace omt
