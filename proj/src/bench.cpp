#include "omt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace omt {

BenchOptions parse_config(const std::string& name) {
    BenchOptions out;
    std::vector<std::string> parts;
    std::stringstream ss(name);
    std::string item;
    while (std::getline(ss, item, '-')) parts.push_back(item);
    if (parts.size() != 3) throw std::runtime_error("bad config '" + name + "'");

    if (parts[0] == "lin") out.options.search = SearchMode::Linear;
    else if (parts[0] == "bin") out.options.search = SearchMode::Binary;
    else if (parts[0] == "ada") out.options.search = SearchMode::Adaptive;
    else throw std::runtime_error("bad search mode '" + parts[0] + "'");

    if (parts[1] == "basic") out.options.bnb = BnbMode::Basic;
    else if (parts[1] == "adv") out.options.bnb = BnbMode::Advanced;
    else if (parts[1] == "trn") out.options.bnb = BnbMode::Truncated;
    else throw std::runtime_error("bad bnb mode '" + parts[1] + "'");

    if (parts[2] == "single") {
        out.options.mode = ObjCombine::Single;
        out.fresh_per_objective = true;
    } else if (parts[2] == "inc") {
        out.options.mode = ObjCombine::Single;
    } else if (parts[2] == "boxed") {
        out.options.mode = ObjCombine::Boxed;
    } else if (parts[2] == "lex") {
        out.options.mode = ObjCombine::Lex;
    } else {
        throw std::runtime_error("bad combination mode '" + parts[2] + "'");
    }
    return out;
}

namespace {

const char* status_text(SolveStatus st) {
    switch (st) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    default: return "unknown";
    }
}

std::string objective_value_text(const ObjectiveResult& r) {
    switch (r.status) {
    case ObjStatus::Unbounded:
    case ObjStatus::Optimal:
    case ObjStatus::Unsatisfiable: return r.printed_value().smt();
    case ObjStatus::Unresolved: return "unresolved";
    default: return "unknown";
    }
}

struct InstanceRun {
    SolveStatus status = SolveStatus::Unknown;
    std::vector<ObjectiveResult> objectives;
    Statistics stats;
    bool timeout = false;
};

InstanceRun run_one(const Instance& inst, const BenchOptions& bo, int64_t timeout_ms) {
    InstanceRun run;
    Options opts = bo.options;
    opts.timeout_ms = timeout_ms;
    if (bo.fresh_per_objective && inst.objectives.size() > 1) {
        // cumulative single-objective runs, one fresh context each
        bool any_unknown = false, all_unsat = true, any = false;
        for (size_t i = 0; i < inst.objectives.size(); ++i) {
            Instance one = inst;
            one.objectives = {inst.objectives[i]};
            auto ctx = make_context(one, opts);
            Outcome oc = ctx->check();
            const auto& st = ctx->stats();
            run.stats.sat_assignments += st.sat_assignments;
            run.stats.minimize_calls += st.minimize_calls;
            run.stats.learned_cost_clauses += st.learned_cost_clauses;
            run.stats.pivots_decided += st.pivots_decided;
            run.stats.bnb_nodes += st.bnb_nodes;
            run.stats.restarts += st.restarts;
            run.stats.solve_calls += st.solve_calls;
            if (oc.status == SolveStatus::Unknown) any_unknown = true;
            if (oc.status != SolveStatus::Unsat) all_unsat = false;
            any = true;
            if (!oc.objectives.empty()) run.objectives.push_back(oc.objectives[0]);
        }
        run.status = any_unknown ? SolveStatus::Unknown
                                 : (any && all_unsat ? SolveStatus::Unsat : SolveStatus::Sat);
        run.timeout = any_unknown;
        return run;
    }
    auto ctx = make_context(inst, opts);
    Outcome oc = ctx->check();
    run.status = oc.status;
    run.objectives = std::move(oc.objectives);
    run.stats = ctx->stats();
    run.timeout = oc.status == SolveStatus::Unknown;
    return run;
}

} // namespace

int run_benchmark(const BenchConfig& cfg) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(cfg.dir))
        if (entry.is_regular_file() && entry.path().extension() == ".smt2")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::ofstream csv(cfg.csv_path);
    if (!csv) throw std::runtime_error("cannot open " + cfg.csv_path);
    csv << "; omt bench csv v1\n";
    csv << "instance,config,status,objective,value,attained,wall_ms,sat_assignments,"
           "minimize_calls,learned_cost_clauses,pivots_decided,bnb_nodes,restarts,solve_calls\n";

    for (const auto& file : files) {
        std::ifstream in(file);
        std::stringstream buf;
        buf << in.rdbuf();
        Instance inst;
        try {
            inst = instance_from_script(buf.str());
        } catch (const std::exception& e) {
            for (const auto& cname : cfg.configs)
                csv << file.filename().string() << "," << cname << ",error,,,,0,0,0,0,0,0,0,0\n";
            continue;
        }
        for (const auto& cname : cfg.configs) {
            BenchOptions bo = parse_config(cname);
            auto t0 = std::chrono::steady_clock::now();
            InstanceRun run = run_one(inst, bo, cfg.timeout_ms);
            auto t1 = std::chrono::steady_clock::now();
            int64_t wall =
                cfg.zero_wall
                    ? 0
                    : std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
            const char* status = run.timeout ? "timeout" : status_text(run.status);
            std::string prefix = file.filename().string() + "," + cname + "," + status;
            if (run.objectives.empty()) {
                csv << prefix << ",,,," << wall;
            } else {
                for (size_t i = 0; i < run.objectives.size(); ++i) {
                    const auto& r = run.objectives[i];
                    if (i) csv << "\n";
                    csv << prefix << "," << r.name << "," << objective_value_text(r) << ","
                        << (r.attained ? "true" : "false") << "," << wall;
                    for (const auto& [k, v] : run.stats.ordered()) {
                        (void)k;
                        csv << "," << v;
                    }
                }
                csv << "\n";
                continue;
            }
            for (const auto& [k, v] : run.stats.ordered()) {
                (void)k;
                csv << "," << v;
            }
            csv << "\n";
        }
    }
    return 0;
}

} // namespace omt
