#include "omt/bench.hpp"
#include "omt/fuzz.hpp"
#include "omt/interp.hpp"
#include "omt/oracle.hpp"
#include "omt/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void apply_search(omt::Options& o, const std::string& s) {
    if (s == "lin") o.search = omt::SearchMode::Linear;
    else if (s == "bin") o.search = omt::SearchMode::Binary;
    else if (s == "ada") o.search = omt::SearchMode::Adaptive;
}

void apply_bnb(omt::Options& o, const std::string& s) {
    if (s == "basic") o.bnb = omt::BnbMode::Basic;
    else if (s == "advanced") o.bnb = omt::BnbMode::Advanced;
    else if (s == "truncated") o.bnb = omt::BnbMode::Truncated;
}

void apply_mode(omt::Options& o, const std::string& s) {
    if (s == "single") o.mode = omt::ObjCombine::Single;
    else if (s == "boxed") o.mode = omt::ObjCombine::Boxed;
    else if (s == "lex") o.mode = omt::ObjCombine::Lex;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic optimization modulo linear arithmetic"};
    app.require_subcommand(1);

    // solve
    std::string solve_file, search = "lin", bnb = "advanced", mode = "single";
    int branch_limit = 250;
    bool do_verify = false, do_stats = false;
    uint64_t seed = 0;
    int64_t timeout_ms = -1;
    auto* solve = app.add_subcommand("solve", "solve a script file");
    solve->add_option("file", solve_file)->required();
    solve->add_option("--search", search)->check(CLI::IsMember({"lin", "bin", "ada"}));
    solve->add_option("--bnb", bnb)->check(CLI::IsMember({"basic", "advanced", "truncated"}));
    solve->add_option("--branch-limit", branch_limit);
    solve->add_option("--mode", mode)->check(CLI::IsMember({"single", "boxed", "lex"}));
    solve->add_flag("--verify", do_verify);
    solve->add_flag("--stats", do_stats);
    solve->add_option("--seed", seed);
    solve->add_option("--timeout-ms", timeout_ms);

    // verify
    std::string verify_file;
    auto* verify = app.add_subcommand("verify", "solve a flat script, then cross-check the optima");
    verify->add_option("file", verify_file)->required();
    verify->add_option("--search", search)->check(CLI::IsMember({"lin", "bin", "ada"}));
    verify->add_option("--bnb", bnb)->check(CLI::IsMember({"basic", "advanced", "truncated"}));
    verify->add_option("--branch-limit", branch_limit);
    verify->add_option("--mode", mode)->check(CLI::IsMember({"single", "boxed", "lex"}));
    verify->add_option("--timeout-ms", timeout_ms);

    // fuzz
    omt::FuzzConfig fuzz_cfg;
    bool fuzz_lex = false, fuzz_incremental_mode = false;
    auto* fuzz = app.add_subcommand("fuzz", "differential fuzzing against the brute-force oracle");
    fuzz->add_option("--seed", fuzz_cfg.seed);
    fuzz->add_option("--count", fuzz_cfg.count);
    fuzz->add_option("--keep-failing", fuzz_cfg.keep_failing_dir);
    fuzz->add_option("--max-objectives", fuzz_cfg.max_objectives);
    fuzz->add_flag("--lex", fuzz_lex);
    fuzz->add_flag("--incremental", fuzz_incremental_mode);

    // bench
    omt::BenchConfig bench_cfg;
    std::string configs = "lin-adv-single";
    auto* bench = app.add_subcommand("bench", "run a directory of scripts, write a CSV");
    bench->add_option("--dir", bench_cfg.dir)->required();
    bench->add_option("--csv", bench_cfg.csv_path)->required();
    bench->add_option("--timeout-ms", bench_cfg.timeout_ms);
    bench->add_option("--configs", configs);
    bench->add_flag("--zero-wall", bench_cfg.zero_wall);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            omt::RunConfig cfg;
            apply_search(cfg.options, search);
            apply_bnb(cfg.options, bnb);
            apply_mode(cfg.options, mode);
            cfg.options.branch_limit = branch_limit;
            cfg.options.stats = do_stats;
            cfg.options.seed = seed;
            cfg.options.timeout_ms = timeout_ms;
            std::string text = slurp(solve_file);
            omt::RunResult res = omt::run_script_text(text, cfg);
            std::cout << res.output;
            int code = res.exit_code;
            if (do_verify && code == 0) {
                try {
                    omt::Instance inst = omt::instance_from_script(text);
                    auto ctx = omt::make_context(inst, cfg.options);
                    omt::Outcome out = ctx->check();
                    omt::VerificationReport rep = omt::verify_outcome(inst, out, cfg.options);
                    std::cout << rep.render();
                    if (!rep.pass) code = 1;
                } catch (const omt::ParseError&) {
                    std::cout << "; verification: skipped (script is not flat)\n";
                }
            }
            return code;
        }
        if (*verify) {
            omt::Options opts;
            apply_search(opts, search);
            apply_bnb(opts, bnb);
            apply_mode(opts, mode);
            opts.branch_limit = branch_limit;
            opts.timeout_ms = timeout_ms;
            omt::Instance inst = omt::instance_from_script(slurp(verify_file));
            auto ctx = omt::make_context(inst, opts);
            omt::Outcome out = ctx->check();
            std::cout << (out.status == omt::SolveStatus::Sat
                              ? "sat"
                              : out.status == omt::SolveStatus::Unsat ? "unsat" : "unknown")
                      << "\n";
            std::cout << omt::objectives_block(out.objectives);
            omt::VerificationReport rep = omt::verify_outcome(inst, out, opts);
            std::cout << rep.render();
            return rep.pass ? 0 : 1;
        }
        if (*fuzz) {
            fuzz_cfg.lex = fuzz_lex;
            omt::FuzzSummary s = fuzz_incremental_mode ? omt::fuzz_incremental(fuzz_cfg)
                                                       : omt::fuzz_round(fuzz_cfg);
            std::cout << "total=" << s.total << " pass=" << s.passed << " fail=" << s.failed
                      << " refused=" << s.refused << "\n";
            for (const auto& f : s.failures) std::cout << "FAIL " << f << "\n";
            return s.failed == 0 ? 0 : 1;
        }
        if (*bench) {
            std::stringstream ss(configs);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) bench_cfg.configs.push_back(item);
            return omt::run_benchmark(bench_cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
