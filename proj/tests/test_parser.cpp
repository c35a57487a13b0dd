#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omt/interp.hpp"
#include "omt/parser.hpp"

using namespace omt;

TEST_CASE("script command recognition") {
    Script s = parse_script("(declare-fun x () Real)(assert (<= 1 x))(minimize x)(check-sat)");
    REQUIRE(s.commands.size() == 4);
    CHECK(s.commands[0].kind == CmdKind::DeclareFun);
    CHECK(s.commands[1].kind == CmdKind::Assert);
    CHECK(s.commands[2].kind == CmdKind::Minimize);
    CHECK(s.commands[3].kind == CmdKind::CheckSat);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_script("(frobnicate)"), ParseError);
    CHECK_THROWS_AS(parse_script("(assert (< x 1)"), ParseError); // unbalanced
    try {
        parse_script("\n\n(bogus)");
    } catch (const ParseError& e) {
        CHECK(e.pos().line == 3);
    }
}

TEST_CASE("nonlinear and ill-sorted terms are rejected") {
    RunConfig cfg;
    {
        auto r = run_script_text("(declare-fun x () Real)(declare-fun y () Real)"
                                 "(assert (<= (* x y) 1))(check-sat)",
                                 cfg);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("nonlinear") != std::string::npos);
    }
    {
        auto r = run_script_text("(declare-fun b () Bool)(assert (<= b 1))(check-sat)", cfg);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("arithmetic") != std::string::npos);
    }
    {
        auto r = run_script_text("(assert (<= z 1))(check-sat)", cfg);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("unknown symbol") != std::string::npos);
    }
    {
        auto r = run_script_text("(declare-fun x () Real)(assert (<= x 1.2.3))(check-sat)", cfg);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("malformed number") != std::string::npos);
    }
}

TEST_CASE("basic optimization script output") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun x () Real)(assert (<= 1 x))(minimize x)"
                             "(check-sat)(get-objectives)(get-model)",
                             cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.output == "sat\n"
                      "(objectives\n"
                      "  (x 1 :attained true)\n"
                      ")\n"
                      "(model\n"
                      "  (define-fun x () Real 1)\n"
                      ")\n");
}

TEST_CASE("maximize prints the flipped value") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun y () Real)(assert (<= y 3))(maximize y)"
                             "(check-sat)(get-objectives)",
                             cfg);
    CHECK(r.output == "sat\n(objectives\n  (y 3 :attained true)\n)\n");
}

TEST_CASE("unsatisfiable script reports +oo") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun x () Real)(assert (< x 0))(assert (> x 0))"
                             "(minimize x)(check-sat)(get-objectives)",
                             cfg);
    CHECK(r.output == "unsat\n(objectives\n  (x +oo :attained false)\n)\n");
}

TEST_CASE("objective bounds via attributes") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun x () Real)(declare-fun y () Real)"
                             "(assert (>= x 2))(assert (>= y 3))"
                             "(minimize (+ x y) :lower 0 :upper 10)"
                             "(check-sat)(get-objectives)",
                             cfg);
    CHECK(r.output == "sat\n(objectives\n  ((+ x y) 5 :attained true)\n)\n");
}

TEST_CASE("fractions, decimals and negative numerals") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun x () Real)(assert (>= x (/ 1 2)))"
                             "(assert (>= x -0.25))(minimize x)(check-sat)(get-objectives)",
                             cfg);
    CHECK(r.output == "sat\n(objectives\n  (x (/ 1 2) :attained true)\n)\n");
}

TEST_CASE("push and pop scope objectives and assertions") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun x () Real)(assert (>= x 0))(minimize x)"
                             "(push 1)(assert (>= x 3))(check-sat)(get-objectives)"
                             "(pop 1)(check-sat)(get-objectives)",
                             cfg);
    CHECK(r.output == "sat\n(objectives\n  (x 3 :attained true)\n)\n"
                      "sat\n(objectives\n  (x 0 :attained true)\n)\n");
}

TEST_CASE("pop beyond depth is an error") {
    RunConfig cfg;
    auto r = run_script_text("(pop 1)", cfg);
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("pop exceeds push depth") != std::string::npos);
}

TEST_CASE("boxed mode via set-option") {
    RunConfig cfg;
    auto r = run_script_text("(set-option :mode boxed)"
                             "(declare-fun x () Real)(declare-fun y () Real)"
                             "(assert (and (<= 1 y) (<= y 3)))"
                             "(assert (or (and (<= 1 x) (<= x 3)) (>= x 4)))"
                             "(minimize (- 0 y))(minimize (- (- 0 x) y))"
                             "(check-sat)(get-objectives)",
                             cfg);
    CHECK(r.output == "sat\n"
                      "(objectives\n"
                      "  ((- 0 y) -3 :attained true)\n"
                      "  ((- (- 0 x) y) -oo :attained false)\n"
                      ")\n");
}

TEST_CASE("get-model on integers prints integer values") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun n () Int)(assert (>= (* 2 n) 3))(minimize n)"
                             "(check-sat)(get-model)",
                             cfg);
    CHECK(r.output == "sat\n(model\n  (define-fun n () Int 2)\n)\n");
}

TEST_CASE("stats lines appear under the configured prefix") {
    RunConfig cfg;
    cfg.options.stats = true;
    auto r = run_script_text("(declare-fun x () Real)(assert (>= x 1))(minimize x)(check-sat)", cfg);
    CHECK(r.output.find("sat\n; stats: sat_assignments=") != std::string::npos);
    CHECK(r.output.find("; stats: solve_calls=") != std::string::npos);
}

TEST_CASE("instance rendering round-trips") {
    std::string text = "(declare-fun x () Real)(declare-fun n () Int)(declare-fun b () Bool)"
                       "(assert (or b (<= (+ x (* 2 n)) 3)))(assert (=> b (< x 1)))"
                       "(minimize (+ x n) :lower -10)(maximize n :upper 5)"
                       "(check-sat)";
    Instance a = instance_from_script(text);
    std::string rendered = a.to_script();
    Instance b = instance_from_script(rendered);
    CHECK(b.to_script() == rendered);
    CHECK(a.vars == b.vars);
    CHECK(a.assertions.size() == b.assertions.size());
    CHECK(a.objectives.size() == b.objectives.size());
}

TEST_CASE("exit stops processing") {
    RunConfig cfg;
    auto r = run_script_text("(declare-fun x () Real)(exit)(assert (<= broken))", cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.output.empty());
}
