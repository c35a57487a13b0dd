#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omt/oracle.hpp"

#include <random>

using namespace omt;

namespace {

Instance from_script(const std::string& text) { return instance_from_script(text); }

} // namespace

TEST_CASE("paper toy minima") {
    Instance inst = from_script(
        "(declare-fun x () Real)(declare-fun y () Real)"
        "(assert (and (<= 1 y) (<= y 3)))"
        "(assert (or (and (<= 1 x) (<= x 3)) (>= x 4)))"
        "(minimize (- 0 y))(minimize (- (- 0 x) y))(check-sat)");
    OracleResult r1 = oracle_optimum(inst, 0);
    REQUIRE(r1.status == OracleResult::Status::Optimal);
    CHECK(r1.value == DeltaRational(Rational(-3)));
    CHECK(r1.attained);
    OracleResult r2 = oracle_optimum(inst, 1);
    CHECK(r2.status == OracleResult::Status::Unbounded);
}

TEST_CASE("strict bound infimum is not attained") {
    Instance inst = from_script("(declare-fun x () Real)(assert (> x 0))(minimize x)(check-sat)");
    OracleResult r = oracle_optimum(inst, 0);
    REQUIRE(r.status == OracleResult::Status::Optimal);
    CHECK(r.value == DeltaRational(Rational(0), Rational(1)));
    CHECK(!r.attained);
}

TEST_CASE("integer grid instance") {
    Instance inst = from_script(
        "(declare-fun x () Int)(declare-fun y () Int)"
        "(assert (>= x 0))(assert (<= x 5))(assert (>= y 0))(assert (<= y 5))"
        "(assert (>= (+ x y) (/ 5 2)))"
        "(minimize (+ (* 3 x) (* 2 y)))(check-sat)");
    OracleResult r = oracle_optimum(inst, 0);
    REQUIRE(r.status == OracleResult::Status::Optimal);
    CHECK(r.value == DeltaRational(Rational(6)));
    CHECK(r.attained);
}

TEST_CASE("unsat instance") {
    Instance inst = from_script(
        "(declare-fun x () Real)(assert (< x 0))(assert (> x 0))(minimize x)(check-sat)");
    CHECK(oracle_optimum(inst, 0).status == OracleResult::Status::Unsat);
}

TEST_CASE("maximization is sign-flipped internally") {
    Instance inst =
        from_script("(declare-fun y () Real)(assert (<= y 3))(maximize y)(check-sat)");
    OracleResult r = oracle_optimum(inst, 0);
    REQUIRE(r.status == OracleResult::Status::Optimal);
    // internal orientation: min -y = -3
    CHECK(r.value == DeltaRational(Rational(-3)));
}

TEST_CASE("disequalities split into both strict branches") {
    Instance inst = from_script(
        "(declare-fun x () Real)(declare-fun y () Real)"
        "(assert (not (= x y)))(assert (>= x 0))(assert (= y 0))(assert (<= x 1))"
        "(minimize x)(check-sat)");
    OracleResult r = oracle_optimum(inst, 0);
    REQUIRE(r.status == OracleResult::Status::Optimal);
    // x != 0 and x >= 0: infimum 0 approached but not attained
    CHECK(r.value == DeltaRational(Rational(0), Rational(1)));
    CHECK(!r.attained);
}

TEST_CASE("self-check: integer oracle equals relaxation when the corner is integral") {
    std::mt19937_64 rng(71);
    int compared = 0;
    for (int round = 0; round < 80; ++round) {
        int a = 1 + static_cast<int>(rng() % 3);
        int b = 1 + static_cast<int>(rng() % 3);
        int c = static_cast<int>(rng() % 5);
        std::string core = "(assert (>= x 0))(assert (<= x 6))(assert (>= y 0))(assert (<= y 6))"
                           "(assert (>= (+ (* " + std::to_string(a) + " x) (* " +
                           std::to_string(b) + " y)) " + std::to_string(c) + "))" +
                           "(minimize (+ x y))(check-sat)";
        Instance as_int = from_script("(declare-fun x () Int)(declare-fun y () Int)" + core);
        Instance as_real = from_script("(declare-fun x () Real)(declare-fun y () Real)" + core);
        OracleResult ri = oracle_optimum(as_int, 0);
        OracleResult rr = oracle_optimum(as_real, 0);
        REQUIRE(ri.status == OracleResult::Status::Optimal);
        REQUIRE(rr.status == OracleResult::Status::Optimal);
        if (rr.attained && rr.value.real.is_integer()) {
            // both oracle paths must coincide on integral relaxation corners
            CHECK(ri.value == rr.value);
            compared++;
        } else {
            CHECK(ri.value >= rr.value);
        }
    }
    CHECK(compared > 10);
}

TEST_CASE("lexicographic stage-wise oracle") {
    Instance inst = from_script(
        "(declare-fun x () Real)(declare-fun y () Real)"
        "(assert (>= (+ x y) 4))(assert (>= x 0))(assert (<= x 3))"
        "(assert (>= y 0))(assert (<= y 3))"
        "(minimize x)(minimize y)(check-sat)");
    auto stages = oracle_lex(inst);
    REQUIRE(stages.size() == 2);
    CHECK(stages[0].value == DeltaRational(Rational(1)));
    CHECK(stages[1].value == DeltaRational(Rational(3)));
}

TEST_CASE("lexicographic pins work with non-attained stage values") {
    Instance inst = from_script(
        "(declare-fun x () Real)(declare-fun y () Real)"
        "(assert (> x 0))(assert (>= y x))"
        "(minimize x)(minimize y)(check-sat)");
    auto stages = oracle_lex(inst);
    REQUIRE(stages.size() == 2);
    CHECK(stages[0].value == DeltaRational(Rational(0), Rational(1)));
    CHECK(!stages[0].attained);
    // with x pinned to 0+eps, min y = 0+eps as well
    CHECK(stages[1].value == DeltaRational(Rational(0), Rational(1)));
}

TEST_CASE("oracle refuses oversized instances") {
    std::string text = "(declare-fun x () Real)";
    std::string clause;
    for (int i = 0; i < 20; ++i)
        text += "(assert (or (<= x " + std::to_string(i) + ") (>= x " + std::to_string(i + 100) +
                ")))";
    text += "(minimize x)(check-sat)";
    Instance inst = from_script(text);
    CHECK(oracle_optimum(inst, 0).status == OracleResult::Status::Refused);
}

TEST_CASE("boolean variables enumerate through the abstraction") {
    Instance inst = from_script(
        "(declare-fun b () Bool)(declare-fun x () Real)"
        "(assert (=> b (>= x 5)))(assert (or b (>= x 2)))"
        "(minimize x)(check-sat)");
    OracleResult r = oracle_optimum(inst, 0);
    REQUIRE(r.status == OracleResult::Status::Optimal);
    CHECK(r.value == DeltaRational(Rational(2)));
}
