#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omt/delta.hpp"
#include "omt/rational.hpp"

#include <random>

using namespace omt;

namespace {

Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-40, 40);
    std::uniform_int_distribution<int> den(1, 12);
    return Rational(num(rng), den(rng));
}

} // namespace

TEST_CASE("basic arithmetic is exact and canonical") {
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(-2, 3) * Rational(3, 4) == Rational(-1, 2));
    CHECK((Rational(-2, 3) * Rational(3, 4)).numerator() == -1);
    CHECK((Rational(-2, 3) * Rational(3, 4)).denominator() == 2);
    CHECK(Rational(7, 3).floor() == Rational(2));
    CHECK(Rational(7, 3).ceil() == Rational(3));
    CHECK(Rational(-7, 3).floor() == Rational(-3));
    CHECK(Rational(-7, 3).ceil() == Rational(-2));
    CHECK(Rational(6, 3) == Rational(2));
    CHECK(Rational(4, -2) == Rational(-2));
    CHECK(Rational(4, -2).denominator() == 1);
}

TEST_CASE("field properties on random fractions") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        Rational a = random_rational(rng);
        Rational b = random_rational(rng);
        Rational c = random_rational(rng);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + (-a) == Rational(0));
        CHECK(a + b == b + a);
        CHECK(a * (b + c) == a * b + a * c);
        // total order
        int lt = (a < b) + (b < a) + (a == b);
        CHECK(lt == 1);
        if (a < b && b < c) CHECK(a < c);
    }
}

TEST_CASE("parse/print round trip") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        Rational r = random_rational(rng);
        auto back = Rational::parse(r.str());
        REQUIRE(back.has_value());
        CHECK(*back == r);
    }
    CHECK(*Rational::parse("2.5") == Rational(5, 2));
    CHECK(*Rational::parse("-0.125") == Rational(-1, 8));
    CHECK(*Rational::parse("-7") == Rational(-7));
    CHECK(!Rational::parse("1.2.3").has_value());
    CHECK(!Rational::parse("x").has_value());
    CHECK(!Rational::parse("1/0").has_value());
}

TEST_CASE("rendering") {
    CHECK(Rational(5).smt() == "5");
    CHECK(Rational(-5).smt() == "-5");
    CHECK(Rational(3, 2).smt() == "(/ 3 2)");
    CHECK(Rational(-3, 2).smt() == "(/ -3 2)");
}

TEST_CASE("delta rational ordering and scaling") {
    DeltaRational zero;
    DeltaRational eps(Rational(0), Rational(1));
    CHECK(eps > zero);
    CHECK(DeltaRational(Rational(1), Rational(-1)) < DeltaRational(Rational(1)));
    CHECK(Rational(-2) * DeltaRational(Rational(1), Rational(1)) ==
          DeltaRational(Rational(-2), Rational(-2)));
    CHECK(DeltaRational(Rational(1), Rational(-1)) + DeltaRational(Rational(1), Rational(1)) ==
          DeltaRational(Rational(2)));
    // lexicographic: real part dominates
    CHECK(DeltaRational(Rational(1), Rational(100)) < DeltaRational(Rational(2), Rational(-100)));
}

TEST_CASE("delta floor/ceil") {
    CHECK(DeltaRational(Rational(3)).floor() == Rational(3));
    CHECK(DeltaRational(Rational(3), Rational(-1)).floor() == Rational(2));
    CHECK(DeltaRational(Rational(3), Rational(1)).floor() == Rational(3));
    CHECK(DeltaRational(Rational(5, 2)).floor() == Rational(2));
    CHECK(DeltaRational(Rational(5, 2), Rational(-1)).floor() == Rational(2));
    CHECK(DeltaRational(Rational(3)).ceil() == Rational(3));
    CHECK(DeltaRational(Rational(3), Rational(1)).ceil() == Rational(4));
    CHECK(DeltaRational(Rational(5, 2)).ceil() == Rational(3));
}

TEST_CASE("extended values") {
    ExtendedValue ninf = ExtendedValue::neg_inf();
    ExtendedValue pinf = ExtendedValue::pos_inf();
    ExtendedValue fin{DeltaRational(Rational(7))};
    CHECK(ninf < fin);
    CHECK(fin < pinf);
    CHECK(ninf < pinf);
    CHECK(ninf.smt() == "-oo");
    CHECK(pinf.smt() == "+oo");
    CHECK(fin.smt() == "7");
    CHECK(ExtendedValue(DeltaRational(Rational(0), Rational(1))).smt() == "(+ 0 (* 1 epsilon))");
}
