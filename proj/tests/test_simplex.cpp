#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omt/simplex.hpp"

#include <map>
#include <random>

using namespace omt;

namespace {

DeltaRational at(int r) { return DeltaRational(Rational(r)); }
DeltaRational just_below(int r) { return DeltaRational(Rational(r), Rational(-1)); }
DeltaRational just_above(int r) { return DeltaRational(Rational(r), Rational(1)); }

/// test-only Fourier-Motzkin feasibility oracle over delta-rationals:
/// constraints are (coeffs, bound) meaning sum coeffs*x <= bound
struct FmOracle {
    using Row = std::pair<std::map<int, Rational>, DeltaRational>;
    std::vector<Row> rows;

    void leq(std::map<int, Rational> coeffs, DeltaRational bound) {
        rows.push_back({std::move(coeffs), std::move(bound)});
    }

    bool feasible() const {
        std::vector<Row> cs = rows;
        while (true) {
            for (const auto& [c, b] : cs)
                if (c.empty() && b < DeltaRational()) return false;
            int victim = -1;
            for (const auto& [c, b] : cs)
                for (const auto& [v, k] : c)
                    if (victim < 0 || v < victim) victim = v;
            if (victim < 0) return true;
            std::vector<Row> lowers, uppers, rest;
            for (auto& r : cs) {
                auto it = r.first.find(victim);
                if (it == r.first.end()) rest.push_back(std::move(r));
                else if (it->second.is_positive()) uppers.push_back(std::move(r));
                else lowers.push_back(std::move(r));
            }
            for (const auto& lo : lowers) {
                Rational a = lo.first.at(victim);
                for (const auto& up : uppers) {
                    Rational b = up.first.at(victim);
                    Row combined;
                    for (const auto& [v, k] : lo.first)
                        if (v != victim) combined.first[v] += b * k;
                    for (const auto& [v, k] : up.first)
                        if (v != victim) combined.first[v] += (-a) * k;
                    for (auto it = combined.first.begin(); it != combined.first.end();)
                        it = it->second.is_zero() ? combined.first.erase(it) : std::next(it);
                    combined.second = b * lo.second + (-a) * up.second;
                    rest.push_back(std::move(combined));
                }
            }
            cs = std::move(rest);
        }
    }
};

} // namespace

TEST_CASE("crossing bounds conflict with both explanations") {
    Simplex s;
    TVar x = s.new_var(false);
    CHECK(!s.assert_upper(x, at(0), mk_lit(10)));
    auto confl = s.assert_lower(x, at(1), mk_lit(11));
    REQUIRE(confl);
    REQUIRE(confl->lits.size() == 2);
    CHECK(!confl->internal());
}

TEST_CASE("strict bounds become delta bounds") {
    Simplex s;
    TVar x = s.new_var(false);
    // not(x < 3) is x >= 3
    CHECK(!s.assert_lower(x, at(3), mk_lit(2)));
    CHECK(s.lower(x) == at(3));
    // x < 3 on a second variable
    TVar y = s.new_var(false);
    CHECK(!s.assert_upper(y, just_below(3), mk_lit(4)));
    CHECK(s.upper(y) == just_below(3));
}

TEST_CASE("feasibility over a shared slack row") {
    // 1<=x<=3, 1<=y<=3 is satisfiable
    Simplex s;
    TVar x = s.new_var(false);
    TVar y = s.new_var(false);
    CHECK(!s.assert_lower(x, at(1), mk_lit(0)));
    CHECK(!s.assert_upper(x, at(3), mk_lit(2)));
    CHECK(!s.assert_lower(y, at(1), mk_lit(4)));
    CHECK(!s.assert_upper(y, at(3), mk_lit(6)));
    CHECK(!s.check());

    // x+y<=0 & x>=1 & y>=0 is unsat with all three in the conflict
    Simplex t;
    TVar tx = t.new_var(false);
    TVar ty = t.new_var(false);
    TVar sxy = t.new_slack({{tx, Rational(1)}, {ty, Rational(1)}}, false);
    CHECK(!t.assert_upper(sxy, at(0), mk_lit(0)));
    CHECK(!t.assert_lower(tx, at(1), mk_lit(2)));
    CHECK(!t.assert_lower(ty, at(0), mk_lit(4)));
    auto confl = t.check();
    REQUIRE(confl);
    CHECK(confl->lits.size() == 3);
}

TEST_CASE("empty constraint set is satisfiable") {
    Simplex s;
    CHECK(!s.check());
}

TEST_CASE("minimize: bounded, unbounded and strict-infimum cases") {
    // cost2 = -x-y over 1<=x<=3, 1<=y<=3: minimum -6
    {
        Simplex s;
        TVar x = s.new_var(false);
        TVar y = s.new_var(false);
        TVar cost = s.new_slack({{x, Rational(-1)}, {y, Rational(-1)}}, false);
        s.assert_lower(x, at(1), mk_lit(0));
        s.assert_upper(x, at(3), mk_lit(2));
        s.assert_lower(y, at(1), mk_lit(4));
        s.assert_upper(y, at(3), mk_lit(6));
        REQUIRE(!s.check());
        auto m = s.minimize(cost);
        REQUIRE(!m.unbounded);
        CHECK(m.value == at(-6));
        CHECK(s.value_of(x) == at(3));
        CHECK(s.value_of(y) == at(3));
    }
    // x>=4, 1<=y<=3: -x-y unbounded below
    {
        Simplex s;
        TVar x = s.new_var(false);
        TVar y = s.new_var(false);
        TVar cost = s.new_slack({{x, Rational(-1)}, {y, Rational(-1)}}, false);
        s.assert_lower(x, at(4), mk_lit(0));
        s.assert_lower(y, at(1), mk_lit(2));
        s.assert_upper(y, at(3), mk_lit(4));
        REQUIRE(!s.check());
        auto m = s.minimize(cost);
        CHECK(m.unbounded);
    }
    // x>0: infimum 0+eps, not attained by a real point
    {
        Simplex s;
        TVar x = s.new_var(false);
        s.assert_lower(x, just_above(0), mk_lit(0));
        REQUIRE(!s.check());
        auto m = s.minimize(x);
        REQUIRE(!m.unbounded);
        CHECK(m.value == just_above(0));
    }
}

TEST_CASE("minimize leaves a witnessing assignment") {
    Simplex s;
    TVar x = s.new_var(false);
    TVar y = s.new_var(false);
    TVar c = s.new_slack({{x, Rational(2)}, {y, Rational(3)}}, false);
    s.assert_lower(x, at(-2), mk_lit(0));
    s.assert_lower(y, at(1), mk_lit(2));
    s.assert_upper(y, at(5), mk_lit(4));
    REQUIRE(!s.check());
    auto m = s.minimize(c);
    REQUIRE(!m.unbounded);
    CHECK(m.value == at(-1)); // 2*(-2) + 3*1
    CHECK(s.value_of(c) == m.value);
    CHECK(Rational(2) * s.value_of(x) + Rational(3) * s.value_of(y) == m.value);
}

TEST_CASE("mark/backtrack restores bounds exactly") {
    Simplex s;
    TVar x = s.new_var(false);
    size_t m0 = s.mark();
    CHECK(!s.assert_lower(x, at(5), mk_lit(0)));
    CHECK(s.has_lower(x));
    s.backtrack_to(m0);
    CHECK(!s.has_lower(x));

    // nested marks unwind in LIFO order
    s.assert_lower(x, at(1), mk_lit(0));
    size_t m1 = s.mark();
    s.assert_lower(x, at(2), mk_lit(2));
    size_t m2 = s.mark();
    s.assert_lower(x, at(3), mk_lit(4));
    s.backtrack_to(m2);
    CHECK(s.lower(x) == at(2));
    s.backtrack_to(m1);
    CHECK(s.lower(x) == at(1));
}

TEST_CASE("differential: backtracked solver equals a fresh one") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 120; ++round) {
        Simplex s;
        const int nv = 3;
        std::vector<TVar> vars;
        for (int i = 0; i < nv; ++i) vars.push_back(s.new_var(false));
        TVar sum = s.new_slack({{vars[0], Rational(1)}, {vars[1], Rational(1)}}, false);
        TVar diff = s.new_slack({{vars[1], Rational(1)}, {vars[2], Rational(-2)}}, false);
        std::vector<TVar> targets = {vars[0], vars[1], vars[2], sum, diff};

        struct BoundReq {
            TVar v;
            bool upper;
            DeltaRational val;
        };
        auto random_bound = [&]() -> BoundReq {
            TVar v = targets[rng() % targets.size()];
            bool upper = rng() % 2;
            int raw = static_cast<int>(rng() % 13) - 6;
            int strict = static_cast<int>(rng() % 3) - 1;
            return {v, upper, DeltaRational(Rational(raw), Rational(strict))};
        };

        std::vector<BoundReq> prefix, scoped;
        for (int i = 0; i < 3; ++i) prefix.push_back(random_bound());
        for (int i = 0; i < 4; ++i) scoped.push_back(random_bound());

        bool conflict_prefix = false;
        for (size_t i = 0; i < prefix.size() && !conflict_prefix; ++i) {
            auto& b = prefix[i];
            auto c = b.upper ? s.assert_upper(b.v, b.val, mk_lit(static_cast<int>(2 * i)))
                             : s.assert_lower(b.v, b.val, mk_lit(static_cast<int>(2 * i)));
            if (c) conflict_prefix = true;
        }
        if (conflict_prefix) continue;
        bool sat_prefix = !s.check();

        size_t mark = s.mark();
        for (size_t i = 0; i < scoped.size(); ++i) {
            auto& b = scoped[i];
            auto c = b.upper ? s.assert_upper(b.v, b.val, mk_lit(static_cast<int>(20 + 2 * i)))
                             : s.assert_lower(b.v, b.val, mk_lit(static_cast<int>(20 + 2 * i)));
            if (c) break;
        }
        s.check();
        s.backtrack_to(mark);
        bool sat_after = !s.check();

        // a fresh solver with only the prefix agrees
        Simplex f;
        std::vector<TVar> fv;
        for (int i = 0; i < nv; ++i) fv.push_back(f.new_var(false));
        TVar fsum = f.new_slack({{fv[0], Rational(1)}, {fv[1], Rational(1)}}, false);
        TVar fdiff = f.new_slack({{fv[1], Rational(1)}, {fv[2], Rational(-2)}}, false);
        std::map<TVar, TVar> remap = {{vars[0], fv[0]}, {vars[1], fv[1]}, {vars[2], fv[2]},
                                      {sum, fsum},      {diff, fdiff}};
        bool fresh_conflict = false;
        for (size_t i = 0; i < prefix.size() && !fresh_conflict; ++i) {
            auto& b = prefix[i];
            auto c = b.upper ? f.assert_upper(remap[b.v], b.val, mk_lit(static_cast<int>(2 * i)))
                             : f.assert_lower(remap[b.v], b.val, mk_lit(static_cast<int>(2 * i)));
            if (c) fresh_conflict = true;
        }
        REQUIRE(!fresh_conflict);
        bool sat_fresh = !f.check();
        REQUIRE(sat_prefix == sat_fresh);
        REQUIRE(sat_after == sat_fresh);
    }
}

TEST_CASE("conflict sets are infeasible per the FM oracle") {
    std::mt19937_64 rng(47);
    int conflicts_seen = 0;
    for (int round = 0; round < 200; ++round) {
        Simplex s;
        const int nv = 4;
        std::vector<TVar> vars;
        for (int i = 0; i < nv; ++i) vars.push_back(s.new_var(false));
        // two random slack rows
        std::vector<std::vector<std::pair<TVar, Rational>>> combos;
        std::vector<TVar> targets = vars;
        for (int r = 0; r < 2; ++r) {
            std::vector<std::pair<TVar, Rational>> combo;
            for (int i = 0; i < nv; ++i) {
                int c = static_cast<int>(rng() % 7) - 3;
                if (c != 0) combo.push_back({vars[i], Rational(c)});
            }
            if (combo.empty()) combo.push_back({vars[0], Rational(1)});
            combos.push_back(combo);
            targets.push_back(s.new_slack(combo, false));
        }

        // remember which constraint each literal asserts
        std::map<int, std::pair<std::map<int, Rational>, DeltaRational>> by_lit;
        auto term_of = [&](TVar v) {
            std::map<int, Rational> t;
            if (v < nv) t[v] = Rational(1);
            else
                for (auto& [w, c] : combos[v - nv]) t[w] = c;
            return t;
        };

        std::optional<Simplex::Conflict> confl;
        for (int i = 0; i < 8 && !confl; ++i) {
            TVar v = targets[rng() % targets.size()];
            bool upper = rng() % 2;
            DeltaRational val(Rational(static_cast<int>(rng() % 11) - 5),
                              Rational(static_cast<int>(rng() % 3) - 1));
            Lit lit = mk_lit(i);
            auto t = term_of(v);
            if (upper) {
                confl = s.assert_upper(v, val, lit);
                by_lit[i] = {t, val};
            } else {
                confl = s.assert_lower(v, val, lit);
                std::map<int, Rational> neg;
                for (auto& [w, c] : t) neg[w] = -c;
                by_lit[i] = {neg, -val};
            }
            if (!confl) confl = s.check();
        }
        if (!confl) continue;
        conflicts_seen++;
        FmOracle oracle;
        for (Lit l : confl->lits) oracle.leq(by_lit[l.var()].first, by_lit[l.var()].second);
        REQUIRE(!oracle.feasible());
    }
    CHECK(conflicts_seen > 20);
}

TEST_CASE("degenerate pivoting terminates") {
    Simplex s;
    TVar x = s.new_var(false);
    TVar y = s.new_var(false);
    TVar a = s.new_slack({{x, Rational(1)}, {y, Rational(1)}}, false);
    TVar b = s.new_slack({{x, Rational(1)}, {y, Rational(-1)}}, false);
    TVar c = s.new_slack({{x, Rational(-1)}, {y, Rational(1)}}, false);
    TVar d = s.new_slack({{x, Rational(-1)}, {y, Rational(-1)}}, false);
    for (TVar v : {a, b, c, d}) s.assert_upper(v, at(0), mk_lit(v));
    s.assert_lower(x, at(0), mk_lit(20));
    s.assert_lower(y, at(0), mk_lit(22));
    CHECK(!s.check());
    CHECK(s.value_of(x) == at(0));
    CHECK(s.value_of(y) == at(0));
    auto m = s.minimize(a);
    CHECK(!m.unbounded);
    CHECK(m.value == at(0));
}

TEST_CASE("integral variables tighten strict and fractional bounds") {
    Simplex s;
    TVar x = s.new_var(true);
    // x >= 1/2 tightens to x >= 1
    CHECK(!s.assert_lower(x, DeltaRational(Rational(1, 2)), mk_lit(0)));
    CHECK(s.lower(x) == at(1));
    // x < 3 tightens to x <= 2
    CHECK(!s.assert_upper(x, just_below(3), mk_lit(2)));
    CHECK(s.upper(x) == at(2));
}
