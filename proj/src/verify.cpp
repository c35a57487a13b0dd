#include "omt/verify.hpp"

#include <cassert>
#include <sstream>

namespace omt {

namespace {

/// Fresh decision context over the instance assertions plus stage pins.
std::unique_ptr<Context> decision_context(const Instance& inst, const Options& base,
                                          const std::vector<std::pair<size_t, DeltaRational>>& pins) {
    Options opts = base;
    opts.mode = ObjCombine::Single;
    auto ctx = make_context(inst, opts, /*with_objectives=*/false);
    for (const auto& [oi, value] : pins) {
        const ObjectiveSpec& o = inst.objectives[oi];
        LinearTerm internal = o.maximize ? -o.term : o.term;
        // pinning is only expressible for attained stage values
        assert(value.delta.is_zero());
        LinearTerm t = internal;
        t.add_constant(-value.real);
        assert_on(*ctx, t, InputRel::EQ);
    }
    return ctx;
}

SolveStatus probe(const Instance& inst, const Options& base,
                  const std::vector<std::pair<size_t, DeltaRational>>& pins, size_t obj_index,
                  const DeltaRational& edge, bool strict, bool equality) {
    auto ctx = decision_context(inst, base, pins);
    const ObjectiveSpec& o = inst.objectives[obj_index];
    LinearTerm internal = o.maximize ? -o.term : o.term;
    LinearTerm t = internal;
    t.add_constant(-edge.real);
    if (equality) assert_on(*ctx, std::move(t), InputRel::EQ);
    else assert_on(*ctx, std::move(t), strict ? InputRel::LT : InputRel::LE);
    return ctx->check_decision().status;
}

} // namespace

std::string VerificationReport::render() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << "; verified " << c.name << ": "
            << (c.skipped ? "skipped" : (c.pass ? "pass" : "FAIL"));
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << "\n";
    }
    out << "; verification: " << (pass ? "pass" : "FAIL") << "\n";
    return out.str();
}

VerificationReport verify_outcome(const Instance& inst, const Outcome& outcome,
                                  const Options& opts) {
    VerificationReport report;
    std::vector<std::pair<size_t, DeltaRational>> pins;
    bool lex = opts.mode == ObjCombine::Lex;

    for (size_t i = 0; i < outcome.objectives.size() && i < inst.objectives.size(); ++i) {
        const ObjectiveResult& r = outcome.objectives[i];
        ObjectiveCheck check;
        check.name = r.name;

        switch (r.status) {
        case ObjStatus::Unsatisfiable: {
            SolveStatus st = decision_context(inst, opts, pins)->check_decision().status;
            check.pass = st == SolveStatus::Unsat;
            if (!check.pass) check.detail = "expected unsat";
            break;
        }
        case ObjStatus::Unbounded: {
            // escalating cost caps must all stay satisfiable
            check.pass = true;
            for (long long cap : {-1000LL, -1000000LL, -1000000000LL}) {
                SolveStatus st = probe(inst, opts, pins, i, DeltaRational(Rational(cap)), true, false);
                if (st != SolveStatus::Sat) {
                    check.pass = false;
                    check.detail = "cost cap " + std::to_string(cap) + " not satisfiable";
                    break;
                }
            }
            break;
        }
        case ObjStatus::Optimal: {
            const DeltaRational& v = r.value.value();
            // phi && (cost < min) must be unsat
            SolveStatus below =
                probe(inst, opts, pins, i, DeltaRational(v.real), /*strict=*/!v.delta.is_positive(),
                      false);
            if (v.delta.is_positive()) {
                // non-attained: cost <= real must already be unsat
                check.pass = below == SolveStatus::Unsat;
                if (!check.pass) check.detail = "cost <= value is satisfiable";
                // and values arbitrarily close from above must exist
                for (int k = 0; check.pass && k < 4; ++k) {
                    Rational d = Rational(1, 1 << k);
                    SolveStatus st = probe(inst, opts, pins, i,
                                           DeltaRational(v.real + d), true, false);
                    if (st != SolveStatus::Sat) {
                        check.pass = false;
                        check.detail = "no model below value + " + d.str();
                    }
                }
            } else {
                check.pass = below == SolveStatus::Unsat;
                if (!check.pass) check.detail = "a better model exists";
                if (check.pass) {
                    SolveStatus at = probe(inst, opts, pins, i, v, false, /*equality=*/true);
                    if (at != SolveStatus::Sat) {
                        check.pass = false;
                        check.detail = "cost = value is not satisfiable";
                    }
                }
            }
            break;
        }
        default:
            check.skipped = true;
            check.detail = "status not verifiable";
            break;
        }

        if (!check.skipped && !check.pass) report.pass = false;
        report.checks.push_back(std::move(check));

        if (lex) {
            if (r.status != ObjStatus::Optimal || !r.value.value().delta.is_zero()) break;
            pins.push_back({i, r.value.value()});
        }
    }
    return report;
}

} // namespace omt
