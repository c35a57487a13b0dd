#include "omt/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace omt {

namespace {

// limits keeping the oracle trivially correct
constexpr size_t max_props = 16;
constexpr long long max_grid_points = 2000000;
constexpr size_t max_fm_constraints = 200000;

/// `sum coeffs <= bound` over delta-rationals; vars indexed by VarId.
struct Constraint {
    std::vector<std::pair<VarId, Rational>> coeffs; // sorted by var
    DeltaRational bound;
};

void add_coeff(std::vector<std::pair<VarId, Rational>>& cs, VarId v, const Rational& c) {
    if (c.is_zero()) return;
    auto it = std::lower_bound(cs.begin(), cs.end(), v,
                               [](const auto& p, VarId id) { return p.first < id; });
    if (it != cs.end() && it->first == v) {
        it->second += c;
        if (it->second.is_zero()) cs.erase(it);
    } else {
        cs.insert(it, {v, c});
    }
}

Constraint from_term(const LinearTerm& t, const DeltaRational& slack, bool negate) {
    // t <= -const + slack  (or -t <= const + slack)
    Constraint c;
    for (const auto& [v, k] : t.coeffs()) add_coeff(c.coeffs, v, negate ? -k : k);
    Rational base = negate ? t.constant() : -t.constant();
    c.bound = DeltaRational(base) + slack;
    return c;
}

/// Emits the constraints of `atom = phase`; returns false for a negated
/// equality, which the caller splits into branches.
bool atom_constraints(const LinearAtom& a, bool phase, std::vector<Constraint>& out) {
    const DeltaRational none;
    const DeltaRational open(Rational(0), Rational(-1));
    switch (a.rel) {
    case Rel::LE:
        if (phase) out.push_back(from_term(a.term, none, false));  // t <= 0
        else out.push_back(from_term(a.term, open, true));         // -t < 0
        return true;
    case Rel::LT:
        if (phase) out.push_back(from_term(a.term, open, false));  // t < 0
        else out.push_back(from_term(a.term, none, true));         // -t <= 0
        return true;
    case Rel::EQ:
        if (!phase) return false;
        out.push_back(from_term(a.term, none, false));
        out.push_back(from_term(a.term, none, true));
        return true;
    }
    return true;
}

/// Keeps only the strongest bound per (normalized) coefficient vector.
void dedupe(std::vector<Constraint>& cs) {
    std::map<std::vector<std::pair<VarId, Rational>>, DeltaRational> best;
    for (auto& c : cs) {
        if (c.coeffs.empty()) continue;
        // normalize by the positive gcd scale
        BigInt num_gcd = 0;
        BigInt den_lcm = 1;
        for (const auto& [v, k] : c.coeffs) {
            num_gcd = boost::multiprecision::gcd(num_gcd, boost::multiprecision::abs(k.numerator()));
            den_lcm = boost::multiprecision::lcm(den_lcm, k.denominator());
        }
        Rational scale(den_lcm, num_gcd);
        std::vector<std::pair<VarId, Rational>> key = c.coeffs;
        for (auto& [v, k] : key) k *= scale;
        DeltaRational bound = scale * c.bound;
        auto it = best.find(key);
        if (it == best.end()) best.emplace(std::move(key), std::move(bound));
        else if (bound < it->second) it->second = std::move(bound);
    }
    std::vector<Constraint> kept;
    for (auto& [key, bound] : best) kept.push_back({key, bound});
    // constant rows are checked separately; keep them verbatim
    for (auto& c : cs)
        if (c.coeffs.empty()) kept.push_back(std::move(c));
    cs = std::move(kept);
}

enum class FmStatus { Feasible, Infeasible, TooBig };

/// Eliminates every variable except `keep` (pass -1 to eliminate all).
FmStatus fm_eliminate(std::vector<Constraint>& cs, VarId keep) {
    while (true) {
        // constant rows: 0 <= bound must hold
        for (const auto& c : cs)
            if (c.coeffs.empty() && c.bound < DeltaRational()) return FmStatus::Infeasible;

        // eliminate the lowest-id variable other than `keep`
        VarId victim = -1;
        for (const auto& c : cs)
            for (const auto& [v, k] : c.coeffs)
                if (v != keep && (victim < 0 || v < victim)) victim = v;
        if (victim < 0) return FmStatus::Feasible;

        std::vector<Constraint> lowers, uppers, rest;
        for (auto& c : cs) {
            Rational k = Rational(0);
            for (const auto& [v, kk] : c.coeffs)
                if (v == victim) k = kk;
            if (k.is_zero()) rest.push_back(std::move(c));
            else if (k.is_positive()) uppers.push_back(std::move(c)); // victim <= ...
            else lowers.push_back(std::move(c));                      // victim >= ...
        }
        for (const auto& lo : lowers) {
            Rational a = Rational(0); // negative
            for (const auto& [v, kk] : lo.coeffs)
                if (v == victim) a = kk;
            for (const auto& up : uppers) {
                Rational b = Rational(0); // positive
                for (const auto& [v, kk] : up.coeffs)
                    if (v == victim) b = kk;
                // combine: b*lo + (-a)*up eliminates victim
                Constraint c;
                for (const auto& [v, kk] : lo.coeffs)
                    if (v != victim) add_coeff(c.coeffs, v, b * kk);
                for (const auto& [v, kk] : up.coeffs)
                    if (v != victim) add_coeff(c.coeffs, v, -a * kk);
                c.bound = b * lo.bound + (-a) * up.bound;
                rest.push_back(std::move(c));
                if (rest.size() > max_fm_constraints) return FmStatus::TooBig;
            }
        }
        cs = std::move(rest);
        dedupe(cs);
    }
}

/// Infimum of the single remaining variable `v` after elimination.
struct VarRange {
    bool infeasible = false;
    std::optional<DeltaRational> lower, upper; // nullopt = unbounded
};

VarRange var_range(std::vector<Constraint> cs, VarId v) {
    VarRange out;
    if (fm_eliminate(cs, v) == FmStatus::Infeasible) {
        out.infeasible = true;
        return out;
    }
    for (const auto& c : cs) {
        if (c.coeffs.empty()) continue;
        assert(c.coeffs.size() == 1 && c.coeffs[0].first == v);
        const Rational& a = c.coeffs[0].second;
        DeltaRational b = a.inverse() * c.bound;
        if (a.is_positive()) { // v <= b
            if (!out.upper || b < *out.upper) out.upper = b;
        } else { // v >= b
            if (!out.lower || b > *out.lower) out.lower = b;
        }
    }
    if (out.lower && out.upper && *out.lower > *out.upper) out.infeasible = true;
    return out;
}

struct BranchResult {
    enum class Kind { Infeasible, Unbounded, Value, Refused } kind = Kind::Infeasible;
    DeltaRational value;
};

/// Minimum of `cost_var` over one conjunctive branch, enumerating integer
/// variables over their derived boxes.
BranchResult branch_minimum(const std::vector<Constraint>& cs, VarId cost_var,
                            const std::vector<VarId>& int_vars) {
    // objective unboundedness is decided on the continuous relaxation,
    // provided the branch has an integer point at all (checked below)
    VarRange cost_range = var_range(cs, cost_var);
    if (cost_range.infeasible) return {BranchResult::Kind::Infeasible, {}};

    if (int_vars.empty()) {
        if (!cost_range.lower) return {BranchResult::Kind::Unbounded, {}};
        return {BranchResult::Kind::Value, *cost_range.lower};
    }

    // derive integer boxes; fall back to the +-50 sentinel on open sides
    std::vector<std::pair<BigInt, BigInt>> boxes;
    long long points = 1;
    for (VarId v : int_vars) {
        VarRange r = var_range(cs, v);
        if (r.infeasible) return {BranchResult::Kind::Infeasible, {}};
        BigInt lo = r.lower ? BigInt(r.lower->ceil().numerator()) : BigInt(-50);
        BigInt hi = r.upper ? BigInt(r.upper->floor().numerator()) : BigInt(50);
        if (lo > hi) return {BranchResult::Kind::Infeasible, {}};
        BigInt width = hi - lo + 1;
        if (width > BigInt(max_grid_points)) return {BranchResult::Kind::Refused, {}};
        points *= width.convert_to<long long>();
        if (points > max_grid_points) return {BranchResult::Kind::Refused, {}};
        boxes.push_back({lo, hi});
    }

    bool any_feasible = false;
    bool unbounded = false;
    std::optional<DeltaRational> best;
    std::vector<BigInt> point(int_vars.size());
    for (size_t i = 0; i < int_vars.size(); ++i) point[i] = boxes[i].first;
    while (true) {
        // substitute the integer point
        std::vector<Constraint> sub;
        sub.reserve(cs.size());
        for (const auto& c : cs) {
            Constraint s;
            DeltaRational bound = c.bound;
            for (const auto& [v, k] : c.coeffs) {
                auto it = std::find(int_vars.begin(), int_vars.end(), v);
                if (it != int_vars.end()) {
                    bound -= DeltaRational(k * Rational(point[it - int_vars.begin()]));
                } else {
                    add_coeff(s.coeffs, v, k);
                }
            }
            s.bound = std::move(bound);
            sub.push_back(std::move(s));
        }
        VarRange r = var_range(std::move(sub), cost_var);
        if (!r.infeasible) {
            any_feasible = true;
            if (!r.lower) unbounded = true;
            else if (!best || *r.lower < *best) best = *r.lower;
        }
        // next grid point
        size_t i = 0;
        for (; i < point.size(); ++i) {
            if (point[i] < boxes[i].second) {
                point[i] += 1;
                for (size_t j = 0; j < i; ++j) point[j] = boxes[j].first;
                break;
            }
        }
        if (i == point.size()) break;
    }
    if (!any_feasible) return {BranchResult::Kind::Infeasible, {}};
    if (unbounded) return {BranchResult::Kind::Unbounded, {}};
    return {BranchResult::Kind::Value, *best};
}

struct Enumerator {
    const Instance& inst;
    VarId cost_var; // synthetic, = max var id + 1
    std::vector<VarId> int_vars;
    std::vector<Constraint> base; // cost definition + pins

    bool refused = false;
    bool any_branch = false;
    bool unbounded = false;
    std::optional<DeltaRational> best;

    void consider(const std::vector<Constraint>& cs) {
        BranchResult r = branch_minimum(cs, cost_var, int_vars);
        switch (r.kind) {
        case BranchResult::Kind::Infeasible: return;
        case BranchResult::Kind::Refused: refused = true; return;
        case BranchResult::Kind::Unbounded:
            any_branch = true;
            unbounded = true;
            return;
        case BranchResult::Kind::Value:
            any_branch = true;
            if (!best || r.value < *best) best = r.value;
            return;
        }
    }

    /// Splits the pending disequalities, then evaluates the branch.
    void split_disequalities(std::vector<Constraint>& cs, const std::vector<const LinearTerm*>& diseqs,
                             size_t k) {
        if (refused || unbounded) return;
        if (k == diseqs.size()) {
            consider(cs);
            return;
        }
        const DeltaRational open(Rational(0), Rational(-1));
        size_t n = cs.size();
        cs.push_back(from_term(*diseqs[k], open, false)); // t < 0
        split_disequalities(cs, diseqs, k + 1);
        cs.resize(n);
        cs.push_back(from_term(*diseqs[k], open, true)); // -t < 0
        split_disequalities(cs, diseqs, k + 1);
        cs.resize(n);
    }
};

} // namespace

OracleResult oracle_optimum(const Instance& inst, size_t objective_index,
                            const std::vector<OraclePin>& pins) {
    OracleResult out;
    assert(objective_index < inst.objectives.size());

    // collect the propositional skeleton
    std::vector<int> atom_ids;
    std::vector<VarId> bool_vars;
    for (const auto& f : inst.assertions) {
        f.collect_atoms(atom_ids);
        f.collect_props(bool_vars);
    }
    std::sort(atom_ids.begin(), atom_ids.end());
    atom_ids.erase(std::unique(atom_ids.begin(), atom_ids.end()), atom_ids.end());
    std::sort(bool_vars.begin(), bool_vars.end());
    bool_vars.erase(std::unique(bool_vars.begin(), bool_vars.end()), bool_vars.end());
    if (atom_ids.size() + bool_vars.size() > max_props) return out; // refused

    Enumerator en{inst, static_cast<VarId>(inst.vars.size()), {}, {}, false, false, false, {}};
    for (VarId v = 0; v < static_cast<VarId>(inst.vars.size()); ++v)
        if (inst.vars[v].second == Sort::Int) en.int_vars.push_back(v);

    const ObjectiveSpec& obj = inst.objectives[objective_index];
    LinearTerm internal = obj.maximize ? -obj.term : obj.term;
    // cost_var = internal  (two inequalities)
    {
        LinearTerm def = internal;
        def.add(en.cost_var, Rational(-1));
        en.base.push_back(from_term(def, {}, false));
        en.base.push_back(from_term(def, {}, true));
    }
    // user bounds as unit constraints on the internal cost
    std::optional<Rational> ilo, ihi;
    if (obj.maximize) {
        if (obj.upper) ilo = -*obj.upper;
        if (obj.lower) ihi = -*obj.lower;
    } else {
        ilo = obj.lower;
        ihi = obj.upper;
    }
    if (ilo) {
        LinearTerm t = LinearTerm::variable(en.cost_var);
        t.add_constant(-*ilo);
        en.base.push_back(from_term(t, {}, true)); // cost >= lo
    }
    if (ihi) {
        LinearTerm t = LinearTerm::variable(en.cost_var);
        t.add_constant(-*ihi);
        en.base.push_back(from_term(t, DeltaRational(Rational(0), Rational(-1)), false)); // cost < hi
    }
    for (const auto& pin : pins) {
        const ObjectiveSpec& po = inst.objectives[pin.objective];
        LinearTerm pterm = po.maximize ? -po.term : po.term;
        // pterm = pin.value (delta-aware equality)
        Constraint up = from_term(pterm, {}, false);
        up.bound += pin.value;
        Constraint dn = from_term(pterm, {}, true);
        dn.bound -= pin.value;
        en.base.push_back(std::move(up));
        en.base.push_back(std::move(dn));
    }

    // enumerate assignments over atoms and boolean variables
    size_t n = atom_ids.size() + bool_vars.size();
    std::map<int, bool> atom_val;
    std::map<VarId, bool> bool_val;
    for (uint64_t mask = 0; mask < (1ull << n); ++mask) {
        for (size_t i = 0; i < atom_ids.size(); ++i) atom_val[atom_ids[i]] = (mask >> i) & 1;
        for (size_t i = 0; i < bool_vars.size(); ++i)
            bool_val[bool_vars[i]] = (mask >> (atom_ids.size() + i)) & 1;
        bool sat = true;
        for (const auto& f : inst.assertions) {
            if (!f.eval([&](VarId v) { return bool_val[v]; }, [&](int a) { return atom_val[a]; })) {
                sat = false;
                break;
            }
        }
        if (!sat) continue;
        std::vector<Constraint> cs = en.base;
        std::vector<const LinearTerm*> diseqs;
        for (int ai : atom_ids) {
            const LinearAtom& atom = inst.atoms[ai];
            if (!atom_constraints(atom, atom_val[ai], cs)) diseqs.push_back(&atom.term);
        }
        en.split_disequalities(cs, diseqs, 0);
        if (en.refused) return out;
        if (en.unbounded) break; // -oo is final
    }

    if (!en.any_branch) {
        out.status = OracleResult::Status::Unsat;
        return out;
    }
    if (en.unbounded) {
        out.status = OracleResult::Status::Unbounded;
        return out;
    }
    out.status = OracleResult::Status::Optimal;
    out.value = *en.best;
    out.attained = en.best->delta.is_zero();
    return out;
}

std::vector<OracleResult> oracle_lex(const Instance& inst) {
    std::vector<OracleResult> out;
    std::vector<OraclePin> pins;
    for (size_t i = 0; i < inst.objectives.size(); ++i) {
        OracleResult r = oracle_optimum(inst, i, pins);
        out.push_back(r);
        if (r.status != OracleResult::Status::Optimal) break;
        pins.push_back({i, r.value});
    }
    return out;
}

} // namespace omt
