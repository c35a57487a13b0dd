#include "omt/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace omt {

namespace {
// tag for temporary probe bounds pushed during multi-objective steps
constexpr int probe_tag = 1 << 21;
} // namespace

Context::Context(Options opts) : opts_(std::move(opts)), theory_(solver_) {
    solver_.set_theory(this);
    clausifier_ = std::make_unique<Clausifier>(
        [this] {
            int v = solver_.new_var();
            var_atom_.resize(solver_.num_vars(), -1);
            return v;
        },
        [this](int a) { return atom_sat_var(a); },
        [this](VarId v) { return bool_sat_var(v); });
    solver_.set_stop_hook([this] {
        return has_deadline_ && std::chrono::steady_clock::now() > deadline_;
    });
}

VarId Context::declare_var(const std::string& name, Sort sort) {
    if (names_.count(name)) throw std::runtime_error("symbol already declared: " + name);
    VarId id = static_cast<VarId>(vars_.size());
    VarRec rec;
    rec.name = name;
    rec.sort = sort;
    rec.frame = frame_depth();
    if (sort == Sort::Bool) {
        rec.sat_var = solver_.new_var();
        var_atom_.resize(solver_.num_vars(), -1);
    } else {
        rec.tvar = theory_.new_arith_var(sort == Sort::Int);
    }
    vars_.push_back(rec);
    names_.emplace(name, id);
    if (!frames_.empty()) frames_.back().vars.push_back(id);
    return id;
}

std::optional<VarId> Context::lookup(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) return std::nullopt;
    return it->second;
}

int Context::bool_sat_var(VarId v) {
    assert(vars_[v].sort == Sort::Bool);
    return vars_[v].sat_var;
}

TVar Context::tvar_of(VarId v) {
    assert(vars_[v].sort != Sort::Bool);
    return vars_[v].tvar;
}

int Context::atom_sat_var(int atom_index) {
    if (atom_index >= static_cast<int>(atom_vars_.size())) {
        atom_vars_.resize(atom_index + 1, -1);
        atom_split_.resize(atom_index + 1, 0);
    }
    if (atom_vars_[atom_index] < 0) {
        int sv = solver_.new_var();
        atom_vars_[atom_index] = sv;
        var_atom_.resize(solver_.num_vars(), -1);
        var_atom_[sv] = atom_index;
        theory_.register_atom(sv, atoms_[atom_index], [this](VarId v) { return tvar_of(v); });
    }
    return atom_vars_[atom_index];
}

Formula Context::atom_formula(LinearTerm term, InputRel rel) {
    NormalizedAtom n = normalize_atom(std::move(term), rel);
    if (n.constant) return Formula::constant(*n.constant);
    int idx = atoms_.intern(n.atom);
    (void)atom_sat_var(idx);
    return Formula::atom(idx, n.positive);
}

int Context::strict_below_atom(VarId cost_var, const DeltaRational& v) {
    LinearTerm t = LinearTerm::variable(cost_var);
    t.add_constant(-v.real);
    InputRel rel = v.delta.is_positive() ? InputRel::LE : InputRel::LT;
    NormalizedAtom n = normalize_atom(std::move(t), rel);
    assert(!n.constant && n.positive);
    int idx = atoms_.intern(n.atom);
    (void)atom_sat_var(idx);
    return idx;
}

void Context::scan_for_negative_equalities(const std::vector<Clause>& clauses) {
    for (const auto& c : clauses) {
        for (Lit l : c.lits) {
            if (!l.sign()) continue;
            int v = l.var();
            if (v >= static_cast<int>(var_atom_.size())) continue;
            int ai = var_atom_[v];
            if (ai < 0 || atoms_[ai].rel != Rel::EQ || atom_split_[ai]) continue;
            atom_split_[ai] = 1;
            // t = 0 or t < 0 or -t < 0
            const LinearTerm& t = atoms_[ai].term;
            NormalizedAtom below = normalize_atom(t, InputRel::LT);
            NormalizedAtom above = normalize_atom(-t, InputRel::LT);
            assert(!below.constant && below.positive && !above.constant && above.positive);
            int lt = atoms_.intern(below.atom);
            int gt = atoms_.intern(above.atom);
            solver_.add_clause(
                {mk_lit(atom_sat_var(ai)), mk_lit(atom_sat_var(lt)), mk_lit(atom_sat_var(gt))},
                Origin::TLemma);
        }
    }
}

void Context::add_guarded(std::vector<Clause> tops) {
    for (auto& c : tops) {
        if (!frames_.empty()) c.lits.insert(c.lits.begin(), Lit(frames_.back().guard_var, true));
        solver_.add_clause(std::move(c.lits), Origin::Input);
    }
}

void Context::assert_formula(const Formula& f) {
    std::vector<Clause> defs, tops;
    clausifier_->assert_formula(f, defs, tops);
    scan_for_negative_equalities(defs);
    scan_for_negative_equalities(tops);
    for (auto& c : defs) solver_.add_clause(std::move(c.lits), Origin::Input);
    add_guarded(std::move(tops));
}

void Context::push() {
    int guard = solver_.new_var();
    var_atom_.resize(solver_.num_vars(), -1);
    frames_.push_back({guard, {}, {}});
}

void Context::pop() {
    if (frames_.empty()) throw std::runtime_error("pop on empty frame stack");
    FrameRec f = std::move(frames_.back());
    frames_.pop_back();
    for (VarId v : f.vars) {
        auto it = names_.find(vars_[v].name);
        if (it != names_.end() && it->second == v) names_.erase(it);
    }
    for (int oi : f.objectives) objectives_[oi].retired = true;
    solver_.retire_guard(f.guard_var);
}

int Context::add_objective(const LinearTerm& term, bool maximize, std::optional<Rational> lower,
                           std::optional<Rational> upper, std::string name) {
    LinearTerm internal = maximize ? -term : term;
    bool integral = internal.constant().is_integer();
    for (const auto& [v, c] : internal.coeffs()) {
        if (vars_[v].sort == Sort::Bool) throw std::runtime_error("objective term must be arithmetic");
        integral = integral && vars_[v].sort == Sort::Int && c.is_integer();
    }

    VarRec rec;
    rec.name = ".obj!" + std::to_string(objectives_.size());
    rec.sort = integral ? Sort::Int : Sort::Real;
    rec.frame = frame_depth();
    rec.hidden = true;
    rec.tvar = theory_.new_arith_var(integral);
    VarId cv = static_cast<VarId>(vars_.size());
    vars_.push_back(rec);
    if (!frames_.empty()) frames_.back().vars.push_back(cv);

    Objective obj;
    obj.name = std::move(name);
    obj.term = term;
    obj.maximize = maximize;
    obj.cost_var = cv;
    obj.cost_tvar = rec.tvar;
    obj.frame = frame_depth();

    // cost variable defined by an asserted equality
    assert_formula(atom_formula(LinearTerm::variable(cv) - internal, InputRel::EQ));

    // user bounds become unit constraints not(cost < l) and (cost < u)
    std::optional<Rational> ilo, ihi;
    if (maximize) {
        if (upper) ilo = -*upper;
        if (lower) ihi = -*lower;
    } else {
        ilo = lower;
        ihi = upper;
    }
    if (ilo) {
        LinearTerm t = LinearTerm::variable(cv);
        t.add_constant(-*ilo);
        assert_formula(!atom_formula(std::move(t), InputRel::LT));
    }
    if (ihi) {
        LinearTerm t = LinearTerm::variable(cv);
        t.add_constant(-*ihi);
        assert_formula(atom_formula(std::move(t), InputRel::LT));
        obj.initial_upper = ExtendedValue(DeltaRational(*ihi));
    } else {
        obj.initial_upper = ExtendedValue::pos_inf();
    }

    int idx = static_cast<int>(objectives_.size());
    objectives_.push_back(std::move(obj));
    if (!frames_.empty()) frames_.back().objectives.push_back(idx);
    return idx;
}

std::vector<Lit> Context::frame_assumptions() const {
    std::vector<Lit> a;
    for (const auto& f : frames_) a.push_back(mk_lit(f.guard_var));
    return a;
}

BnbLimits Context::make_limits() {
    BnbLimits limits;
    limits.branch_limit = opts_.branch_limit;
    limits.node_budget = opts_.node_budget;
    if (has_deadline_) {
        auto deadline = deadline_;
        limits.stop = [deadline] { return std::chrono::steady_clock::now() > deadline; };
    }
    return limits;
}

void Context::setup_deadline() {
    if (opts_.timeout_ms >= 0) {
        deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(opts_.timeout_ms);
        has_deadline_ = true;
    } else {
        has_deadline_ = false;
    }
}

SolveStatus Context::run_solve(std::vector<Lit> extra_assumptions) {
    std::vector<Lit> assumptions = frame_assumptions();
    for (Lit l : extra_assumptions) assumptions.push_back(l);
    auto before = solver_.counters();
    SolveStatus st = solver_.solve(std::move(assumptions));
    stats_.solve_calls++;
    stats_.restarts += solver_.counters().restarts - before.restarts;
    return st;
}

void Context::capture_model(Objective& obj, const std::vector<DeltaRational>& model,
                            const SatSolver& solver) {
    obj.best_model = model;
    obj.best_concrete = theory_.concretize(model);
    obj.best_bools.clear();
    obj.best_bools.reserve(solver.num_vars());
    for (int v = 0; v < solver.num_vars(); ++v) obj.best_bools.push_back(solver.value(v));
}

void Context::update_range(const SatSolver& solver, const Objective& obj, ExtendedValue& lo,
                           ExtendedValue& hi) const {
    lo = ExtendedValue::neg_inf();
    hi = ExtendedValue::pos_inf();
    for (int sv : theory_.atoms_on(obj.cost_tvar)) {
        const TheoryAtomInfo* info = theory_.atom_info(sv);
        bool pos = solver.lit_true_at_root(mk_lit(sv));
        bool neg = !pos && solver.lit_true_at_root(mk_lit(sv, true));
        if (!pos && !neg) continue;
        const auto& up = pos ? info->pos_upper : info->neg_upper;
        const auto& dn = pos ? info->pos_lower : info->neg_lower;
        if (up && ExtendedValue(*up) < hi) hi = ExtendedValue(*up);
        if (dn && ExtendedValue(*dn) > lo) lo = ExtendedValue(*dn);
    }
}

Outcome Context::check_decision() {
    setup_deadline();
    theory_.clear_unknown();
    run_mode_ = RunMode::Decision;
    auto before = solver_.counters().conflicts;
    Outcome out;
    out.status = run_solve({});
    out.conflicts = solver_.counters().conflicts - before;
    if (out.status == SolveStatus::Sat) {
        out.has_model = true;
        const auto& concrete = theory_.stashed_concrete();
        for (VarId v = 0; v < static_cast<VarId>(vars_.size()); ++v) {
            if (!var_visible(v)) continue;
            if (vars_[v].sort == Sort::Bool) {
                out.bool_model[v] = solver_.model_value(vars_[v].sat_var) == lbool::True;
            } else if (vars_[v].tvar < static_cast<int>(concrete.size())) {
                out.arith_model[v] = concrete[vars_[v].tvar];
            } else {
                out.arith_model[v] = Rational(0); // unconstrained
            }
        }
    }
    has_deadline_ = false;
    return out;
}

Outcome Context::check() {
    std::vector<int> active;
    for (int i = 0; i < static_cast<int>(objectives_.size()); ++i)
        if (!objectives_[i].retired) active.push_back(i);
    if (active.empty()) return check_decision();

    setup_deadline();
    theory_.clear_unknown();
    auto before = solver_.counters().conflicts;
    Outcome out;
    switch (opts_.mode) {
    case ObjCombine::Single: {
        const Objective* model_source = nullptr;
        bool any_unknown = false, all_unsat = true;
        for (int idx : active) {
            ObjectiveResult r;
            run_single_objective(idx, r, nullptr, {});
            const Objective& obj = objectives_[idx];
            if (r.status == ObjStatus::Unknown) any_unknown = true;
            if (r.status != ObjStatus::Unsatisfiable) all_unsat = false;
            if (obj.has_model) model_source = &obj;
            out.objectives.push_back(std::move(r));
        }
        out.status = any_unknown ? SolveStatus::Unknown
                                 : (all_unsat ? SolveStatus::Unsat : SolveStatus::Sat);
        fill_models(out, model_source);
        break;
    }
    case ObjCombine::Boxed:
        out = run_boxed(active);
        break;
    case ObjCombine::Lex:
        out = run_lex(active);
        break;
    }
    out.conflicts = solver_.counters().conflicts - before;
    has_deadline_ = false;
    return out;
}

void Context::run_single_objective(int obj_idx, ObjectiveResult& out, const Objective* seed_from,
                                   const std::vector<Lit>& extra_assumptions) {
    Objective& obj = objectives_[obj_idx];
    out.name = obj.name;
    out.maximize = obj.maximize;

    obj.best = ExtendedValue::pos_inf();
    obj.has_model = false;
    obj.best_model.clear();
    obj.best_concrete.clear();
    obj.best_bools.clear();
    obj.last_pivot.reset();
    obj.pivot_streak = 0;
    obj.force_linear = false;
    obj.prefer_binary = false;
    obj.width_before_model.reset();
    obj.active = true;

    int guard = solver_.new_var();
    var_atom_.resize(solver_.num_vars(), -1);
    run_guard_ = guard;

    if (seed_from && seed_from->has_model) {
        DeltaRational seed = seed_from->best_model[obj.cost_tvar];
        obj.best = ExtendedValue(seed);
        obj.has_model = true;
        obj.best_model = seed_from->best_model;
        obj.best_concrete = seed_from->best_concrete;
        obj.best_bools = seed_from->best_bools;
        int aidx = strict_below_atom(obj.cost_var, seed);
        solver_.add_clause({Lit(guard, true), mk_lit(atom_sat_var(aidx))}, Origin::Augmented);
        stats_.learned_cost_clauses++;
    }

    run_mode_ = RunMode::Single;
    current_obj_ = obj_idx;
    stop_unbounded_ = false;
    stop_optimal_ = false;

    std::vector<Lit> extra = extra_assumptions;
    extra.push_back(mk_lit(guard));
    SolveStatus st = run_solve(std::move(extra));
    solver_.retire_guard(guard);
    run_guard_ = -1;
    current_obj_ = -1;

    switch (st) {
    case SolveStatus::Sat:
        // the model hook stopped the search: unbounded objective, or the
        // optimum bound was already implied at root
        if (stop_optimal_) {
            out.status = ObjStatus::Optimal;
            out.value = obj.best;
            out.attained = obj.best.value().delta.is_zero();
            break;
        }
        assert(stop_unbounded_);
        obj.best = ExtendedValue::neg_inf();
        out.status = ObjStatus::Unbounded;
        out.value = ExtendedValue::neg_inf();
        out.attained = false;
        break;
    case SolveStatus::Unsat:
        if (obj.has_model) {
            out.status = ObjStatus::Optimal;
            out.value = obj.best;
            out.attained = obj.best.value().delta.is_zero();
        } else {
            out.status = ObjStatus::Unsatisfiable;
            out.value = obj.initial_upper;
            out.attained = false;
        }
        break;
    default:
        out.status = ObjStatus::Unknown;
        out.value = obj.initial_upper;
        out.attained = false;
        break;
    }
    if (theory_.unknown_flagged()) theory_.clear_unknown();
}

Outcome Context::run_lex(const std::vector<int>& objs) {
    Outcome out;
    int check_guard = solver_.new_var();
    var_atom_.resize(solver_.num_vars(), -1);
    std::vector<int> pins;

    out.objectives.resize(objs.size());
    const Objective* model_source = nullptr;
    size_t k = 0;
    for (; k < objs.size(); ++k) {
        Objective& obj = objectives_[objs[k]];
        const Objective* seed_from = nullptr;
        if (k > 0 && objectives_[objs[k - 1]].has_model) seed_from = &objectives_[objs[k - 1]];
        run_single_objective(objs[k], out.objectives[k], seed_from, {mk_lit(check_guard)});
        if (out.objectives[k].status != ObjStatus::Optimal) {
            k++;
            break;
        }
        model_source = &obj;
        if (k + 1 < objs.size()) {
            // freeze the optimum as an equality for the next stage
            int pin = solver_.new_var();
            var_atom_.resize(solver_.num_vars(), -1);
            theory_.register_pin(pin, obj.cost_tvar, obj.best.value());
            solver_.add_clause({Lit(check_guard, true), mk_lit(pin)}, Origin::Augmented);
            pins.push_back(pin);
        }
    }
    // stages after a stop (unbounded/unsat/unknown stage) are unresolved
    for (size_t j = k; j < objs.size(); ++j) {
        out.objectives[j].name = objectives_[objs[j]].name;
        out.objectives[j].maximize = objectives_[objs[j]].maximize;
        out.objectives[j].status = ObjStatus::Unresolved;
        out.objectives[j].value = ExtendedValue::pos_inf();
    }

    solver_.retire_guard(check_guard);
    for (int pin : pins) solver_.add_clause({Lit(pin, true)}, Origin::Input);

    bool any_unknown = false, stage1_unsat = false;
    for (size_t j = 0; j < out.objectives.size(); ++j) {
        if (out.objectives[j].status == ObjStatus::Unknown) any_unknown = true;
        if (j == 0 && out.objectives[j].status == ObjStatus::Unsatisfiable) stage1_unsat = true;
    }
    out.status = any_unknown ? SolveStatus::Unknown
                             : (stage1_unsat ? SolveStatus::Unsat : SolveStatus::Sat);
    fill_models(out, model_source);
    return out;
}

Outcome Context::run_boxed(const std::vector<int>& objs) {
    for (int idx : objs) {
        Objective& o = objectives_[idx];
        o.best = ExtendedValue::pos_inf();
        o.has_model = false;
        o.best_model.clear();
        o.best_concrete.clear();
        o.best_bools.clear();
        o.active = true;
    }
    boxed_objs_ = objs;
    last_cmu_.reset();
    run_mode_ = RunMode::Boxed;

    int guard = solver_.new_var();
    var_atom_.resize(solver_.num_vars(), -1);
    run_guard_ = guard;
    SolveStatus st = run_solve({mk_lit(guard)});
    solver_.retire_guard(guard);
    run_guard_ = -1;
    run_mode_ = RunMode::Decision;

    Outcome out;
    const Objective* model_source = nullptr;
    bool any_model = false;
    for (int idx : objs) {
        Objective& o = objectives_[idx];
        ObjectiveResult r;
        r.name = o.name;
        r.maximize = o.maximize;
        if (o.best.is_neg_inf()) {
            r.status = ObjStatus::Unbounded;
            r.value = ExtendedValue::neg_inf();
        } else if (o.has_model && st != SolveStatus::Unknown) {
            r.status = ObjStatus::Optimal;
            r.value = o.best;
            r.attained = o.best.value().delta.is_zero();
        } else if (st == SolveStatus::Unknown) {
            r.status = ObjStatus::Unknown;
            r.value = o.initial_upper;
        } else {
            r.status = ObjStatus::Unsatisfiable;
            r.value = o.initial_upper;
        }
        if (o.has_model) {
            any_model = true;
            model_source = &o;
        }
        out.objectives.push_back(std::move(r));
    }
    out.status = st == SolveStatus::Unknown ? SolveStatus::Unknown
                                            : (any_model ? SolveStatus::Sat : SolveStatus::Unsat);
    fill_models(out, model_source);
    if (theory_.unknown_flagged()) theory_.clear_unknown();
    return out;
}

void Context::fill_models(Outcome& out, const Objective* source) {
    if (!source || !source->has_model) return;
    out.has_model = true;
    for (VarId v = 0; v < static_cast<VarId>(vars_.size()); ++v) {
        if (!var_visible(v)) continue;
        if (vars_[v].sort == Sort::Bool) {
            int sv = vars_[v].sat_var;
            bool val = sv < static_cast<int>(source->best_bools.size()) &&
                       source->best_bools[sv] == lbool::True;
            out.bool_model[v] = val;
        } else if (vars_[v].tvar < static_cast<int>(source->best_concrete.size())) {
            out.arith_model[v] = source->best_concrete[vars_[v].tvar];
        } else {
            out.arith_model[v] = Rational(0);
        }
    }
}

std::optional<Clause> Context::check(SatSolver& solver, bool complete) {
    auto clause = theory_.check(solver, complete, make_limits(), stats_.bnb_nodes);
    if (theory_.unknown_flagged()) solver.request_stop();
    return clause;
}

void Context::on_backjump(size_t trail_size) { theory_.on_backjump(trail_size); }

std::optional<Lit> Context::suggest_decision(SatSolver& solver) {
    if (run_mode_ != RunMode::Single || current_obj_ < 0) return std::nullopt;
    if (opts_.search == SearchMode::Linear) return std::nullopt;
    if (!solver.at_assumption_boundary()) return std::nullopt;
    Objective& obj = objectives_[current_obj_];
    if (obj.force_linear) return std::nullopt;
    if (opts_.search == SearchMode::Adaptive && !obj.prefer_binary) return std::nullopt;

    ExtendedValue lo, hi;
    update_range(solver, obj, lo, hi);
    // binary search requires a finite range
    if (!lo.is_finite() || !hi.is_finite()) return std::nullopt;
    Rational l = lo.value().real;
    Rational u = hi.value().real;
    if (!(l < u)) return std::nullopt;

    Rational pivot = (l + u) / Rational(2);
    if (vars_[obj.cost_var].sort == Sort::Int) {
        pivot = pivot.floor();
        if (!(pivot > l)) pivot = l + Rational(1);
        if (!(pivot < u)) return std::nullopt;
    }
    int aidx = strict_below_atom(obj.cost_var, DeltaRational(pivot));
    Lit plit = mk_lit(atom_sat_var(aidx));
    if (solver.value(plit) != lbool::Undef) return std::nullopt;
    if (!obj.last_pivot || *obj.last_pivot != pivot) {
        obj.last_pivot = pivot;
        stats_.pivots_decided++;
        obj.pivot_streak++;
        if (obj.pivot_streak >= opts_.bin_max_streak) obj.force_linear = true;
    }
    return plit;
}

TheoryClient::ModelResult Context::on_model(SatSolver& solver) {
    switch (run_mode_) {
    case RunMode::Decision:
        return {ModelAction::Accept, {}};
    case RunMode::Single:
        return on_model_single(solver);
    default:
        return on_model_boxed(solver);
    }
}

TheoryClient::ModelResult Context::on_model_single(SatSolver& solver) {
    stats_.sat_assignments++;
    Objective& obj = objectives_[current_obj_];

    ExtendedValue lo, hi;
    update_range(solver, obj, lo, hi);
    std::optional<Rational> width_before;
    if (lo.is_finite() && hi.is_finite()) width_before = hi.value().real - lo.value().real;

    stats_.minimize_calls++;
    BnbResult res = theory_.minimize(obj.cost_tvar, opts_.bnb, make_limits());
    stats_.bnb_nodes += res.nodes_explored;

    switch (res.status) {
    case BnbStatus::Unbounded:
        capture_model(obj, theory_.stashed_model(), solver);
        obj.has_model = true;
        stop_unbounded_ = true;
        return {ModelAction::Stop, {}};
    case BnbStatus::Unknown:
        solver.request_stop();
        return {ModelAction::Continue, {}};
    default:
        break;
    }

    const DeltaRational& v = res.value;
    assert(!obj.best.is_finite() || ExtendedValue(v) < obj.best);
    obj.best = ExtendedValue(v);
    obj.has_model = true;
    capture_model(obj, res.model, solver);

    int aidx = strict_below_atom(obj.cost_var, v);
    Lit below = mk_lit(atom_sat_var(aidx));
    if (solver.lit_true_at_root(~below)) {
        // cost >= v is already implied at root: v is the optimum
        stop_optimal_ = true;
        return {ModelAction::Stop, {}};
    }
    solver_.add_clause({Lit(run_guard_, true), below}, Origin::Augmented);
    stats_.learned_cost_clauses++;

    // a model completes a linear step
    obj.pivot_streak = 0;
    obj.force_linear = false;
    if (opts_.search == SearchMode::Adaptive) {
        if (width_before) {
            Rational width_after = v.real - lo.value().real;
            obj.prefer_binary = width_after > opts_.ada_shrink * *width_before;
        } else {
            obj.prefer_binary = false;
        }
    }
    return {ModelAction::Continue, {}};
}

TheoryClient::ModelResult Context::on_model_boxed(SatSolver& solver) {
    stats_.sat_assignments++;
    Simplex& simplex = theory_.simplex();
    // deferred until after the per-objective loop: integrating a clause may
    // backjump, which would retract theory bounds mid-minimization
    std::vector<Clause> deferred;
    if (std::getenv("OMT_DEBUG")) {
        std::fprintf(stderr, "[boxed] model hook, tableau:\n");
        for (TVar v = 0; v < simplex.num_vars(); ++v) {
            std::fprintf(stderr, "  t%d%s in [%s, %s] = %s\n", v,
                         simplex.is_integral(v) ? "*" : "",
                         simplex.has_lower(v) ? simplex.lower(v).str().c_str() : "-oo",
                         simplex.has_upper(v) ? simplex.upper(v).str().c_str() : "+oo",
                         simplex.value_of(v).str().c_str());
        }
    }

    for (int idx : boxed_objs_) {
        Objective& o = objectives_[idx];
        if (!o.active) continue;

        size_t probe_mark = simplex.mark();
        bool skip = false;
        if (o.best.is_finite()) {
            // improvement probe: push (cost < u) and test the relaxation.
            // The cut matches the bound atom's real semantics, so delta-only
            // refinements of a non-attained bound do not count as progress.
            const DeltaRational& u = o.best.value();
            DeltaRational cut = u.delta.is_positive() ? DeltaRational(u.real)
                                                      : DeltaRational(u.real, Rational(-1));
            theory_.mark_dirty();
            if (simplex.assert_upper(o.cost_tvar, cut, Lit(), probe_tag)) skip = true;
            else if (simplex.check()) skip = true;
        }
        if (skip) {
            simplex.backtrack_to(probe_mark);
            theory_.mark_dirty();
            continue;
        }

        stats_.minimize_calls++;
        BnbResult res = theory_.minimize(o.cost_tvar, opts_.bnb, make_limits());
        stats_.bnb_nodes += res.nodes_explored;
        simplex.backtrack_to(probe_mark);
        theory_.mark_dirty();
        if (std::getenv("OMT_DEBUG")) {
            std::fprintf(stderr, "[boxed] obj=%s status=%d value=%s best_was=%s\n",
                         o.name.c_str(), static_cast<int>(res.status),
                         res.status == BnbStatus::Unbounded ? "-oo" : res.value.str().c_str(),
                         o.best.str().c_str());
        }

        if (res.status == BnbStatus::Unknown) {
            solver.request_stop();
            return {ModelAction::Continue, {}};
        }
        if (res.status == BnbStatus::Unbounded) {
            // no more reason to investigate this objective
            o.best = ExtendedValue::neg_inf();
            o.active = false;
            o.has_model = true;
            capture_model(o, theory_.stashed_model(), solver);
            continue;
        }
        // progress is measured on the real part and the attainment class;
        // delta magnitudes are derivation noise
        bool improves = !o.best.is_finite();
        if (!improves) {
            const DeltaRational& u = o.best.value();
            improves = res.value.real < u.real ||
                       (res.value.real == u.real && !res.value.delta.is_positive() &&
                        u.delta.is_positive());
        }
        if (improves) {
            if (o.best.is_finite()) {
                // (cost < u_new) -> (cost < u_old): reactivates clauses
                // guarded by the previous bound atom
                int new_a = strict_below_atom(o.cost_var, res.value);
                int old_a = strict_below_atom(o.cost_var, o.best.value());
                deferred.push_back(
                    {{~mk_lit(atom_sat_var(new_a)), mk_lit(atom_sat_var(old_a))}, Origin::TLemma});
            }
            o.best = ExtendedValue(res.value);
            o.has_model = true;
            capture_model(o, res.model, solver);
        }
    }

    std::vector<Lit> cmu;
    cmu.push_back(Lit(run_guard_, true));
    bool any_active = false;
    for (int idx : boxed_objs_) {
        Objective& o = objectives_[idx];
        if (!o.active) continue;
        any_active = true;
        assert(o.best.is_finite());
        cmu.push_back(mk_lit(atom_sat_var(strict_below_atom(o.cost_var, o.best.value()))));
    }
    if (!any_active) return {ModelAction::Stop, {}};

    // the new blocking clause is strictly stronger: drop the previous one
    if (last_cmu_) solver_.remove_clause(*last_cmu_);
    last_cmu_ = solver_.add_clause(std::move(cmu), Origin::Augmented);
    stats_.learned_cost_clauses++;
    return {ModelAction::Continue, std::move(deferred)};
}

} // namespace omt
