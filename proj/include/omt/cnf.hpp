#pragma once

#include "omt/clause.hpp"
#include "omt/formula.hpp"

#include <functional>
#include <map>
#include <vector>

namespace omt {

/// Clausifies asserted formulas into equisatisfiable CNF. And/Or nodes get
/// auxiliary definition variables with full biconditional encoding, memoized
/// per shared node, so every model of the input extends to the CNF and vice
/// versa. Top-level conjunctions and negated disjunctions split directly.
class Clausifier {
public:
    Clausifier(std::function<int()> new_aux_var,
               std::function<int(int)> atom_var,
               std::function<int(VarId)> bool_var)
        : new_aux_var_(std::move(new_aux_var)),
          atom_var_(std::move(atom_var)),
          bool_var_(std::move(bool_var)) {}

    /// Emits definitional clauses into `defs` and the clauses asserting `f`
    /// into `tops` (callers may guard only the latter).
    void assert_formula(const Formula& f, std::vector<Clause>& defs, std::vector<Clause>& tops);

private:
    Lit literal_for(const Formula& f, std::vector<Clause>& defs);

    std::function<int()> new_aux_var_;
    std::function<int(int)> atom_var_;
    std::function<VarId(VarId)> bool_var_;
    std::map<const void*, Lit> defined_;
};

} // namespace omt
