#pragma once

#include "omt/linear.hpp"

#include <cassert>
#include <memory>
#include <vector>

namespace omt {

/// Boolean structure over atoms and Boolean variables. Immutable nodes with
/// shared subterms; `=>` and `iff` are desugared at construction.
class Formula {
public:
    enum class Kind { True, False, Prop, Atom, Not, And, Or };

    static Formula constant(bool value) { return Formula(value ? Kind::True : Kind::False); }
    static Formula prop(VarId boolean_var) {
        Formula f(Kind::Prop);
        f.node_->id = boolean_var;
        return f;
    }
    static Formula atom(int atom_index, bool positive = true) {
        Formula f(Kind::Atom);
        f.node_->id = atom_index;
        return positive ? f : !f;
    }

    static Formula conj(std::vector<Formula> parts) {
        return nary(Kind::And, std::move(parts));
    }
    static Formula disj(std::vector<Formula> parts) {
        return nary(Kind::Or, std::move(parts));
    }
    static Formula implies(Formula a, Formula b) { return disj({!std::move(a), std::move(b)}); }
    static Formula iff(Formula a, Formula b) {
        return conj({implies(a, b), implies(std::move(b), std::move(a))});
    }

    Formula operator!() const {
        switch (kind()) {
        case Kind::True: return constant(false);
        case Kind::False: return constant(true);
        case Kind::Not: return node_->children[0];
        default: {
            Formula f(Kind::Not);
            f.node_->children.push_back(*this);
            return f;
        }
        }
    }

    Kind kind() const { return node_->kind; }
    int id() const { return node_->id; }
    const std::vector<Formula>& children() const { return node_->children; }
    const void* key() const { return node_.get(); }

    bool eval(const std::function<bool(VarId)>& prop_value,
              const std::function<bool(int)>& atom_value) const {
        switch (kind()) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Prop: return prop_value(id());
        case Kind::Atom: return atom_value(id());
        case Kind::Not: return !children()[0].eval(prop_value, atom_value);
        case Kind::And:
            for (const auto& c : children())
                if (!c.eval(prop_value, atom_value)) return false;
            return true;
        default:
            for (const auto& c : children())
                if (c.eval(prop_value, atom_value)) return true;
            return false;
        }
    }

    /// Collects atom indices appearing anywhere under the node.
    void collect_atoms(std::vector<int>& out) const {
        switch (kind()) {
        case Kind::Atom: out.push_back(id()); return;
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
            for (const auto& c : children()) c.collect_atoms(out);
            return;
        default: return;
        }
    }

    void collect_props(std::vector<VarId>& out) const {
        switch (kind()) {
        case Kind::Prop: out.push_back(id()); return;
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
            for (const auto& c : children()) c.collect_props(out);
            return;
        default: return;
        }
    }

private:
    struct Node {
        Kind kind;
        int id = -1;
        std::vector<Formula> children;
    };

    explicit Formula(Kind k) : node_(std::make_shared<Node>()) { node_->kind = k; }

    static Formula nary(Kind k, std::vector<Formula> parts) {
        // flatten nested nodes of the same kind and fold constants
        const bool is_and = k == Kind::And;
        std::vector<Formula> flat;
        for (auto& p : parts) {
            if (p.kind() == k) {
                for (const auto& c : p.children()) flat.push_back(c);
            } else if (p.kind() == (is_and ? Kind::True : Kind::False)) {
                continue;
            } else if (p.kind() == (is_and ? Kind::False : Kind::True)) {
                return constant(!is_and);
            } else {
                flat.push_back(std::move(p));
            }
        }
        if (flat.empty()) return constant(is_and);
        if (flat.size() == 1) return flat[0];
        Formula f(k);
        f.node_->children = std::move(flat);
        return f;
    }

    std::shared_ptr<Node> node_;
};

} // namespace omt
