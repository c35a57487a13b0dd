#include "omt/cnf.hpp"

#include <cassert>

namespace omt {

void Clausifier::assert_formula(const Formula& f, std::vector<Clause>& defs,
                                std::vector<Clause>& tops) {
    switch (f.kind()) {
    case Formula::Kind::True:
        return;
    case Formula::Kind::False:
        tops.push_back({{}, Origin::Input});
        return;
    case Formula::Kind::And:
        for (const auto& c : f.children()) assert_formula(c, defs, tops);
        return;
    case Formula::Kind::Not: {
        const Formula& inner = f.children()[0];
        if (inner.kind() == Formula::Kind::Or) {
            for (const auto& c : inner.children()) assert_formula(!c, defs, tops);
            return;
        }
        if (inner.kind() == Formula::Kind::Not) {
            assert_formula(inner.children()[0], defs, tops);
            return;
        }
        tops.push_back({{literal_for(f, defs)}, Origin::Input});
        return;
    }
    case Formula::Kind::Or: {
        Clause top;
        top.origin = Origin::Input;
        for (const auto& c : f.children()) top.lits.push_back(literal_for(c, defs));
        tops.push_back(std::move(top));
        return;
    }
    default:
        tops.push_back({{literal_for(f, defs)}, Origin::Input});
        return;
    }
}

Lit Clausifier::literal_for(const Formula& f, std::vector<Clause>& defs) {
    switch (f.kind()) {
    case Formula::Kind::Prop:
        return mk_lit(bool_var_(f.id()));
    case Formula::Kind::Atom:
        return mk_lit(atom_var_(f.id()));
    case Formula::Kind::Not:
        return ~literal_for(f.children()[0], defs);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        auto it = defined_.find(f.key());
        if (it != defined_.end()) return it->second;
        std::vector<Lit> child_lits;
        child_lits.reserve(f.children().size());
        for (const auto& c : f.children()) child_lits.push_back(literal_for(c, defs));
        Lit d = mk_lit(new_aux_var_());
        if (f.kind() == Formula::Kind::And) {
            // d <-> (x1 & ... & xn)
            Clause back{{d}, Origin::Input};
            for (Lit x : child_lits) {
                defs.push_back({{~d, x}, Origin::Input});
                back.lits.push_back(~x);
            }
            defs.push_back(std::move(back));
        } else {
            // d <-> (x1 | ... | xn)
            Clause fwd{{~d}, Origin::Input};
            for (Lit x : child_lits) {
                defs.push_back({{d, ~x}, Origin::Input});
                fwd.lits.push_back(x);
            }
            defs.push_back(std::move(fwd));
        }
        defined_.emplace(f.key(), d);
        return d;
    }
    default:
        // constants are folded away during formula construction
        assert(false && "constant below boolean connective");
        return mk_lit(0);
    }
}

} // namespace omt
