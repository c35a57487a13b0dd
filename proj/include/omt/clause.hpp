#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace omt {

/// Propositional literal: proposition index plus phase, minisat encoding.
struct Lit {
    int32_t code = -2;

    Lit() = default;
    Lit(int var, bool negative) : code(2 * var + (negative ? 1 : 0)) {}

    int var() const { return code >> 1; }
    bool sign() const { return code & 1; } // true = negated
    Lit operator~() const {
        Lit l;
        l.code = code ^ 1;
        return l;
    }
    bool valid() const { return code >= 0; }

    friend bool operator==(Lit a, Lit b) { return a.code == b.code; }
    friend bool operator!=(Lit a, Lit b) { return a.code != b.code; }
    friend bool operator<(Lit a, Lit b) { return a.code < b.code; }

    std::string str() const { return (sign() ? "-" : "") + std::to_string(var()); }
};

inline Lit mk_lit(int var, bool negative = false) { return Lit(var, negative); }

constexpr int32_t lit_undef_code = -2;

/// Where a clause came from; Augmented clauses carry a guard literal that
/// makes them inert once their assumption variable is retired.
enum class Origin { Input, TLemma, CostBound, Augmented };

struct Clause {
    std::vector<Lit> lits;
    Origin origin = Origin::Input;
};

} // namespace omt
