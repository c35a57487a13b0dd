#pragma once

#include "omt/delta.hpp"
#include "omt/rational.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace omt {

enum class Sort { Bool, Int, Real };

inline const char* sort_name(Sort s) {
    switch (s) {
    case Sort::Bool: return "Bool";
    case Sort::Int: return "Int";
    default: return "Real";
    }
}

using VarId = int;

/// Linear combination of arithmetic variables plus a constant.
/// Invariant: coefficients sorted by variable id, no zero coefficients.
class LinearTerm {
public:
    LinearTerm() = default;
    explicit LinearTerm(Rational constant) : constant_(std::move(constant)) {}

    static LinearTerm variable(VarId v, Rational coeff = Rational(1)) {
        LinearTerm t;
        t.add(v, std::move(coeff));
        return t;
    }

    const std::vector<std::pair<VarId, Rational>>& coeffs() const { return coeffs_; }
    const Rational& constant() const { return constant_; }

    bool is_constant() const { return coeffs_.empty(); }
    size_t size() const { return coeffs_.size(); }

    Rational coeff_of(VarId v) const {
        for (const auto& [var, c] : coeffs_)
            if (var == v) return c;
        return Rational(0);
    }

    void add_constant(const Rational& c) { constant_ += c; }

    void add(VarId v, const Rational& coeff) {
        if (coeff.is_zero()) return;
        auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), v,
                                   [](const auto& p, VarId id) { return p.first < id; });
        if (it != coeffs_.end() && it->first == v) {
            it->second += coeff;
            if (it->second.is_zero()) coeffs_.erase(it);
        } else {
            coeffs_.insert(it, {v, coeff});
        }
    }

    LinearTerm& operator+=(const LinearTerm& o) {
        for (const auto& [v, c] : o.coeffs_) add(v, c);
        constant_ += o.constant_;
        return *this;
    }

    LinearTerm& operator-=(const LinearTerm& o) {
        for (const auto& [v, c] : o.coeffs_) add(v, -c);
        constant_ -= o.constant_;
        return *this;
    }

    LinearTerm& operator*=(const Rational& k) {
        if (k.is_zero()) {
            coeffs_.clear();
            constant_ = Rational(0);
            return *this;
        }
        for (auto& [v, c] : coeffs_) c *= k;
        constant_ *= k;
        return *this;
    }

    friend LinearTerm operator+(LinearTerm a, const LinearTerm& b) { return a += b; }
    friend LinearTerm operator-(LinearTerm a, const LinearTerm& b) { return a -= b; }
    friend LinearTerm operator*(const Rational& k, LinearTerm t) { return t *= k; }

    LinearTerm operator-() const {
        LinearTerm t = *this;
        t *= Rational(-1);
        return t;
    }

    friend bool operator==(const LinearTerm& a, const LinearTerm& b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator<(const LinearTerm& a, const LinearTerm& b) {
        if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
        return a.constant_ < b.constant_;
    }

    DeltaRational eval(const std::function<DeltaRational(VarId)>& assignment) const {
        DeltaRational r{constant_};
        for (const auto& [v, c] : coeffs_) r += c * assignment(v);
        return r;
    }

    std::string str(const std::function<std::string(VarId)>& name) const {
        std::string s;
        for (const auto& [v, c] : coeffs_) {
            if (!s.empty()) s += " + ";
            s += c.str() + "*" + name(v);
        }
        if (s.empty()) return constant_.str();
        if (!constant_.is_zero()) s += " + " + constant_.str();
        return s;
    }

private:
    std::vector<std::pair<VarId, Rational>> coeffs_;
    Rational constant_{0};
};

/// Relations of canonical atoms, read as `term <rel> 0`.
enum class Rel { LE, LT, EQ };

/// Canonical linear constraint `term rel 0`: variable coefficients are
/// coprime integers and, for EQ, the lowest-id coefficient is positive.
struct LinearAtom {
    LinearTerm term;
    Rel rel = Rel::LE;

    friend bool operator==(const LinearAtom& a, const LinearAtom& b) {
        return a.rel == b.rel && a.term == b.term;
    }
    friend bool operator<(const LinearAtom& a, const LinearAtom& b) {
        if (a.rel != b.rel) return a.rel < b.rel;
        return a.term < b.term;
    }

    std::string str(const std::function<std::string(VarId)>& name) const {
        const char* op = rel == Rel::LE ? " <= 0" : rel == Rel::LT ? " < 0" : " = 0";
        return term.str(name) + op;
    }
};

/// Result of atom normalization: either a constant truth value (the term had
/// no variables) or a canonical atom plus the polarity under which it encodes
/// the input constraint.
struct NormalizedAtom {
    std::optional<bool> constant;
    LinearAtom atom;
    bool positive = true;
};

/// Input relations accepted by the normalizer; GE/GT are rewritten to the
/// negation of the complementary canonical atom.
enum class InputRel { LE, LT, GE, GT, EQ };

/// Canonicalizes `term rel 0`. Identical constraints map to the identical
/// atom, e.g. `x < 3` and `2x < 6` normalize to the same LinearAtom.
inline NormalizedAtom normalize_atom(LinearTerm term, InputRel rel) {
    NormalizedAtom out;
    // t >= 0  <=>  not(t < 0);  t > 0  <=>  not(t <= 0)
    if (rel == InputRel::GE || rel == InputRel::GT) {
        out = normalize_atom(std::move(term), rel == InputRel::GE ? InputRel::LT : InputRel::LE);
        out.positive = !out.positive;
        if (out.constant) out.constant = !*out.constant;
        return out;
    }
    if (term.is_constant()) {
        const Rational& c = term.constant();
        switch (rel) {
        case InputRel::LE: out.constant = c <= Rational(0); break;
        case InputRel::LT: out.constant = c < Rational(0); break;
        default: out.constant = c.is_zero(); break;
        }
        return out;
    }
    // scale so variable coefficients are coprime integers
    BigInt num_gcd = 0;
    BigInt den_lcm = 1;
    for (const auto& [v, c] : term.coeffs()) {
        num_gcd = boost::multiprecision::gcd(num_gcd, boost::multiprecision::abs(c.numerator()));
        den_lcm = boost::multiprecision::lcm(den_lcm, c.denominator());
    }
    term *= Rational(den_lcm, num_gcd);
    if (rel == InputRel::EQ && term.coeffs().front().second.is_negative()) term *= Rational(-1);
    out.atom.term = std::move(term);
    out.atom.rel = rel == InputRel::LE ? Rel::LE : rel == InputRel::LT ? Rel::LT : Rel::EQ;
    return out;
}

} // namespace omt
