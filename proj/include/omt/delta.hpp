#pragma once

#include "omt/rational.hpp"

#include <cassert>
#include <string>

namespace omt {

/// Value of the form r + k*epsilon where epsilon is a positive symbolic
/// infinitesimal. Ordering is lexicographic on (r, k). Used for strict
/// bounds (x < b becomes x <= b - epsilon) and non-attained infima.
struct DeltaRational {
    Rational real;
    Rational delta;

    DeltaRational() = default;
    DeltaRational(Rational r) : real(std::move(r)) {}
    DeltaRational(Rational r, Rational d) : real(std::move(r)), delta(std::move(d)) {}

    bool is_rational() const { return delta.is_zero(); }

    DeltaRational operator-() const { return {-real, -delta}; }

    DeltaRational& operator+=(const DeltaRational& o) { real += o.real; delta += o.delta; return *this; }
    DeltaRational& operator-=(const DeltaRational& o) { real -= o.real; delta -= o.delta; return *this; }

    friend DeltaRational operator+(DeltaRational a, const DeltaRational& b) { return a += b; }
    friend DeltaRational operator-(DeltaRational a, const DeltaRational& b) { return a -= b; }

    /// Scaling by a rational k maps (r, d) to (k*r, k*d).
    friend DeltaRational operator*(const Rational& k, const DeltaRational& v) {
        return {k * v.real, k * v.delta};
    }

    friend bool operator==(const DeltaRational& a, const DeltaRational& b) {
        return a.real == b.real && a.delta == b.delta;
    }
    friend bool operator!=(const DeltaRational& a, const DeltaRational& b) { return !(a == b); }
    friend bool operator<(const DeltaRational& a, const DeltaRational& b) {
        return a.real < b.real || (a.real == b.real && a.delta < b.delta);
    }
    friend bool operator<=(const DeltaRational& a, const DeltaRational& b) { return !(b < a); }
    friend bool operator>(const DeltaRational& a, const DeltaRational& b) { return b < a; }
    friend bool operator>=(const DeltaRational& a, const DeltaRational& b) { return !(a < b); }

    /// True iff the value is an integer (no infinitesimal part).
    bool is_integral() const { return delta.is_zero() && real.is_integer(); }

    /// Largest integer <= r + k*epsilon.
    Rational floor() const {
        if (real.is_integer()) return delta.is_negative() ? real - Rational(1) : real;
        return real.floor();
    }

    /// Smallest integer >= r + k*epsilon.
    Rational ceil() const {
        if (real.is_integer()) return delta.is_positive() ? real + Rational(1) : real;
        return real.ceil();
    }

    std::string str() const {
        if (delta.is_zero()) return real.str();
        return real.str() + (delta.is_negative() ? "-" : "+") + delta.abs().str() + "e";
    }

    /// S-expression rendering: `v` when the delta part is zero, otherwise
    /// `(+ v (* k epsilon))`.
    std::string smt() const {
        if (delta.is_zero()) return real.smt();
        return "(+ " + real.smt() + " (* " + delta.smt() + " epsilon))";
    }
};

/// DeltaRational extended with two infinities: NegInf < Finite(v) < PosInf.
class ExtendedValue {
public:
    enum class Kind { NegInf, Finite, PosInf };

    ExtendedValue() : kind_(Kind::PosInf) {}
    ExtendedValue(DeltaRational v) : kind_(Kind::Finite), value_(std::move(v)) {}

    static ExtendedValue neg_inf() { ExtendedValue v; v.kind_ = Kind::NegInf; return v; }
    static ExtendedValue pos_inf() { ExtendedValue v; v.kind_ = Kind::PosInf; return v; }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_neg_inf() const { return kind_ == Kind::NegInf; }
    bool is_pos_inf() const { return kind_ == Kind::PosInf; }

    const DeltaRational& value() const {
        assert(is_finite());
        return value_;
    }

    friend bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ != Kind::Finite || a.value_ == b.value_;
    }
    friend bool operator!=(const ExtendedValue& a, const ExtendedValue& b) { return !(a == b); }
    friend bool operator<(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.kind_ == Kind::NegInf) return b.kind_ != Kind::NegInf;
        if (a.kind_ == Kind::PosInf) return false;
        if (b.kind_ == Kind::PosInf) return true;
        if (b.kind_ == Kind::NegInf) return false;
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExtendedValue& a, const ExtendedValue& b) { return !(b < a); }
    friend bool operator>(const ExtendedValue& a, const ExtendedValue& b) { return b < a; }
    friend bool operator>=(const ExtendedValue& a, const ExtendedValue& b) { return !(a < b); }

    std::string str() const {
        switch (kind_) {
        case Kind::NegInf: return "-oo";
        case Kind::PosInf: return "+oo";
        default: return value_.str();
        }
    }

    std::string smt() const {
        switch (kind_) {
        case Kind::NegInf: return "-oo";
        case Kind::PosInf: return "+oo";
        default: return value_.smt();
        }
    }

private:
    Kind kind_;
    DeltaRational value_;
};

} // namespace omt
