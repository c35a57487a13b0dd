#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace omt {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number in canonical form: denominator > 0 and
/// gcd(|numerator|, denominator) = 1 after every operation.
class Rational {
public:
    Rational() = default;
    Rational(int v) : value_(v) {}
    Rational(long long v) : value_(v) {}
    Rational(const BigInt& v) : value_(v) {}
    Rational(const BigInt& num, const BigInt& den)
        : value_(den < 0 ? -num : num, den < 0 ? -den : den) {
        assert(den != 0);
    }
    explicit Rational(boost::multiprecision::cpp_rational v) : value_(std::move(v)) {}

    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }

    bool is_zero() const { return value_.is_zero(); }
    bool is_negative() const { return value_ < 0; }
    bool is_positive() const { return value_ > 0; }
    bool is_integer() const { return denominator() == 1; }

    int sign() const { return value_ < 0 ? -1 : value_ > 0 ? 1 : 0; }

    Rational operator-() const { return Rational(boost::multiprecision::cpp_rational(-value_)); }

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o) { assert(!o.is_zero()); value_ /= o.value_; return *this; }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.value_ != b.value_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.value_ < b.value_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.value_ <= b.value_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.value_ > b.value_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.value_ >= b.value_; }

    Rational abs() const { return value_ < 0 ? -*this : *this; }

    /// Largest integer <= *this.
    Rational floor() const {
        BigInt q = numerator() / denominator();
        if (numerator() < 0 && q * denominator() != numerator()) q -= 1;
        return Rational(q);
    }

    /// Smallest integer >= *this.
    Rational ceil() const {
        BigInt q = numerator() / denominator();
        if (numerator() > 0 && q * denominator() != numerator()) q += 1;
        return Rational(q);
    }

    /// Reciprocal; undefined arithmetic on zero.
    Rational inverse() const {
        assert(!is_zero());
        return Rational(denominator(), numerator());
    }

    /// Plain rendering: "5", "-5", "5/2".
    std::string str() const {
        std::string s = numerator().str();
        if (!is_integer()) { s += "/"; s += denominator().str(); }
        return s;
    }

    /// S-expression rendering: integers as `n`, fractions as `(/ p q)`.
    std::string smt() const {
        if (is_integer()) return numerator().str();
        return "(/ " + numerator().str() + " " + denominator().str() + ")";
    }

    /// Accepts "123", "-123", "5/2" and exact decimals "1.25".
    static std::optional<Rational> parse(std::string_view text) {
        if (text.empty()) return std::nullopt;
        size_t slash = text.find('/');
        if (slash != std::string_view::npos) {
            auto num = parse_decimal(text.substr(0, slash));
            auto den = parse_decimal(text.substr(slash + 1));
            if (!num || !den || den->is_zero()) return std::nullopt;
            return *num / *den;
        }
        return parse_decimal(text);
    }

private:
    static std::optional<Rational> parse_decimal(std::string_view text) {
        if (text.empty()) return std::nullopt;
        bool neg = false;
        size_t i = 0;
        if (text[0] == '-' || text[0] == '+') { neg = text[0] == '-'; i = 1; }
        if (i == text.size()) return std::nullopt;
        BigInt num = 0;
        BigInt den = 1;
        bool seen_dot = false, seen_digit = false;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c == '.') {
                if (seen_dot) return std::nullopt;
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                num = num * 10 + (c - '0');
                if (seen_dot) den *= 10;
                seen_digit = true;
            } else {
                return std::nullopt;
            }
        }
        if (!seen_digit) return std::nullopt;
        if (neg) num = -num;
        return Rational(num, den);
    }

    boost::multiprecision::cpp_rational value_;
};

inline Rational abs(const Rational& r) { return r.abs(); }

/// Three-way comparison used where a plain int verdict is handier than operators.
inline int compare(const Rational& a, const Rational& b) {
    return a < b ? -1 : b < a ? 1 : 0;
}

} // namespace omt
