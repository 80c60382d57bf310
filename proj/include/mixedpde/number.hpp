#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace mixedpde {

/// Exact positive-or-zero rational num/den in lowest terms, den > 0.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    long double value() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }
    std::string str() const;

    /// Accepts "p/q" or "p".
    static Rational parse(std::string_view text);

    friend bool operator==(const Rational&, const Rational&) = default;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// A real number known only through a tag and a high-precision value.
struct TaggedIrrational {
    std::string name;          // "sqrt2", "golden", "pi", or the decimal literal
    long double value = 0.0L;
    /// Algebraic degree when known (2 for quadratic irrationals); empty for
    /// transcendental or unclassified decimals.
    std::optional<int> algebraic_degree;
    /// Significant digits for decimal input; empty for symbolic constants.
    std::optional<int> declared_digits;

    /// Accepts sqrtN, cbrtN, golden, pi, e, or a decimal literal.
    static TaggedIrrational parse(std::string_view text);
};

/// The ratio a/pi, carried exactly.
using AOverPi = std::variant<Rational, TaggedIrrational>;

/// Parses "p/q", "p", or "irrational:<name-or-decimal>".
AOverPi parse_a_over_pi(std::string_view text);
long double a_over_pi_value(const AOverPi& r);
std::string a_over_pi_str(const AOverPi& r);

}  // namespace mixedpde
