#include "mixedpde/number.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

#include "mixedpde/errors.hpp"

namespace mixedpde {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ParseError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    s = trim(s);
    if (s.empty()) throw ParseError("bad rational \"" + std::string(whole) + "\"");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw ParseError("bad rational \"" + std::string(whole) + "\"");
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j])))
            throw ParseError("bad rational \"" + std::string(whole) + "\"");
    return std::stoll(std::string(s));
}

bool is_perfect_power(long long v, int p) {
    const long long r = std::llround(std::pow(static_cast<long double>(v), 1.0L / p));
    for (long long c = std::max(0LL, r - 1); c <= r + 1; ++c) {
        long long acc = 1;
        for (int i = 0; i < p; ++i) acc *= c;
        if (acc == v) return true;
    }
    return false;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, text), 1);
    return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
}

TaggedIrrational TaggedIrrational::parse(std::string_view text) {
    text = trim(text);
    TaggedIrrational t;
    t.name = std::string(text);
    auto numeric_suffix = [&](std::string_view prefix) -> std::optional<long long> {
        if (text.substr(0, prefix.size()) != prefix || text.size() == prefix.size()) return std::nullopt;
        auto rest = text.substr(prefix.size());
        if (rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
        for (char c : rest)
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        return std::stoll(std::string(rest));
    };
    if (auto v = numeric_suffix("sqrt")) {
        t.value = std::sqrt(static_cast<long double>(*v));
        if (!is_perfect_power(*v, 2)) t.algebraic_degree = 2;
        return t;
    }
    if (auto v = numeric_suffix("cbrt")) {
        t.value = std::cbrt(static_cast<long double>(*v));
        if (!is_perfect_power(*v, 3)) t.algebraic_degree = 3;
        return t;
    }
    if (text == "golden") {
        t.value = (1.0L + std::sqrt(5.0L)) / 2.0L;
        t.algebraic_degree = 2;
        return t;
    }
    if (text == "pi") {
        t.value = 3.141592653589793238462643383279502884L;
        return t;
    }
    if (text == "e") {
        t.value = 2.718281828459045235360287471352662498L;
        return t;
    }
    const std::string s(text);
    char* end = nullptr;
    t.value = std::strtold(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParseError("unknown irrational tag \"" + s + "\"");
    int digits = 0;
    bool leading = true;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) continue;
        if (leading && c == '0') continue;
        leading = false;
        ++digits;
    }
    t.declared_digits = digits;
    return t;
}

AOverPi parse_a_over_pi(std::string_view text) {
    text = trim(text);
    constexpr std::string_view tag = "irrational:";
    if (text.substr(0, tag.size()) == tag) return TaggedIrrational::parse(text.substr(tag.size()));
    return Rational::parse(text);
}

long double a_over_pi_value(const AOverPi& r) {
    if (auto* q = std::get_if<Rational>(&r)) return q->value();
    return std::get<TaggedIrrational>(r).value;
}

std::string a_over_pi_str(const AOverPi& r) {
    if (auto* q = std::get_if<Rational>(&r)) return q->str();
    return "irrational:" + std::get<TaggedIrrational>(r).name;
}

}  // namespace mixedpde
