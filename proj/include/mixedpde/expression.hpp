#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mixedpde {

/// Truncated Taylor series c_0 + c_1 h + ... + c_d h^d about a point.
using Taylor = std::vector<double>;

/// A parsed arithmetic expression in one variable x.
///
/// Grammar: numbers, `x`, `pi`, `+ - * /`, `^` (right associative), unary
/// minus, parentheses, and the functions sin, cos, exp, sqrt, log.
/// Derivatives of any order are computed by Taylor-mode automatic
/// differentiation, so endpoint conditions on high derivatives are exact up
/// to rounding.
class Expression {
public:
    struct Node;

    Expression();  // the constant 0
    static Expression parse(std::string_view text);
    static Expression constant(double value);

    double operator()(double x) const;

    /// Taylor coefficients of order 0..order about x0.
    Taylor taylor(double x0, int order) const;

    /// d-th derivative at x0.
    double derivative(double x0, int d) const;

    bool is_constant() const;
    /// True when the expression folds to the literal constant 0.
    bool is_identically_zero() const;

    const std::string& text() const { return text_; }

private:
    Expression(std::shared_ptr<const Node> root, std::string text);

    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace mixedpde
