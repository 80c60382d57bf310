#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mixedpde/expression.hpp"
#include "mixedpde/number.hpp"

namespace mixedpde {

/// Uniform samples of a function on [0, pi], endpoints included.
class SampledFunction {
public:
    SampledFunction() = default;
    explicit SampledFunction(std::vector<double> values);

    /// Local cubic Lagrange interpolation.
    double operator()(double x) const;
    /// d-th derivative at x by one-sided/central finite differences on the
    /// samples, Richardson-extrapolated once.
    double derivative(double x, int d) const;

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double spacing() const;

private:
    std::vector<double> values_;
};

/// A function of x on [0, pi], given as an expression or as samples.
class BoundaryFunction {
public:
    BoundaryFunction() = default;
    BoundaryFunction(Expression e) : repr_(std::move(e)) {}
    BoundaryFunction(SampledFunction s) : repr_(std::move(s)) {}

    /// Parses an expression, or loads samples when text ends in ".csv".
    static BoundaryFunction from_text(const std::string& text);

    double operator()(double x) const;
    double derivative(double x, int d) const;

    bool is_expression() const { return std::holds_alternative<Expression>(repr_); }
    const Expression* expression() const { return std::get_if<Expression>(&repr_); }
    const SampledFunction* samples() const { return std::get_if<SampledFunction>(&repr_); }
    bool is_identically_zero() const;
    std::string describe() const;

private:
    std::variant<Expression, SampledFunction> repr_;
};

/// Loads a one-column (value) or two-column (x,value) CSV of uniform samples.
SampledFunction load_samples_csv(const std::string& path);

/// All scalar parameters and boundary data of the Dirichlet-type problem on
/// (0, pi) x (-a, a).
struct ProblemSpec {
    int s = 1;  // x-operator order 2s
    int n = 1;  // y-operator order 2n
    double a = 1.0;
    AOverPi a_over_pi = Rational(1, 1);
    int gamma = 1;
    int delta = 1;
    int q = 0;
    int chi = 0;
    std::vector<BoundaryFunction> phi;  // data on y = -a, orders q + gamma*r
    std::vector<BoundaryFunction> psi;  // data on y = +a, orders chi + delta*r
    BoundaryFunction p0;                // zero by default

    /// s / n; meaningful only for a validated spec.
    int b() const { return n > 0 ? s / n : 0; }
    int lower_order(int r) const { return q + gamma * r; }
    int upper_order(int r) const { return chi + delta * r; }
};

struct Violation {
    std::string id;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(const std::string& id) const;
    std::string summary() const;
};

ValidationReport validate(const ProblemSpec& spec);

/// Throws ValidationError carrying the report summary when validation fails.
void require_valid(const ProblemSpec& spec);

/// Sample points used for the p0 >= 0 check.
inline constexpr int kPositivitySamples = 257;

}  // namespace mixedpde
