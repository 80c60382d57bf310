#include "mixedpde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mixedpde/errors.hpp"
#include "mixedpde/finite_difference.hpp"

namespace mixedpde {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SampledFunction::SampledFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 4) throw ParseError("sampled function needs at least 4 samples");
}

double SampledFunction::spacing() const { return kPi / static_cast<double>(values_.size() - 1); }

double SampledFunction::operator()(double x) const {
    const double h = spacing();
    const int last = static_cast<int>(values_.size()) - 1;
    int i = static_cast<int>(std::floor(x / h)) - 1;
    i = std::clamp(i, 0, last - 3);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
        double l = 1.0;
        const double xj = (i + j) * h;
        for (int m = 0; m < 4; ++m)
            if (m != j) l *= (x - (i + m) * h) / (xj - (i + m) * h);
        sum += l * values_[static_cast<std::size_t>(i + j)];
    }
    return sum;
}

double SampledFunction::derivative(double x, int d) const {
    if (d == 0) return (*this)(x);
    const double h = spacing();
    const int last = static_cast<int>(values_.size()) - 1;
    const int center = std::clamp(static_cast<int>(std::lround(x / h)), 0, last);
    auto estimate = [&](int stride) {
        const int width = d + 3;  // nodes per stencil
        int start = center - (width / 2) * stride;
        start = std::clamp(start, 0, last - (width - 1) * stride);
        std::vector<double> xs;
        std::vector<double> fs;
        for (int j = 0; j < width; ++j) {
            const int idx = start + j * stride;
            xs.push_back(idx * h);
            fs.push_back(values_[static_cast<std::size_t>(idx)]);
        }
        const auto w = fd_weights(x, xs, d);
        double acc = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * fs[j];
        return acc;
    };
    const double fine = estimate(1);
    if ((d + 3 - 1) * 2 > last) return fine;
    const double coarse = estimate(2);
    // Stencils with d+3 nodes are at least second order.
    return fine + (fine - coarse) / 3.0;
}

BoundaryFunction BoundaryFunction::from_text(const std::string& text) {
    const auto ends_with = [&](const std::string& suf) {
        return text.size() >= suf.size() && text.compare(text.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends_with(".csv")) return BoundaryFunction(load_samples_csv(text));
    return BoundaryFunction(Expression::parse(text));
}

double BoundaryFunction::operator()(double x) const {
    return std::visit([x](const auto& f) { return f(x); }, repr_);
}

double BoundaryFunction::derivative(double x, int d) const {
    return std::visit([x, d](const auto& f) { return f.derivative(x, d); }, repr_);
}

bool BoundaryFunction::is_identically_zero() const {
    if (auto* e = expression()) return e->is_identically_zero();
    const auto& v = samples()->values();
    return std::all_of(v.begin(), v.end(), [](double t) { return t == 0.0; });
}

std::string BoundaryFunction::describe() const {
    if (auto* e = expression()) return e->text();
    return "samples[" + std::to_string(samples()->size()) + "]";
}

SampledFunction load_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open samples file " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> cols;
        double v;
        while (ls >> v) cols.push_back(v);
        if (cols.empty()) continue;  // header row
        values.push_back(cols.back());
    }
    return SampledFunction(std::move(values));
}

bool ValidationReport::has(const std::string& id) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.id == id; });
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.id + ": " + v.message;
    }
    return out;
}

ValidationReport validate(const ProblemSpec& spec) {
    ValidationReport r;
    auto fail = [&](std::string id, std::string msg) { r.violations.push_back({std::move(id), std::move(msg)}); };

    if (spec.s < 1) fail("s_positive", "s must be a positive integer");
    if (spec.n < 1) fail("n_positive", "n must be a positive integer");
    if (spec.s >= 1 && spec.n >= 1 && spec.s % spec.n != 0) fail("b_integer", "b = s/n not integer");
    if (!(spec.a > 0.0) || !std::isfinite(spec.a)) fail("a_positive", "a must be a positive real");

    if (spec.gamma != 1 && spec.gamma != 2) fail("gamma_range", "gamma must be 1 or 2");
    if (spec.delta != 1 && spec.delta != 2) fail("delta_range", "delta must be 1 or 2");
    if (spec.gamma != spec.delta) fail("gamma_eq_delta", "gamma != delta is not a defined case");
    if (spec.gamma == 1 && (spec.q < 0 || spec.q > spec.n)) fail("q_range", "q not in {0,...,n} for gamma=1");
    if (spec.gamma == 2 && (spec.q < 0 || spec.q > 1)) fail("q_range", "q not in {0,1} for gamma=2");
    if (spec.delta == 1 && (spec.chi < 0 || spec.chi > spec.n)) fail("chi_range", "chi not in {0,...,n} for delta=1");
    if (spec.delta == 2 && (spec.chi < 0 || spec.chi > 1)) fail("chi_range", "chi not in {0,1} for delta=2");

    if (spec.n >= 1) {
        const auto n = static_cast<std::size_t>(spec.n);
        if (spec.phi.size() != n) fail("phi_count", "expected n functions phi_r, got " + std::to_string(spec.phi.size()));
        if (spec.psi.size() != n) fail("psi_count", "expected n functions psi_r, got " + std::to_string(spec.psi.size()));
    }

    if (auto* q = std::get_if<Rational>(&spec.a_over_pi)) {
        if (q->num() <= 0) fail("a_over_pi_positive", "a/pi must be positive");
    } else if (std::get<TaggedIrrational>(spec.a_over_pi).value <= 0.0L) {
        fail("a_over_pi_positive", "a/pi must be positive");
    }
    if (spec.a > 0.0) {
        const long double ratio = a_over_pi_value(spec.a_over_pi);
        double tol = 1e-9 * std::max(1.0, spec.a);
        if (auto* t = std::get_if<TaggedIrrational>(&spec.a_over_pi); t && t->declared_digits)
            tol = std::max(tol, kPi * std::abs(static_cast<double>(t->value)) * std::pow(10.0, 1 - *t->declared_digits));
        if (std::abs(static_cast<long double>(spec.a) - ratio * static_cast<long double>(kPi)) > tol)
            fail("a_consistency", "a differs from pi * a_over_pi");
    }

    for (int i = 0; i < kPositivitySamples; ++i) {
        const double x = kPi * i / (kPositivitySamples - 1);
        const double v = spec.p0(x);
        if (!(v >= 0.0)) {
            fail("p0_nonnegative", "p0(x) < 0 at x = " + std::to_string(x));
            break;
        }
    }
    return r;
}

void require_valid(const ProblemSpec& spec) {
    const auto r = validate(spec);
    if (!r.ok()) throw ValidationError(r.summary());
}

}  // namespace mixedpde
