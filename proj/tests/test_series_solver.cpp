#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "mixedpde/errors.hpp"
#include "mixedpde/series_solver.hpp"

using namespace mixedpde;
constexpr double kPi = std::numbers::pi;

namespace {

BoundaryFunction fn(const char* text) { return Expression::parse(text); }

ProblemSpec spec_for(int n, int s, double a, AOverPi ratio, int q = 0) {
    ProblemSpec p;
    p.n = n;
    p.s = s;
    p.a = a;
    p.a_over_pi = ratio;
    p.q = q;
    p.phi.assign(static_cast<std::size_t>(n), fn("0"));
    p.psi = p.phi;
    return p;
}

// n = s = 1, chi = q = 0: upper Y = A (e^{ky} - e^{2ka} e^{-ky}),
// lower Y = A ((1 - e^{2ka}) cos ky + (1 + e^{2ka}) sin ky), A fixed by Y(-a) = phi.
double first_order_oracle(int k, double a, double phi, double y) {
    const double E = std::exp(2.0 * k * a);
    const double A = phi / ((1.0 - E) * std::cos(k * a) - (1.0 + E) * std::sin(k * a));
    if (y >= 0.0) return A * (std::exp(k * y) - E * std::exp(-k * y));
    return A * ((1.0 - E) * std::cos(k * y) + (1.0 + E) * std::sin(k * y));
}

}  // namespace

TEST_CASE("smoothness conditions") {
    for (int s = 1; s <= 3; ++s) {
        auto spec = spec_for(1, s, kPi, Rational(1));
        spec.phi[0] = fn("sin(x)");
        const auto r = smoothness_check(spec);
        CHECK(r.passed);
    }

    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("x*(pi-x)");
    auto r = smoothness_check(spec);
    CHECK(r.checks[1].condition == "f^(2m) = 0 at 0, pi");
    CHECK(r.checks[1].pass);
    CHECK_FALSE(r.checks[2].pass);

    spec.s = 2;
    r = smoothness_check(spec);
    CHECK_FALSE(r.checks[1].pass);
    CHECK(r.checks[1].worst == doctest::Approx(2.0));
    CHECK(r.checks[1].detail == "order 2 at x = 0");
}

TEST_CASE("diophantine path is refused when b = s") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    auto r = smoothness_check(spec);
    CHECK_FALSE(r.diophantine_path_allowed);
    CHECK(r.path == ConvergencePath::Separated);
    bool noted = false;
    for (const auto& note : r.notes) noted = noted || note.find("higher smoothness required") != std::string::npos;
    CHECK(noted);

    spec = spec_for(1, 2, std::sqrt(2.0) * kPi, TaggedIrrational::parse("sqrt2"));
    spec.n = 1;
    spec.s = 2;
    r = smoothness_check(spec);
    CHECK_FALSE(r.diophantine_path_allowed);

    auto two = spec_for(2, 4, std::sqrt(2.0) * kPi, TaggedIrrational::parse("sqrt2"), 1);
    r = smoothness_check(two);
    CHECK(r.diophantine_path_allowed);
    CHECK(r.path == ConvergencePath::Diophantine);
}

TEST_CASE("boundary expansion on the model basis") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("sqrt(2/pi)*sin(3*x)");
    spec.psi[0] = fn("sin(x)");
    const auto basis = model_eigenpairs(1, 8);
    const auto e = expand_boundary(spec, basis);
    for (int k = 1; k <= 8; ++k) {
        CHECK(e.phi(0, k - 1) == doctest::Approx(k == 3 ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
        CHECK(e.psi(0, k - 1) == doctest::Approx(k == 1 ? std::sqrt(kPi / 2) : 0.0).scale(1.0));
    }
    CHECK(e.data_norm == doctest::Approx(std::sqrt(1.0 + kPi / 2)));

    spec.phi[0] = fn("0");
    const auto z = expand_boundary(spec, basis);
    CHECK(z.phi.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("certificate for smooth data stabilizes") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("x^5*(pi-x)^5");
    const auto basis = model_eigenpairs(1, 64);
    const auto e = expand_boundary(spec, basis);
    CHECK(e.certificate_increment[0] < 1e-3);
    CHECK(e.tail_estimate[0] < e.head_estimate[0]);
}

TEST_CASE("zero data gives the zero field") {
    const auto spec = spec_for(1, 1, kPi, Rational(1));
    const auto field = solve_problem(spec, 8);
    CHECK(field.used_modes() == 0);
    CHECK(field.evaluate(1.0, 0.5) == 0.0);
    CHECK(field.evaluate(2.0, -3.0, 1, 1) == 0.0);
    CHECK_FALSE(field.nonunique());
}

TEST_CASE("single mode against the closed form") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("sin(x)");
    const auto field = solve_problem(spec, 1);
    REQUIRE(field.used_modes() == 1);
    const double amp = std::sqrt(kPi / 2) * std::sqrt(2 / kPi);
    for (double y : {-kPi, -2.0, -0.5, 0.0, 0.7, 2.5, kPi})
        for (double x : {0.3, kPi / 2, 2.9}) {
            const double expected = amp * first_order_oracle(1, kPi, 1.0, y) * std::sin(x);
            CHECK(field.evaluate(x, y) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
        }
    CHECK(field.evaluate(kPi / 2, -kPi) == doctest::Approx(1.0).epsilon(1e-8));
    for (double x = 0.0; x <= kPi; x += 0.1) CHECK(std::abs(field.evaluate(x, -kPi) - std::sin(x)) < 1e-8);
}

TEST_CASE("band-limited data: reproduction, matching and truncation") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("sin(x) + 0.3*sin(2*x)");
    const auto field = solve_problem(spec, 10);
    CHECK(field.used_modes() == 2);
    CHECK(field.requested_modes() == 10);
    for (double x = 0.0; x <= kPi; x += 0.05) {
        CHECK(std::abs(field.evaluate(x, -kPi) - (std::sin(x) + 0.3 * std::sin(2 * x))) < 1e-8);
        CHECK(std::abs(field.evaluate(x, kPi)) < 1e-8);
        for (int dy = 0; dy <= 1; ++dy)
            CHECK(std::abs(field.evaluate(x, 0.0, 0, dy, Region::Upper) - field.evaluate(x, 0.0, 0, dy, Region::Lower)) <
                  1e-7);
    }
    for (double y : {-kPi, 0.0, kPi}) {
        CHECK(std::abs(field.evaluate(0.0, y)) < 1e-12);
        CHECK(std::abs(field.evaluate(kPi, y)) < 1e-12);
    }
}

TEST_CASE("higher order problem matches across y = 0 up to order 2n - 1") {
    auto spec = spec_for(2, 2, 1.0, TaggedIrrational::parse("0.3183098861837907"));
    spec.phi[0] = fn("sin(x)");
    spec.phi[1] = fn("0.5*sin(3*x)");
    spec.psi[0] = fn("0.2*sin(2*x)");
    const auto field = solve_problem(spec, 6);
    for (double x : {0.4, 1.3, 2.2}) {
        for (int dy = 0; dy <= 3; ++dy) {
            const double up = field.evaluate(x, 0.0, 0, dy, Region::Upper);
            const double lo = field.evaluate(x, 0.0, 0, dy, Region::Lower);
            CHECK(std::abs(up - lo) <= 1e-7 * (1.0 + std::abs(up)));
        }
        CHECK(field.evaluate(x, -1.0) == doctest::Approx(std::sin(x)).epsilon(1e-8));
        CHECK(field.evaluate(x, -1.0, 0, 1) == doctest::Approx(0.5 * std::sin(3 * x)).scale(1.0).epsilon(1e-8));
        CHECK(field.evaluate(x, 1.0) == doctest::Approx(0.2 * std::sin(2 * x)).scale(1.0).epsilon(1e-8));
        CHECK(std::abs(field.evaluate(x, 1.0, 0, 1)) < 1e-8);
    }
    for (double y : {-0.9, -0.2, 0.0, 0.5}) {
        CHECK(std::abs(field.evaluate(0.0, y, 2, 0)) < 1e-10);
        CHECK(std::abs(field.evaluate(kPi, y, 2, 0)) < 1e-10);
    }
}

TEST_CASE("linearity of the pipeline") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("x*(pi-x)");
    spec.psi[0] = fn("sin(2*x)");
    const auto u = solve_problem(spec, 16);
    const auto v = solve_problem(scale_data(spec, 2.0), 16);
    const auto w = solve_problem(scale_data(spec, -0.75), 16);
    for (double x : {0.2, 1.0, 2.0, 3.0})
        for (double y : {-3.0, -1.0, 0.0, 1.5, 3.1}) {
            const double base = u.evaluate(x, y);
            CHECK(std::abs(v.evaluate(x, y) - 2.0 * base) <= 1e-10 * std::max(1.0, std::abs(base)));
            CHECK(std::abs(w.evaluate(x, y) + 0.75 * base) <= 1e-10 * std::max(1.0, std::abs(base)));
        }
}

TEST_CASE("domain and order checks") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("sin(x)");
    const auto field = solve_problem(spec, 4);
    CHECK_THROWS_AS(field.evaluate(-0.1, 0.0), OutOfDomain);
    CHECK_THROWS_AS(field.evaluate(1.0, 3.2), OutOfDomain);
    CHECK_THROWS_AS(field.evaluate(1.0, 0.0, 3, 0), OutOfDomain);
    CHECK_THROWS_AS(field.evaluate(1.0, 0.0, 0, 3), OutOfDomain);
    CHECK_THROWS_AS(field.evaluate(1.0, 0.0, 2, 2), OutOfDomain);
    CHECK_NOTHROW(field.evaluate(1.0, 0.0, 2, 1));
    CHECK_NOTHROW(field.evaluate(kPi, -kPi, 1, 2));
}

TEST_CASE("orthogonal data across a near-singular mode") {
    auto spec = spec_for(2, 2, kPi / 2, Rational(1, 2), 1);
    SolveOptions opts;
    opts.tol_singular = 1e-6;

    spec.phi[0] = fn("sin(2*x)");
    const auto field = solve_problem(spec, 10, opts);
    CHECK(field.nonunique());
    CHECK_FALSE(field.skipped_modes().empty());
    for (int k : field.skipped_modes()) CHECK(k % 2 == 1);
    CHECK(field.evaluate(1.0, -kPi / 2, 0, 1) == doctest::Approx(std::sin(2.0)).epsilon(1e-8));
    CHECK(to_json(field)["nonunique"] == true);

    spec.phi[0] = fn("sin(9*x)");
    CHECK_THROWS_AS(solve_problem(spec, 10, opts), SingularModeWithData);
}

TEST_CASE("tail bound shrinks as modes are added for smooth data") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("x^3*(pi-x)^3");
    double previous = std::numeric_limits<double>::infinity();
    for (int K : {9, 17, 33, 65}) {
        const auto field = solve_problem(spec, K);
        CHECK(field.used_modes() == K);
        CHECK(field.tail_bound() <= previous);
        previous = field.tail_bound();
    }
}

TEST_CASE("truncation drops modes whose terms fall below the tolerance") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("x*(pi-x)");
    SolveOptions loose;
    loose.truncation_tol = 1e-2;
    const auto field = solve_problem(spec, 200, loose);
    CHECK(field.used_modes() < 200);
    for (const auto& r : field.records())
        if (r.k > field.used_modes()) CHECK(r.term < loose.truncation_tol);
}

TEST_CASE("grid export is deterministic") {
    auto spec = spec_for(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("sin(x) + 0.3*sin(2*x)");
    std::ostringstream a, b;
    solve_problem(spec, 10).write_csv(a, 11, 9);
    solve_problem(spec, 10).write_csv(b, 11, 9);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("x,y,u\n", 0) == 0);
    CHECK(to_json(solve_problem(spec, 10)).dump() == to_json(solve_problem(spec, 10)).dump());
}
