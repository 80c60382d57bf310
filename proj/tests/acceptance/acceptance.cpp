// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mixedpde/denominator_lab.hpp"
#include "mixedpde/errors.hpp"
#include "mixedpde/modal_assembly.hpp"
#include "mixedpde/series_solver.hpp"
#include "mixedpde/verification.hpp"

using namespace mixedpde;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!ok) detail << "[failed: " << what << "] ";
    }
};

struct Criterion {
    int id;
    std::string title;
    double seconds_limit;
    std::function<void(Outcome&)> body;
};

BoundaryFunction fn(const char* text) { return Expression::parse(text); }

ProblemSpec make_spec(int n, int s, double a, AOverPi ratio, int q = 0) {
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

void model_exactness(Outcome& o) {
    double worst_ortho = 0.0;
    for (int s = 1; s <= 3; ++s) {
        const auto basis = model_eigenpairs(s, 100);
        for (int k = 1; k <= 100; ++k) {
            double exact = 1.0;
            for (int i = 0; i < 2 * s; ++i) exact *= k;
            o.require(basis.lambda(k) == exact, "lambda_k = k^2s at s=" + std::to_string(s));
        }
        worst_ortho = std::max(worst_ortho, basis.orthonormality_error());
    }
    o.require(worst_ortho <= 1e-10, "orthonormality");
    o.detail << "orthonormality error " << worst_ortho;
}

void discretized_consistency(Outcome& o) {
    const auto basis = numeric_eigenpairs(1, fn("1"), 20, default_grid_size(20));
    double worst = 0.0;
    for (int k = 1; k <= 20; ++k) worst = std::max(worst, std::abs(basis.lambda(k) - (k * k + 1.0)) / basis.lambda(k));
    const auto asym = asymptote_check(basis, 1);
    o.require(worst <= 1e-6, "relative eigenvalue error");
    o.require(asym.decaying && asym.tail_max < asym.head_max, "sqrt(lambda_k) - k decays");
    o.detail << "max relative error " << worst << ", deviation head " << asym.head_max << " tail " << asym.tail_max;
}

void oracle_equivalence(Outcome& o) {
    auto spec = make_spec(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("x*(pi-x)");
    spec.psi[0] = fn("0.5*sin(3*x) + sin(x)");
    SolveOptions opts;
    opts.truncation_tol = 0.0;
    const auto field = solve_problem(spec, 50, opts);
    const auto ratios = determinant_ratios(field);
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r / ratios.front() - 1.0));
    const auto dev = oracle_mode_deviations(field, 101);
    const double worst = dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
    o.require(ratios.size() == 50, "all 50 modes assembled");
    o.require(spread <= 1e-8, "determinant ratio constant");
    o.require(dev.size() == 50 && worst <= 1e-9, "Y_k deviation");
    o.detail << "ratio spread " << spread << ", max Y_k deviation " << worst << " over " << dev.size() << " modes";
}

struct AsymptoteWindow {
    double worst_from20 = 0.0;
    double sup_head = 0.0;
    double sup_back = 0.0;
};

AsymptoteWindow window(const DenominatorReport& r, int k_split, int k_from) {
    AsymptoteWindow w;
    for (const auto& rec : r.records) {
        const double e = std::abs(rec.residual);
        if (rec.k >= k_from) w.worst_from20 = std::max(w.worst_from20, e);
        if (rec.k <= k_split) w.sup_head = std::max(w.sup_head, e);
        if (rec.k >= k_split) w.sup_back = std::max(w.sup_back, e);
    }
    return w;
}

void denominator_asymptote(Outcome& o) {
    const auto first = make_spec(1, 1, kPi, Rational(1));
    const auto r1 = asymptote_comparison(first, make_basis(first, 100), 2, 100);
    const auto w1 = window(r1, 50, 20);
    o.require(r1.phase.label() == "pi/4", "first order phase");
    o.require(w1.worst_from20 <= 0.01, "n=1 residual on [20, 100]");
    o.require(w1.sup_back < w1.sup_head, "n=1 residual decreases");

    // a = pi puts every mode on a zero of sin(k a) for this phase; a = 1 is used instead.
    const auto second = make_spec(2, 2, 1.0, TaggedIrrational::parse("0.3183098861837907"));
    const auto r2 = asymptote_comparison(second, make_basis(second, 60), 2, 60);
    const auto w2 = window(r2, 30, 20);
    o.require(r2.phase.label() == "0", "second order phase");
    o.require(w2.worst_from20 <= 0.01, "n=2 residual on [20, 60]");
    o.require(w2.sup_back < w2.sup_head, "n=2 residual decreases");
    o.detail << "n=1: max " << w1.worst_from20 << ", head " << w1.sup_head << " back " << w1.sup_back
             << "; n=2 (a=1): max " << w2.worst_from20 << ", head " << w2.sup_head << " back " << w2.sup_back;
}

struct Floor {
    double value = 1e300;
    int at = 0;
    double beyond_two = 1e300;  // over k >= 3
};

Floor denominator_floor(const Rational& ratio) {
    const auto spec = make_spec(2, 2, static_cast<double>(ratio.value()) * kPi, ratio, 1);
    const auto report = asymptote_comparison(spec, make_basis(spec, 200), 1, 200);
    Floor f;
    for (const auto& rec : report.records) {
        const double v = std::abs(rec.normalized_det);
        if (v < f.value) {
            f.value = v;
            f.at = rec.k;
        }
        if (rec.k >= 3) f.beyond_two = std::min(f.beyond_two, v);
    }
    return f;
}

void separation(Outcome& o) {
    const auto phase = classify_phase(4, 1, 1);
    o.require(phase.label() == "pi/2", "phase pi/2 for 2n = 4, q odd");

    const auto whole = denominator_floor(Rational(1));
    const auto sep1 = separation_check(Rational(1), phase);
    o.require(sep1.verdict == Verdict::Separated && sep1.delta1 && *sep1.delta1 == 1.0, "a/pi = 1 separated, delta1 = 1");
    o.require(whole.value >= 0.9, "a/pi = 1 floor");

    const auto third = denominator_floor(Rational(1, 3));
    const auto sep3 = separation_check(Rational(1, 3), phase);
    o.require(sep3.verdict == Verdict::Separated && sep3.delta1 && std::abs(*sep3.delta1 - 0.5) < 1e-12,
              "a/pi = 1/3 separated, delta1 = 1/2");
    o.require(third.value >= 0.45, "a/pi = 1/3 floor");

    const auto half = denominator_floor(Rational(1, 2));
    const auto sep2 = separation_check(Rational(1, 2), phase);
    o.require(sep2.verdict == Verdict::NotGuaranteed, "a/pi = 1/2 not guaranteed");
    o.require(half.value < 1e-2, "a/pi = 1/2 denominator below 1e-2");
    o.detail << "n=s=2 floors over k <= 200: a/pi=1 " << whole.value << " at k=" << whole.at << "; 1/3 " << third.value
             << " at k=" << third.at << " (" << third.beyond_two << " over k >= 3); 1/2 " << half.value << " at k="
             << half.at << " (" << verdict_name(sep2.verdict) << ")";
}

void diophantine(Outcome& o) {
    const auto tau = TaggedIrrational::parse("sqrt2");
    const auto scan = diophantine_scan(tau.value, 1, 0.5, classify_phase(4, 1, 1), 10000);
    o.require(scan.min_w > 0.0, "min of k^1.5 |sin|");
    o.require(scan.raw_floor > 0.0, "min of k |sin|");
    o.detail << "min w " << scan.min_w << " at k=" << scan.argmin_w << ", raw floor " << scan.raw_floor << " at k="
             << scan.argmin_raw;
}

ProblemSpec end_to_end_spec() {
    auto spec = make_spec(1, 1, kPi, Rational(1));
    spec.phi[0] = fn("sin(x) + 0.3*sin(2*x)");
    return spec;
}

void end_to_end(Outcome& o) {
    const auto field = solve_problem(end_to_end_spec(), 10);
    const auto r = verify(field, 201, 201);
    o.require(r.boundary.max_boundary() <= 1e-8, "boundary reproduction");
    o.require(r.max_pde() <= 1e-8, "closed-form residual");
    o.require(r.boundary.max_matching() <= 1e-8, "matching at y = 0");
    o.require(r.max_fd() <= 1e-3, "finite-difference residual");
    o.detail << "boundary " << r.boundary.max_boundary() << ", pde " << r.max_pde() << ", matching "
             << r.boundary.max_matching() << ", fd " << r.max_fd();
}

void fallback(Outcome& o) {
    auto spec = make_spec(2, 2, kPi / 2, Rational(1, 2), 1);
    SolveOptions opts;
    opts.tol_singular = 1e-6;
    spec.phi[0] = fn("sin(2*x)");
    const auto field = solve_problem(spec, 10, opts);

    int found = 0;
    double smallest = 1e300;
    for (const auto& rec : field.records()) {
        const double rel = std::abs(rec.det_scaled) / rec.hadamard;
        if (rel < smallest) {
            smallest = rel;
            found = rec.k;
        }
    }
    o.require(smallest < 1e-6, "scan finds a denominator below 1e-6");
    o.require(field.nonunique(), "orthogonal data flagged nonunique");

    spec.phi[0] = Expression::parse("sin(" + std::to_string(found) + "*x)");
    bool threw = false;
    try {
        (void)solve_problem(spec, 10, opts);
    } catch (const SingularModeWithData&) {
        threw = true;
    }
    o.require(threw, "data on the singular mode is refused");
    o.detail << "mode k=" << found << " with relative determinant " << smallest << ", skipped "
             << field.skipped_modes().size() << " modes";
}

void linearity(Outcome& o) {
    const auto spec = end_to_end_spec();
    const auto base = solve_problem(spec, 10);
    const auto doubled = solve_problem(scale_data(spec, 2.0), 10);
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
            const double x = kPi * i / 40.0, y = -kPi + 2.0 * kPi * j / 40.0;
            worst = std::max(worst, std::abs(doubled.evaluate(x, y) - 2.0 * base.evaluate(x, y)));
        }
    std::ostringstream first, second;
    base.write_csv(first, 101, 101);
    solve_problem(spec, 10).write_csv(second, 101, 101);
    o.require(worst <= 1e-10, "solve(2 data) = 2 solve(data)");
    o.require(first.str() == second.str(), "byte-identical CSV");
    o.detail << "max deviation " << worst << ", CSV bytes " << first.str().size();
}

void vandermonde(Outcome& o) {
    double worst = 0.0;
    for (int delta : {1, 2})
        for (double lambda : {16.0, 1e4})
            for (double a : {1.0, kPi}) {
                const double numeric = upper_growth_block(2, lambda, a, 0, delta).determinant();
                const double closed = upper_growth_block_det_closed_form(2, lambda, a, delta);
                worst = std::max(worst, std::abs(numeric - closed) / std::abs(closed));
            }
    o.require(worst <= 1e-8, "relative agreement");
    o.detail << "max relative difference " << worst;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "model eigenbasis exactness", 1.0, model_exactness},
        {2, "discretized eigensolver consistency", 10.0, discretized_consistency},
        {3, "first order closed-form equivalence", 5.0, oracle_equivalence},
        {4, "denominator asymptote", 30.0, denominator_asymptote},
        {5, "rational separation", 10.0, separation},
        {6, "Diophantine scan", 5.0, diophantine},
        {7, "end-to-end solve", 30.0, end_to_end},
        {8, "singular-mode fallback", 10.0, fallback},
        {9, "linearity and determinism", 30.0, linearity},
        {10, "growing-block determinant identity", 1.0, vandermonde},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "] ";
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.seconds_limit) {
            o.pass = false;
            o.detail << " [over time limit " << c.seconds_limit << " s]";
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << std::setw(2) << c.id << ": " << c.title << " -- "
                  << o.detail.str() << " (" << std::fixed << std::setprecision(3) << seconds << " s)"
                  << std::defaultfloat << std::setprecision(6) << "\n";
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures;
}
