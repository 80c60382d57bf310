#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "mixedpde/errors.hpp"
#include "mixedpde/modal_assembly.hpp"

using namespace mixedpde;
using HighPrecision = boost::multiprecision::cpp_bin_float_50;
constexpr double kPi = std::numbers::pi;

namespace {

ProblemSpec spec_for(int n, int s, double a, int gamma = 1, int q = 0, int chi = 0) {
    ProblemSpec p;
    p.n = n;
    p.s = s;
    p.a = a;
    p.gamma = p.delta = gamma;
    p.q = q;
    p.chi = chi;
    return p;
}

// Unscaled system determinant in 50-digit arithmetic, built directly from
// rho^j e^(alpha y) trig(beta y + j angle) without any envelope handling.
HighPrecision unscaled_det_hp(const ProblemSpec& spec, double lambda) {
    using std::abs;
    const int n = spec.n;
    const HighPrecision pi = boost::math::constants::pi<HighPrecision>();
    const HighPrecision rho = pow(HighPrecision(lambda), HighPrecision(1) / (2 * n));
    struct Fn {
        HighPrecision angle;
        bool sine;
    };
    auto families = [&](bool upper) {
        const bool positive = upper == (n % 2 == 1);
        std::vector<Fn> out;
        if (positive) {
            for (int r = 0; r <= n; ++r) {
                const HighPrecision t = pi * r / n;
                out.push_back({t, false});
                if (r != 0 && r != n) out.push_back({t, true});
            }
        } else {
            for (int r = 0; r < n; ++r) {
                const HighPrecision t = pi * (1 + 2 * r) / (2 * n);
                out.push_back({t, false});
                out.push_back({t, true});
            }
        }
        return out;
    };
    auto value = [&](const Fn& f, HighPrecision y, int j) {
        const HighPrecision arg = rho * sin(f.angle) * y + j * f.angle;
        return pow(rho, j) * exp(rho * cos(f.angle) * y) * (f.sine ? sin(arg) : cos(arg));
    };
    const auto up = families(true), low = families(false);
    const int size = 4 * n;
    std::vector<std::vector<HighPrecision>> m(size, std::vector<HighPrecision>(size, HighPrecision(0)));
    const HighPrecision a(spec.a);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < 2 * n; ++i) {
            m[r][i] = value(up[i], a, spec.upper_order(r));
            m[n + r][2 * n + i] = value(low[i], -a, spec.lower_order(r));
        }
    for (int l = 0; l < 2 * n; ++l)
        for (int i = 0; i < 2 * n; ++i) {
            m[2 * n + l][i] = value(up[i], HighPrecision(0), l);
            m[2 * n + l][2 * n + i] = -value(low[i], HighPrecision(0), l);
        }
    HighPrecision det = 1;
    for (int c = 0; c < size; ++c) {
        int piv = c;
        for (int r = c + 1; r < size; ++r)
            if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < size; ++r) {
            const HighPrecision f = m[r][c] / m[c][c];
            for (int cc = c; cc < size; ++cc) m[r][cc] -= f * m[c][cc];
        }
    }
    return det;
}

}  // namespace

TEST_CASE("zero data gives a zero right-hand side and zero solution") {
    auto spec = spec_for(2, 2, 1.0);
    std::vector<double> zero(2, 0.0);
    auto sys = assemble(spec, 3, 81.0, zero, zero);
    CHECK(sys.rhs.isZero(0.0));
    auto sol = solve_modal(sys);
    CHECK(sol.coefficients().isZero(0.0));
    CHECK(sol.eval(0.3, 0) == 0.0);
}

TEST_CASE("right-hand side is divided by rho^order") {
    auto spec = spec_for(2, 2, 1.0, 1, 0, 2);
    std::vector<double> phi{0.0, 0.0}, psi{1.0, 0.0};
    auto sys = assemble(spec, 2, 16.0, phi, psi);
    CHECK(sys.rhs(0) == doctest::Approx(0.25));
}

TEST_CASE("Lavrentiev-Bitsadze mode k=1: scaled determinant") {
    auto spec = spec_for(1, 1, kPi);
    std::vector<double> one{1.0}, zero{0.0};
    auto sys = assemble(spec, 1, 1.0, one, zero);
    CHECK(sys.det_scaled == doctest::Approx(-(1.0 - std::exp(-2 * kPi))).epsilon(1e-12));
    CHECK(scaled_determinant(sys) == doctest::Approx(sys.det_scaled));
    // Column scales are e^(k pi) for the growing exponential and 1 elsewhere.
    CHECK(sys.log_column_scale_sum() == doctest::Approx(kPi));
}

TEST_CASE("Lavrentiev-Bitsadze mode k=1: boundary values reproduced") {
    auto spec = spec_for(1, 1, kPi);
    std::vector<double> one{1.0}, zero{0.0};
    auto sol = solve_modal(assemble(spec, 1, 1.0, one, zero));
    CHECK(sol.eval(-kPi, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(sol.eval(kPi, 0)) < 1e-10);
}

TEST_CASE("duplicated columns give a zero determinant") {
    auto spec = spec_for(1, 1, kPi);
    std::vector<double> one{1.0}, zero{0.0};
    auto sys = assemble(spec, 2, 4.0, one, zero);
    sys.matrix.col(1) = sys.matrix.col(0);
    CHECK(scaled_determinant(sys) == 0.0);
}

TEST_CASE("scaled determinant times the scales equals the high-precision determinant") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> lam(1.0, 1e4), aa(0.3, 3.5);
    int checked = 0;
    for (int trial = 0; trial < 24; ++trial) {
        const int n = 1 + trial % 2;
        const int gamma = 1 + (trial / 2) % 2;
        const int qmax = gamma == 2 ? 1 : n;
        const int q = trial % (qmax + 1), chi = (trial / 3) % (qmax + 1);
        auto spec = spec_for(n, n, aa(rng), gamma, q, chi);
        const double lambda = lam(rng);
        std::vector<double> z(static_cast<std::size_t>(n), 0.0);
        auto sys = assemble(spec, 1, lambda, z, z);
        const HighPrecision exact = unscaled_det_hp(spec, lambda);
        if (exact == 0) continue;
        const double log_exact = static_cast<double>(log(abs(exact)));
        CHECK(std::abs(sys.log_abs_unscaled_det() - log_exact) < 1e-8);
        CHECK((sys.det_scaled > 0) == (exact > 0));
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("solved modes satisfy the system, the ODE, and the matching") {
    for (int n : {1, 2, 3})
        for (int gamma : {1, 2}) {
            auto spec = spec_for(n, n, 1.0, gamma, 1, 0);
            std::vector<double> phi(static_cast<std::size_t>(n)), psi(static_cast<std::size_t>(n));
            for (int r = 0; r < n; ++r) {
                phi[static_cast<std::size_t>(r)] = 1.0 + r;
                psi[static_cast<std::size_t>(r)] = 0.5 - r;
            }
            for (double lambda : {2.0, 300.0, 1e5}) {
                auto sys = assemble(spec, 1, lambda, phi, psi);
                auto sol = solve_modal(sys);
                const Eigen::VectorXd r = sys.matrix * sol.coefficients() - sys.rhs;
                const double scale = (sys.matrix.cwiseAbs() * sol.coefficients().cwiseAbs()).norm() + sys.rhs.norm();
                CHECK(r.norm() <= 1e-10 * scale);

                std::vector<double> ys;
                for (int i = 1; i < 20; ++i) ys.push_back(-1.0 + 2.0 * i / 20);
                CHECK(modal_ode_residual(sol, ys) <= 1e-9);

                const double rho = std::pow(lambda, 1.0 / (2 * n));
                for (int j = 0; j < 2 * n; ++j) {
                    const double up = sol.eval(0.0, j, Region::Upper), lo = sol.eval(0.0, j, Region::Lower);
                    CHECK(std::abs(up - lo) <= 1e-8 * std::pow(rho, j) * sol.coefficients().cwiseAbs().maxCoeff());
                }
                for (int r = 0; r < n; ++r) {
                    CHECK(sol.eval(-1.0, spec.lower_order(r)) ==
                          doctest::Approx(phi[static_cast<std::size_t>(r)]).epsilon(1e-8));
                    CHECK(sol.eval(1.0, spec.upper_order(r)) ==
                          doctest::Approx(psi[static_cast<std::size_t>(r)]).epsilon(1e-8));
                }
            }
        }
}

TEST_CASE("ODE residual is independent of the coefficient values") {
    auto spec = spec_for(2, 2, 1.0);
    std::vector<double> z{0.0, 0.0};
    auto sys = assemble(spec, 1, 50.0, z, z);
    ModalSolution ones(sys, Eigen::VectorXd::Ones(8), 1.0);
    std::vector<double> ys{-0.9, -0.5, -0.1, 0.1, 0.5, 0.9};
    CHECK(modal_ode_residual(ones, ys) <= 1e-9);
    Eigen::VectorXd skewed = Eigen::VectorXd::Ones(8);
    skewed(5) = 7.0;  // breaks the matching, not the ODE
    CHECK(modal_ode_residual(ModalSolution(sys, skewed, 1.0), ys) <= 1e-9);
}

TEST_CASE("singular systems are reported") {
    auto spec = spec_for(1, 1, kPi);
    std::vector<double> one{1.0}, zero{0.0};
    auto sys = assemble(spec, 1, 1.0, one, zero);
    sys.matrix.col(3) = sys.matrix.col(2);
    sys.det_scaled = scaled_determinant(sys);
    CHECK_THROWS_AS(solve_modal(sys), SingularMode);
}

TEST_CASE("modal bound with a constant calibrated at j=0") {
    // |Y^(j)(y)| <= C rho^j (|phi_k| + |psi_k|) / |det_scaled|, C fitted on j = 0.
    auto spec = spec_for(1, 1, kPi);
    std::vector<ModalSolution> sols;
    std::vector<double> ys;
    for (int i = 0; i <= 40; ++i) ys.push_back(-kPi + 2 * kPi * i / 40);
    for (int k = 1; k <= 30; ++k) {
        std::vector<double> phi{1.0 / k}, psi{0.5 / k};
        sols.push_back(solve_modal(assemble(spec, k, k * k, phi, psi)));
    }
    auto ratio = [&](const ModalSolution& s, int j) {
        const double data = 1.5 / s.k();
        double worst = 0.0;
        for (double y : ys) worst = std::max(worst, std::abs(s.eval(y, j)));
        return worst * std::abs(s.det_scaled()) / (std::pow(std::sqrt(s.lambda()), j) * data);
    };
    double c = 0.0;
    for (const auto& s : sols) c = std::max(c, ratio(s, 0));
    c *= 1.5;
    for (const auto& s : sols)
        for (int j = 1; j <= 2; ++j) CHECK(ratio(s, j) <= c);
}

TEST_CASE("growing-column block determinant matches the product formula") {
    for (int delta : {1, 2})
        for (double lambda : {16.0, 1e4})
            for (double a : {1.0, kPi}) {
                const double numeric = upper_growth_block(2, lambda, a, 0, delta).determinant();
                const double closed = upper_growth_block_det_closed_form(2, lambda, a, delta);
                CHECK(std::abs(numeric - closed) <= 1e-8 * std::abs(closed));
            }
    // The same identity with two conjugate pairs.
    for (int delta : {1, 2}) {
        const double numeric = upper_growth_block(4, 16.0, 1.0, 1, delta).determinant();
        const double closed = upper_growth_block_det_closed_form(4, 16.0, 1.0, delta);
        CHECK(std::abs(numeric - closed) <= 1e-8 * std::abs(closed));
    }
}

TEST_CASE("lower block determinant matches the product formula") {
    for (int gamma : {1, 2})
        for (int q : {0, 1})
            for (double lambda : {16.0, 1e4})
                for (double a : {1.0, kPi}) {
                    const auto numeric = lower_growth_block(2, lambda, a, q, gamma).determinant();
                    const auto closed = lower_growth_block_det_closed_form(2, lambda, a, q, gamma);
                    CHECK(std::abs(numeric - closed) <= 1e-8 * std::abs(closed));
                }
}

TEST_CASE("diagnostics dump") {
    auto spec = spec_for(1, 1, kPi);
    std::vector<double> one{1.0}, zero{0.0};
    std::vector<ModalSolution> sols{solve_modal(assemble(spec, 1, 1.0, one, zero))};
    std::ostringstream out;
    write_modal_diagnostics(out, sols);
    CHECK(out.str().rfind("k,lambda,det_scaled,condition\n1,1,", 0) == 0);
}
