#include "mixedpde/modal_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "mixedpde/errors.hpp"

namespace mixedpde {

namespace {

constexpr double kPi = std::numbers::pi;

void require_even(int n) {
    if (n < 2 || n % 2 != 0) throw Error("block closed forms are available for even n only");
}

}  // namespace

double ModalSystem::log_row_scale_sum() const {
    double acc = 0.0;
    for (int o : row_orders) acc += o * std::log(rho);
    return acc;
}

double ModalSystem::log_column_scale_sum() const {
    double acc = 0.0;
    for (double v : log_column_scales) acc += v;
    return acc;
}

double ModalSystem::log_abs_unscaled_det() const {
    return std::log(std::abs(det_scaled)) + log_row_scale_sum() + log_column_scale_sum();
}

double ModalSystem::hadamard_bound() const {
    double acc = 1.0;
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) acc *= matrix.row(i).norm();
    return acc;
}

ModalSystem assemble(const ProblemSpec& spec, int k, double lambda, std::span<const double> phi_k,
                     std::span<const double> psi_k) {
    const int n = spec.n;
    if (static_cast<int>(phi_k.size()) != n || static_cast<int>(psi_k.size()) != n)
        throw ValidationError("assemble needs n coefficients for each boundary");
    ModalSystem sys{
        k,
        lambda,
        n,
        0.0,
        fundamental_system(characteristic_roots(n, lambda, Region::Upper), spec.a),
        fundamental_system(characteristic_roots(n, lambda, Region::Lower), spec.a),
        Eigen::MatrixXd::Zero(4 * n, 4 * n),
        Eigen::VectorXd::Zero(4 * n),
        {},
        {},
        0.0,
    };
    sys.rho = sys.upper.roots().rho;
    const int half = 2 * n;
    for (int i = 0; i < half; ++i) sys.log_column_scales.push_back(sys.upper.function(i).log_scale());
    for (int i = 0; i < half; ++i) sys.log_column_scales.push_back(sys.lower.function(i).log_scale());

    for (int r = 0; r < n; ++r) {
        const int order = spec.upper_order(r);
        sys.row_orders.push_back(order);
        for (int i = 0; i < half; ++i) sys.matrix(r, i) = sys.upper.normalized(i, spec.a, order);
        sys.rhs(r) = std::pow(sys.rho, -order) * psi_k[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < n; ++r) {
        const int order = spec.lower_order(r);
        sys.row_orders.push_back(order);
        for (int i = 0; i < half; ++i) sys.matrix(n + r, half + i) = sys.lower.normalized(i, -spec.a, order);
        sys.rhs(n + r) = std::pow(sys.rho, -order) * phi_k[static_cast<std::size_t>(r)];
    }
    for (int l = 0; l < half; ++l) {
        sys.row_orders.push_back(l);
        for (int i = 0; i < half; ++i) {
            sys.matrix(half + l, i) = sys.upper.normalized(i, 0.0, l);
            sys.matrix(half + l, half + i) = -sys.lower.normalized(i, 0.0, l);
        }
    }
    sys.det_scaled = sys.matrix.partialPivLu().determinant();
    return sys;
}

ModalSystem assemble(const ProblemSpec& spec, const EigenPair& mode, std::span<const double> phi_k,
                     std::span<const double> psi_k) {
    return assemble(spec, mode.k, mode.lambda, phi_k, psi_k);
}

double scaled_determinant(const ModalSystem& sys) { return sys.matrix.partialPivLu().determinant(); }

ModalSolution::ModalSolution(const ModalSystem& sys, Eigen::VectorXd coefficients, double condition)
    : k_(sys.k),
      lambda_(sys.lambda),
      n_(sys.n),
      rho_(sys.rho),
      det_scaled_(sys.det_scaled),
      condition_(condition),
      upper_(sys.upper),
      lower_(sys.lower),
      coef_(std::move(coefficients)) {}

ModalSolution ModalSolution::zero(const ModalSystem& sys) {
    return ModalSolution(sys, Eigen::VectorXd::Zero(4 * sys.n), std::numeric_limits<double>::infinity());
}

ModalSolution ModalSolution::with_offset(int index, double delta) const {
    ModalSolution out = *this;
    out.coef_(index) += delta;
    return out;
}

double ModalSolution::eval(double y, int j, Region side) const {
    const FundamentalSystem& fs = system(side);
    const int offset = side == Region::Upper ? 0 : 2 * n_;
    double acc = 0.0;
    for (int i = 0; i < fs.size(); ++i) {
        const double c = coef_(offset + i);
        if (c != 0.0) acc += c * fs.normalized(i, y, j);
    }
    return std::pow(rho_, j) * acc;
}

double ModalSolution::eval(double y, int j) const { return eval(y, j, y < 0.0 ? Region::Lower : Region::Upper); }

ModalSolution solve_modal(const ModalSystem& sys, double tol_singular) {
    if (!(std::abs(sys.det_scaled) >= tol_singular * sys.hadamard_bound())) throw SingularMode(sys.k, sys.det_scaled);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
    Eigen::VectorXd x = lu.solve(sys.rhs);
    const Eigen::VectorXd r = sys.rhs - sys.matrix * x;
    x += lu.solve(r);
    return ModalSolution(sys, std::move(x), 1.0 / lu.rcond());
}

double modal_ode_residual(const ModalSolution& sol, std::span<const double> ys) {
    const int n = sol.n();
    const double sign_n = (n % 2) ? -1.0 : 1.0;
    double ymax = 0.0, worst = 0.0;
    for (double y : ys) ymax = std::max(ymax, std::abs(sol.eval(y, 0)));
    if (ymax == 0.0) return 0.0;
    for (double y : ys) {
        const double sgn = y < 0.0 ? -1.0 : 1.0;
        const double r = sol.eval(y, 2 * n) + sgn * sign_n * sol.lambda() * sol.eval(y, 0);
        worst = std::max(worst, std::abs(r));
    }
    return worst / (sol.lambda() * ymax);
}

Eigen::MatrixXd upper_growth_block(int n, double lambda, double a, int chi, int delta) {
    require_even(n);
    const auto fs = fundamental_system(characteristic_roots(n, lambda, Region::Upper), 0.0);
    Eigen::MatrixXd block(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) block(j, i) = fs.normalized(i, a, chi + delta * j);
    return block;
}

double upper_growth_block_det_closed_form(int n, double lambda, double a, int delta) {
    require_even(n);
    const auto roots = characteristic_roots(n, lambda, Region::Upper);
    const int m = n / 2;
    double alpha_sum = 0.0, prod = 1.0;
    for (int j = 0; j < m; ++j) {
        alpha_sum += roots.alpha[static_cast<std::size_t>(j)];
        prod *= std::sin(delta * roots.angles[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < m; ++j)
        for (int s = 0; s < j; ++s) {
            const double tj = roots.angles[static_cast<std::size_t>(j)], ts = roots.angles[static_cast<std::size_t>(s)];
            prod *= 4.0 * (1.0 - std::cos(delta * (tj - ts))) * (1.0 - std::cos(delta * (tj + ts)));
        }
    return std::exp(2.0 * alpha_sum * a) * prod;
}

Eigen::MatrixXcd lower_growth_block(int n, double lambda, double a, int q, int gamma) {
    require_even(n);
    const auto roots = characteristic_roots(n, lambda, Region::Lower);
    const int m = n / 2;
    const double rho = roots.rho;
    Eigen::MatrixXcd block(n, n);
    for (int j = 0; j < n; ++j) {
        const int order = q + gamma * j;
        int col = 0;
        for (int r = m + 1; r <= 2 * m - 1; ++r) {
            const double sigma = roots.angles[static_cast<std::size_t>(r)];
            const double tau = -rho * std::sin(sigma) * a + order * sigma;
            const double env = std::exp(-rho * std::cos(sigma) * a);
            block(j, col++) = env * std::cos(tau);
            block(j, col++) = env * std::sin(tau);
        }
        block(j, col++) = ((order % 2) ? -1.0 : 1.0) * std::exp(rho * a);
        const double tau_mid = -rho * a + order * kPi / 2;
        block(j, col) = std::polar(1.0, tau_mid);
    }
    return block;
}

std::complex<double> lower_growth_block_det_closed_form(int n, double lambda, double a, int q, int gamma) {
    require_even(n);
    using cd = std::complex<double>;
    const auto roots = characteristic_roots(n, lambda, Region::Lower);
    const int m = n / 2;
    const double rho = roots.rho;
    const cd I(0.0, 1.0);

    double mu = 0.0;
    for (int r = m + 1; r <= 2 * m - 1; ++r) mu += roots.alpha[static_cast<std::size_t>(r)];

    const int size = 2 * m - 1;
    Eigen::MatrixXcd M1(size, size);
    for (int j = 0; j < size; ++j) {
        int col = 0;
        for (int r = m + 1; r <= 2 * m - 1; ++r) {
            const double sigma = roots.angles[static_cast<std::size_t>(r)];
            M1(j, col++) = std::polar(1.0, gamma * j * sigma);
            M1(j, col++) = std::polar(1.0, -gamma * j * sigma);
        }
        M1(j, col) = ((gamma * j) % 2) ? -1.0 : 1.0;
    }
    cd prod = 1.0;
    const cd ig = std::pow(I, gamma);
    const double mg = (gamma % 2) ? -1.0 : 1.0;
    for (int r = m + 1; r <= 2 * m - 1; ++r)
        prod *= mg + 1.0 - 2.0 * ig * std::cos(gamma * roots.angles[static_cast<std::size_t>(r)]);
    return std::exp(-2.0 * a * mu + rho * a) * std::polar(1.0, -rho * a) * std::pow(I / 2.0, m - 1) *
           std::pow(-I, q) * M1.determinant() * (ig - mg) * prod;
}

void write_modal_diagnostics(std::ostream& out, std::span<const ModalSolution> modes) {
    out.precision(17);
    out << "k,lambda,det_scaled,condition\n";
    for (const auto& m : modes) out << m.k() << ',' << m.lambda() << ',' << m.det_scaled() << ',' << m.condition() << '\n';
}

}  // namespace mixedpde
