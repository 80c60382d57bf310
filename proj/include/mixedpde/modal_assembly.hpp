#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mixedpde/eigenbasis.hpp"
#include "mixedpde/modal_roots.hpp"
#include "mixedpde/problem.hpp"

namespace mixedpde {

/// The 4n x 4n boundary/matching system for one mode, with every column
/// divided by its exponential envelope and every row by rho^order.
///
/// Columns: the 2n upper solutions, then the 2n lower solutions, each in
/// family order (cos before sin). Rows: n conditions at y = +a (orders
/// chi + delta r), n conditions at y = -a (orders q + gamma r), then 2n
/// matching rows at y = 0 (orders 0..2n-1, upper minus lower).
struct ModalSystem {
    int k = 0;
    double lambda = 0.0;
    int n = 1;
    double rho = 0.0;
    FundamentalSystem upper;
    FundamentalSystem lower;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
    std::vector<int> row_orders;
    std::vector<double> log_column_scales;  // alpha * y0 per column
    double det_scaled = 0.0;

    /// log of the row factors rho^order.
    double log_row_scale_sum() const;
    double log_column_scale_sum() const;
    /// log |det| of the unscaled system.
    double log_abs_unscaled_det() const;
    /// Product of the Euclidean row norms of the scaled matrix.
    double hadamard_bound() const;
};

ModalSystem assemble(const ProblemSpec& spec, int k, double lambda, std::span<const double> phi_k,
                     std::span<const double> psi_k);
ModalSystem assemble(const ProblemSpec& spec, const EigenPair& mode, std::span<const double> phi_k,
                     std::span<const double> psi_k);

double scaled_determinant(const ModalSystem& sys);

/// Solved mode: Y(y) = sum_i x_i rho^j e^(alpha_i (y - y0_i)) trig_i(...).
class ModalSolution {
public:
    ModalSolution() = default;
    ModalSolution(const ModalSystem& sys, Eigen::VectorXd coefficients, double condition);

    int k() const { return k_; }
    double lambda() const { return lambda_; }
    int n() const { return n_; }
    double det_scaled() const { return det_scaled_; }
    /// Reciprocal condition estimate of the scaled matrix, inverted.
    double condition() const { return condition_; }
    const Eigen::VectorXd& coefficients() const { return coef_; }
    const FundamentalSystem& system(Region side) const { return side == Region::Upper ? upper_ : lower_; }

    /// Y^(j)(y) on the given side of y = 0.
    double eval(double y, int j, Region side) const;
    /// Side chosen by the sign of y; y = 0 uses the upper side.
    double eval(double y, int j) const;

    /// A zero mode for skipped singular modes.
    static ModalSolution zero(const ModalSystem& sys);

    /// Copy with coefficient index shifted by delta.
    ModalSolution with_offset(int index, double delta) const;

private:
    int k_ = 0;
    double lambda_ = 0.0;
    int n_ = 1;
    double rho_ = 0.0;
    double det_scaled_ = 0.0;
    double condition_ = 0.0;
    FundamentalSystem upper_{RootSet{}, 0.0};
    FundamentalSystem lower_{RootSet{}, 0.0};
    Eigen::VectorXd coef_;
};

inline constexpr double kDefaultSingularTolerance = 1e-10;

/// Pivoted LU solve with one refinement step. Throws SingularMode when
/// |det_scaled| < tol_singular * hadamard_bound().
ModalSolution solve_modal(const ModalSystem& sys, double tol_singular = kDefaultSingularTolerance);

/// max over ys of |Y^(2n) + sgn(y) (-1)^n lambda Y| / (lambda max|Y|).
double modal_ode_residual(const ModalSolution& sol, std::span<const double> ys);

/// Block of the y = +a rows against the growing upper columns, entries
/// e^(alpha a) cos/sin(beta a + (chi + delta j) angle), for even n.
Eigen::MatrixXd upper_growth_block(int n, double lambda, double a, int chi, int delta);
/// e^(2 a sum alpha) prod sin(delta theta_j) prod 4 (1 - cos delta(theta_j - theta_s)) (1 - cos delta(theta_j + theta_s)).
double upper_growth_block_det_closed_form(int n, double lambda, double a, int delta);

/// Complex block of the y = -a rows against the decaying-at-(-a) lower
/// columns and the e^(i tau) column of the imaginary pair, for even n.
Eigen::MatrixXcd lower_growth_block(int n, double lambda, double a, int q, int gamma);
std::complex<double> lower_growth_block_det_closed_form(int n, double lambda, double a, int q, int gamma);

/// Columns: k, lambda, det_scaled, condition.
void write_modal_diagnostics(std::ostream& out, std::span<const ModalSolution> modes);

}  // namespace mixedpde
