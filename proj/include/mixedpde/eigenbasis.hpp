#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mixedpde/problem.hpp"

namespace mixedpde {

struct EigenPair {
    int k = 0;
    double lambda = 0.0;
    double norm = 1.0;  // quadrature norm of X_k
};

/// The first K eigenpairs of l(X) = lambda X, X^(2j)(0) = X^(2j)(pi) = 0.
///
/// Every eigenfunction is stored as a finite sine series
///   X_k(x) = sum_j V(j-1, k-1) sqrt(2/pi) sin(j x),
/// which satisfies the boundary conditions identically and gives closed-form
/// derivatives of any order. The model case p0 = 0 has V = identity.
class EigenBasis {
public:
    EigenBasis(int s, BoundaryFunction p0, std::vector<double> lambdas, Eigen::MatrixXd sine_coefficients,
               bool model, int quadrature_intervals);

    int size() const { return static_cast<int>(pairs_.size()); }
    int s() const { return s_; }
    bool is_model() const { return model_; }
    const BoundaryFunction& p0() const { return p0_; }

    const std::vector<EigenPair>& pairs() const { return pairs_; }
    /// 1-based.
    double lambda(int k) const { return pairs_[static_cast<std::size_t>(k - 1)].lambda; }
    std::vector<double> lambdas() const;

    int sine_modes() const { return static_cast<int>(coef_.rows()); }
    const Eigen::MatrixXd& sine_coefficients() const { return coef_; }

    /// X_k^(d)(x), k 1-based.
    double value(int k, double x, int d = 0) const;
    /// X_k^(d)(x) for k = 1..K.
    Eigen::VectorXd values(double x, int d = 0) const;
    /// l(X_k)(x) = (-1)^s X_k^(2s)(x) + p0(x) X_k(x) for k = 1..K, term by term.
    Eigen::VectorXd operator_values(double x) const;

    /// Composite Simpson grid on [0, pi].
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    /// X_k at the quadrature nodes, (nodes x K).
    const Eigen::MatrixXd& samples() const { return samples_; }

    /// f_k = integral of f X_k over [0, pi] by the quadrature.
    std::vector<double> expand(const std::function<double(double)>& f) const;
    std::vector<double> expand(const BoundaryFunction& f) const;

    /// max |<X_j, X_k> - delta_jk| under the quadrature.
    double orthonormality_error() const;

private:
    int s_;
    BoundaryFunction p0_;
    bool model_;
    Eigen::MatrixXd coef_;
    std::vector<EigenPair> pairs_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    Eigen::MatrixXd samples_;
};

/// Closed form for p0 = 0: lambda_k = k^(2s), X_k = sqrt(2/pi) sin(kx).
EigenBasis model_eigenpairs(int s, int K);

/// Sine-Galerkin discretization of l with grid_size quadrature intervals and
/// grid_size/4 sine modes, accepted only if K <= grid_size/8 and every
/// lambda_k, k <= K, moves by at most rel_tol when the grid is doubled.
/// The returned basis is the doubled one.
EigenBasis numeric_eigenpairs(int s, const BoundaryFunction& p0, int K, int grid_size, double rel_tol = 1e-6);
EigenBasis numeric_eigenpairs(const ProblemSpec& spec, int K, int grid_size, double rel_tol = 1e-6);

/// Model basis when p0 is the literal zero, numeric otherwise.
EigenBasis make_basis(const ProblemSpec& spec, int K, int grid_size = 0);

/// Default grid for numeric_eigenpairs.
int default_grid_size(int K);

struct AsymptoteReport {
    int b = 1;
    int n = 1;
    std::vector<double> deviation;  // |lambda_k^(1/2n) - k^b|, index k-1
    double max_deviation = 0.0;
    double head_max = 0.0;  // over the first half of the modes
    double tail_max = 0.0;  // over the second half
    bool decaying = true;
    /// Least-squares slope of log deviation against log k on the second
    /// half; NaN when the deviations vanish.
    double decay_rate = 0.0;
};

AsymptoteReport asymptote_check(const EigenBasis& basis, int b);

/// S_K(x) = sum_{k <= K} X_k(x)^2 / lambda_k for K = 1..size.
std::vector<double> mercer_partial_sums(const EigenBasis& basis, double x);

/// Columns: k, lambda_k, then X_k at the quadrature nodes when with_samples.
void export_csv(std::ostream& out, const EigenBasis& basis, bool with_samples);

}  // namespace mixedpde
