#include "mixedpde/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "mixedpde/errors.hpp"

namespace mixedpde {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNorm = std::sqrt(2.0 / kPi);

// d-th derivative of sin(t) evaluated through the phase shift d*pi/2.
double sin_derivative(double t, int d) {
    switch (d % 4) {
        case 0: return std::sin(t);
        case 1: return std::cos(t);
        case 2: return -std::sin(t);
        default: return -std::cos(t);
    }
}

void simpson_grid(int intervals, std::vector<double>& nodes, std::vector<double>& weights) {
    const double h = kPi / intervals;
    nodes.resize(static_cast<std::size_t>(intervals + 1));
    weights.resize(nodes.size());
    for (int i = 0; i <= intervals; ++i) {
        nodes[static_cast<std::size_t>(i)] = i * h;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        weights[static_cast<std::size_t>(i)] = w * h / 3.0;
    }
}

int round_up_even(int v) { return v % 2 ? v + 1 : v; }

struct GalerkinResult {
    std::vector<double> lambdas;
    Eigen::MatrixXd vectors;  // N x K
};

// Integrals of p0(x) cos(m x) over [0, pi], m = 0..max_m, by the trapezoid rule.
std::vector<double> cosine_moments(const BoundaryFunction& p0, int max_m) {
    const int M = std::max(8192, 8 * max_m);
    const double h = kPi / M;
    std::vector<double> c(static_cast<std::size_t>(max_m + 1), 0.0);
    for (int i = 0; i <= M; ++i) {
        const double x = i * h;
        const double w = (i == 0 || i == M) ? 0.5 * h : h;
        const double f = w * p0(x);
        const double c1 = std::cos(x);
        double prev = 1.0, cur = c1;
        c[0] += f;
        if (max_m >= 1) c[1] += f * c1;
        for (int m = 2; m <= max_m; ++m) {
            const double next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
            c[static_cast<std::size_t>(m)] += f * cur;
        }
    }
    return c;
}

GalerkinResult galerkin_solve(int s, const BoundaryFunction& p0, int K, int N) {
    const auto c = cosine_moments(p0, 2 * N);
    Eigen::MatrixXd A(N, N);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j)
            A(i - 1, j - 1) = (c[static_cast<std::size_t>(std::abs(i - j))] - c[static_cast<std::size_t>(i + j)]) / kPi;
    for (int j = 1; j <= N; ++j) A(j - 1, j - 1) += std::pow(static_cast<double>(j), 2 * s);

    // Graded SPD matrix: Cholesky followed by one-sided Jacobi keeps the small
    // eigenvalues relatively accurate even when the diagonal spans many decades.
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw Error("discrete operator is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();

    GalerkinResult r;
    r.vectors.resize(N, K);
    for (int k = 0; k < K; ++k) {
        const int col = N - 1 - k;
        r.lambdas.push_back(sv(col) * sv(col));
        Eigen::VectorXd v = svd.matrixU().col(col);
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0) v = -v;
        r.vectors.col(k) = v;
    }
    return r;
}

}  // namespace

EigenBasis::EigenBasis(int s, BoundaryFunction p0, std::vector<double> lambdas, Eigen::MatrixXd sine_coefficients,
                       bool model, int quadrature_intervals)
    : s_(s), p0_(std::move(p0)), model_(model), coef_(std::move(sine_coefficients)) {
    simpson_grid(round_up_even(quadrature_intervals), nodes_, weights_);
    const int K = static_cast<int>(lambdas.size());
    samples_.resize(static_cast<Eigen::Index>(nodes_.size()), K);
    for (std::size_t i = 0; i < nodes_.size(); ++i) samples_.row(static_cast<Eigen::Index>(i)) = values(nodes_[i], 0);
    Eigen::VectorXd norms = (samples_.array().square().colwise() *
                             Eigen::Map<const Eigen::VectorXd>(weights_.data(), static_cast<Eigen::Index>(weights_.size())).array())
                                .colwise()
                                .sum()
                                .sqrt()
                                .transpose();
    for (int k = 1; k <= K; ++k) pairs_.push_back({k, lambdas[static_cast<std::size_t>(k - 1)], norms(k - 1)});
}

std::vector<double> EigenBasis::lambdas() const {
    std::vector<double> out;
    for (const auto& p : pairs_) out.push_back(p.lambda);
    return out;
}

double EigenBasis::value(int k, double x, int d) const {
    if (model_) return kNorm * std::pow(static_cast<double>(k), d) * sin_derivative(k * x, d);
    double acc = 0.0;
    for (int j = 1; j <= coef_.rows(); ++j)
        acc += coef_(j - 1, k - 1) * std::pow(static_cast<double>(j), d) * sin_derivative(j * x, d);
    return kNorm * acc;
}

Eigen::VectorXd EigenBasis::values(double x, int d) const {
    const int N = static_cast<int>(coef_.rows());
    Eigen::VectorXd t(N);
    for (int j = 1; j <= N; ++j) t(j - 1) = kNorm * std::pow(static_cast<double>(j), d) * sin_derivative(j * x, d);
    if (model_) return t.head(coef_.cols());
    return coef_.transpose() * t;
}

Eigen::VectorXd EigenBasis::operator_values(double x) const {
    const double sign = (s_ % 2) ? -1.0 : 1.0;
    Eigen::VectorXd out = sign * values(x, 2 * s_);
    if (!p0_.is_identically_zero()) out += p0_(x) * values(x, 0);
    return out;
}

std::vector<double> EigenBasis::expand(const std::function<double(double)>& f) const {
    Eigen::VectorXd fw(static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t i = 0; i < nodes_.size(); ++i) fw(static_cast<Eigen::Index>(i)) = weights_[i] * f(nodes_[i]);
    const Eigen::VectorXd c = samples_.transpose() * fw;
    return {c.data(), c.data() + c.size()};
}

std::vector<double> EigenBasis::expand(const BoundaryFunction& f) const {
    return expand([&f](double x) { return f(x); });
}

double EigenBasis::orthonormality_error() const {
    const Eigen::Map<const Eigen::VectorXd> w(weights_.data(), static_cast<Eigen::Index>(weights_.size()));
    const Eigen::MatrixXd gram = samples_.transpose() * w.asDiagonal() * samples_;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

EigenBasis model_eigenpairs(int s, int K) {
    if (s < 1 || K < 1) throw ValidationError("model_eigenpairs needs s >= 1 and K >= 1");
    std::vector<double> lambdas;
    for (int k = 1; k <= K; ++k) lambdas.push_back(std::pow(static_cast<double>(k), 2 * s));
    return EigenBasis(s, BoundaryFunction(Expression::constant(0.0)), std::move(lambdas),
                      Eigen::MatrixXd::Identity(K, K), true, std::max(1024, 8 * K));
}

int default_grid_size(int K) { return std::max(128, 8 * K); }

EigenBasis numeric_eigenpairs(int s, const BoundaryFunction& p0, int K, int grid_size, double rel_tol) {
    if (s < 1 || K < 1) throw ValidationError("numeric_eigenpairs needs s >= 1 and K >= 1");
    if (K > grid_size / 8)
        throw DiscretizationTooCoarse(K, "mode count exceeds grid_size/8 = " + std::to_string(grid_size / 8));
    const int coarse_modes = grid_size / 4;
    const auto coarse = galerkin_solve(s, p0, K, coarse_modes);
    const auto fine = galerkin_solve(s, p0, K, 2 * coarse_modes);
    for (int k = 0; k < K; ++k) {
        const double a = coarse.lambdas[static_cast<std::size_t>(k)];
        const double b = fine.lambdas[static_cast<std::size_t>(k)];
        if (std::abs(a - b) > rel_tol * std::abs(b))
            throw DiscretizationTooCoarse(k + 1, "eigenvalue moved from " + std::to_string(a) + " to " +
                                                     std::to_string(b) + " under grid doubling");
        if (!(b > 0.0)) throw DiscretizationTooCoarse(k + 1, "nonpositive eigenvalue");
        if (k > 0 && !(b > fine.lambdas[static_cast<std::size_t>(k - 1)]))
            throw DiscretizationTooCoarse(k + 1, "eigenvalues not strictly increasing");
    }
    return EigenBasis(s, p0, fine.lambdas, fine.vectors, false, std::max(1024, 2 * grid_size));
}

EigenBasis numeric_eigenpairs(const ProblemSpec& spec, int K, int grid_size, double rel_tol) {
    return numeric_eigenpairs(spec.s, spec.p0, K, grid_size, rel_tol);
}

EigenBasis make_basis(const ProblemSpec& spec, int K, int grid_size) {
    if (spec.p0.is_identically_zero()) return model_eigenpairs(spec.s, K);
    return numeric_eigenpairs(spec, K, grid_size > 0 ? grid_size : default_grid_size(K));
}

AsymptoteReport asymptote_check(const EigenBasis& basis, int b) {
    AsymptoteReport r;
    r.b = b;
    r.n = basis.s() / b;
    const int K = basis.size();
    for (int k = 1; k <= K; ++k) {
        const double root = std::pow(basis.lambda(k), 1.0 / (2.0 * r.n));
        r.deviation.push_back(std::abs(root - std::pow(static_cast<double>(k), b)));
    }
    const int half = K / 2;
    for (int k = 1; k <= K; ++k) {
        const double d = r.deviation[static_cast<std::size_t>(k - 1)];
        r.max_deviation = std::max(r.max_deviation, d);
        if (k <= half) r.head_max = std::max(r.head_max, d);
        else r.tail_max = std::max(r.tail_max, d);
    }
    r.decaying = r.tail_max <= r.head_max;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = half + 1; k <= K; ++k) {
        const double d = r.deviation[static_cast<std::size_t>(k - 1)];
        if (!(d > 0.0)) continue;
        const double lx = std::log(static_cast<double>(k)), ly = std::log(d);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++cnt;
    }
    r.decay_rate = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : std::nan("");
    return r;
}

std::vector<double> mercer_partial_sums(const EigenBasis& basis, double x) {
    const Eigen::VectorXd v = basis.values(x, 0);
    std::vector<double> out;
    double acc = 0.0;
    for (int k = 1; k <= basis.size(); ++k) {
        acc += v(k - 1) * v(k - 1) / basis.lambda(k);
        out.push_back(acc);
    }
    return out;
}

void export_csv(std::ostream& out, const EigenBasis& basis, bool with_samples) {
    out.precision(17);
    out << "k,lambda";
    if (with_samples)
        for (std::size_t i = 0; i < basis.nodes().size(); ++i) out << ",x" << i;
    out << '\n';
    for (int k = 1; k <= basis.size(); ++k) {
        out << k << ',' << basis.lambda(k);
        if (with_samples)
            for (Eigen::Index i = 0; i < basis.samples().rows(); ++i) out << ',' << basis.samples()(i, k - 1);
        out << '\n';
    }
}

}  // namespace mixedpde
