#include "mixedpde/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixedpde/errors.hpp"
#include "mixedpde/finite_difference.hpp"

namespace mixedpde {

namespace {

constexpr double kPi = std::numbers::pi;

// rows: points, columns: used modes
Eigen::MatrixXd x_table(const SolutionField& field, const std::vector<double>& xs, int d) {
    const int K = field.used_modes();
    Eigen::MatrixXd t(static_cast<Eigen::Index>(xs.size()), K);
    for (std::size_t i = 0; i < xs.size(); ++i)
        t.row(static_cast<Eigen::Index>(i)) = field.basis().values(xs[i], d).head(K).transpose();
    return t;
}

Eigen::MatrixXd y_table(const SolutionField& field, const std::vector<double>& ys, int j, Region side) {
    const int K = field.used_modes();
    Eigen::MatrixXd t(static_cast<Eigen::Index>(ys.size()), K);
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (int k = 0; k < K; ++k) t(static_cast<Eigen::Index>(i), k) = field.modes()[static_cast<std::size_t>(k)].eval(ys[i], j, side);
    return t;
}

Eigen::MatrixXd y_table(const SolutionField& field, const std::vector<double>& ys, int j) {
    const int K = field.used_modes();
    Eigen::MatrixXd t(static_cast<Eigen::Index>(ys.size()), K);
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (int k = 0; k < K; ++k) t(static_cast<Eigen::Index>(i), k) = field.modes()[static_cast<std::size_t>(k)].eval(ys[i], j);
    return t;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return v;
}

double max_of(const std::vector<NamedError>& v) {
    double m = 0.0;
    for (const auto& e : v) m = std::max(m, e.error);
    return m;
}

}  // namespace

double BoundaryReport::max_boundary() const { return max_of(boundary_errors); }
double BoundaryReport::max_edge() const { return max_of(edge_errors); }
double BoundaryReport::max_matching() const {
    return matching_errors.empty() ? 0.0 : *std::max_element(matching_errors.begin(), matching_errors.end());
}

double ResidualReport::max_pde() const { return std::max(pde_residual_upper, pde_residual_lower); }
double ResidualReport::max_fd() const { return std::max(fd_residual_upper, fd_residual_lower); }

ResidualReport pde_residual(const SolutionField& field, int nx, int ny) {
    const auto& spec = field.spec();
    const int s = spec.s, n = spec.n;
    const int mid = (ny - 1) / 2;
    const int width_y = 2 * n + 4;
    if (nx < 5 || ny % 2 == 0 || mid + 1 < width_y)
        throw ValidationError("residual grid needs nx >= 5, odd ny, and " + std::to_string(width_y) +
                              " rows on each side of y = 0");

    ResidualReport rep;
    rep.nx = nx;
    rep.ny = ny;
    if (field.used_modes() == 0) return rep;

    const auto xs = linspace(0.0, kPi, nx);
    const auto ys = linspace(-spec.a, spec.a, ny);
    const double hx = kPi / (nx - 1);

    const Eigen::MatrixXd X0 = x_table(field, xs, 0);
    const Eigen::MatrixXd Y0 = y_table(field, ys, 0);
    const Eigen::MatrixXd U = Y0 * X0.transpose();  // ny x nx
    const double umax = U.cwiseAbs().maxCoeff();
    rep.normalization = field.modes().back().lambda() * umax;
    if (rep.normalization == 0.0) return rep;

    std::vector<double> p0(static_cast<std::size_t>(nx), 0.0);
    if (!spec.p0.is_identically_zero())
        for (int i = 0; i < nx; ++i) p0[static_cast<std::size_t>(i)] = spec.p0(xs[static_cast<std::size_t>(i)]);

    const double sign_s = (s % 2) ? -1.0 : 1.0;
    const double sign_n = (n % 2) ? -1.0 : 1.0;

    // closed-form route
    const Eigen::MatrixXd X2s = x_table(field, xs, 2 * s);
    const Eigen::MatrixXd Y2n = y_table(field, ys, 2 * n);
    const Eigen::MatrixXd Dx = Y0 * X2s.transpose();
    const Eigen::MatrixXd Dy = Y2n * X0.transpose();

    // finite-difference route
    const int half = s + 1;
    const auto cw = central_weights(2 * s, half);
    auto sample = [&](int j, int i) {
        if (i < 0) return -U(j, -i);
        if (i > nx - 1) return -U(j, 2 * (nx - 1) - i);
        return U(j, i);
    };
    std::vector<std::vector<double>> yw(static_cast<std::size_t>(ny));
    std::vector<int> ystart(static_cast<std::size_t>(ny), 0);
    for (int j = 0; j < ny; ++j) {
        if (j == mid) continue;
        const int lo = j < mid ? 0 : mid, hi = j < mid ? mid : ny - 1;
        const int start = std::clamp(j - width_y / 2, lo, hi - width_y + 1);
        std::vector<double> nodes(ys.begin() + start, ys.begin() + start + width_y);
        yw[static_cast<std::size_t>(j)] = fd_weights(ys[static_cast<std::size_t>(j)], nodes, 2 * n);
        ystart[static_cast<std::size_t>(j)] = start;
    }
    const double hx2s = std::pow(hx, 2 * s);

    for (int j = 0; j < ny; ++j) {
        if (j == mid) continue;
        const double sgn = j < mid ? -1.0 : 1.0;
        double worst_exact = 0.0, worst_fd = 0.0;
        for (int i = 1; i < nx - 1; ++i) {
            const double pu = p0[static_cast<std::size_t>(i)] * U(j, i);
            const double exact = sign_s * Dx(j, i) + pu + sign_n * sgn * Dy(j, i);
            double dx = 0.0;
            for (int m = -half; m <= half; ++m) dx += cw[static_cast<std::size_t>(m + half)] * sample(j, i + m);
            dx /= hx2s;
            double dy = 0.0;
            const auto& w = yw[static_cast<std::size_t>(j)];
            for (int m = 0; m < width_y; ++m) dy += w[static_cast<std::size_t>(m)] * U(ystart[static_cast<std::size_t>(j)] + m, i);
            const double fd = sign_s * dx + pu + sign_n * sgn * dy;
            worst_exact = std::max(worst_exact, std::abs(exact));
            worst_fd = std::max(worst_fd, std::abs(fd));
        }
        if (j < mid) {
            rep.pde_residual_lower = std::max(rep.pde_residual_lower, worst_exact / rep.normalization);
            rep.fd_residual_lower = std::max(rep.fd_residual_lower, worst_fd / rep.normalization);
        } else {
            rep.pde_residual_upper = std::max(rep.pde_residual_upper, worst_exact / rep.normalization);
            rep.fd_residual_upper = std::max(rep.fd_residual_upper, worst_fd / rep.normalization);
        }
    }
    return rep;
}

BoundaryReport boundary_check(const SolutionField& field, int nx) {
    const auto& spec = field.spec();
    BoundaryReport rep;
    rep.nx = nx;
    const auto xs = linspace(0.0, kPi, nx);
    const int K = field.used_modes();
    const Eigen::MatrixXd X0 = K > 0 ? x_table(field, xs, 0) : Eigen::MatrixXd::Zero(nx, 0);

    auto condition = [&](const std::string& label, const BoundaryFunction& f, double y, int order, Region side) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(nx);
        if (K > 0) u = X0 * y_table(field, {y}, order, side).row(0).transpose();
        double worst = 0.0;
        for (int i = 0; i < nx; ++i) worst = std::max(worst, std::abs(u(i) - f(xs[static_cast<std::size_t>(i)])));
        rep.boundary_errors.push_back({label, worst});
    };
    for (int r = 0; r < spec.n; ++r) {
        const int o = spec.lower_order(r);
        condition("phi_" + std::to_string(r) + ": D_y^" + std::to_string(o) + " u(x,-a)", spec.phi[static_cast<std::size_t>(r)],
                  -spec.a, o, Region::Lower);
    }
    for (int r = 0; r < spec.n; ++r) {
        const int o = spec.upper_order(r);
        condition("psi_" + std::to_string(r) + ": D_y^" + std::to_string(o) + " u(x,a)", spec.psi[static_cast<std::size_t>(r)],
                  spec.a, o, Region::Upper);
    }

    const auto ys = linspace(-spec.a, spec.a, nx);
    const Eigen::MatrixXd Y0 = K > 0 ? y_table(field, ys, 0) : Eigen::MatrixXd::Zero(nx, 0);
    for (int m = 0; m < spec.s; ++m)
        for (double x : {0.0, kPi}) {
            double worst = 0.0;
            if (K > 0) {
                const Eigen::VectorXd Xd = field.basis().values(x, 2 * m).head(K);
                worst = (Y0 * Xd).cwiseAbs().maxCoeff();
            }
            rep.edge_errors.push_back({"D_x^" + std::to_string(2 * m) + " u(" + (x == 0.0 ? "0" : "pi") + ",y)", worst});
        }

    for (int j = 0; j < 2 * spec.n; ++j) {
        double worst = 0.0;
        if (K > 0) {
            const Eigen::VectorXd up = y_table(field, {0.0}, j, Region::Upper).row(0).transpose();
            const Eigen::VectorXd lo = y_table(field, {0.0}, j, Region::Lower).row(0).transpose();
            worst = (X0 * (up - lo)).cwiseAbs().maxCoeff();
        }
        rep.matching_errors.push_back(worst);
    }
    return rep;
}

ResidualReport verify(const SolutionField& field, int nx, int ny) {
    auto rep = pde_residual(field, nx, ny);
    rep.boundary = boundary_check(field, nx);
    return rep;
}

namespace {

struct ReducedMode {
    double a_scaled = 0.0;  // coefficient of e^{rho (y - a)}
    double b = 0.0;         // coefficient of e^{-rho y}
    double det = 0.0;
};

// n = s = 1: Y = A e^{rho y} + B e^{-rho y} above, (A + B) cos rho y + (A - B) sin rho y below.
ReducedMode reduced_mode(const ProblemSpec& spec, double rho, double phi, double psi) {
    const double e = std::exp(-rho * spec.a);
    const double tau = -rho * spec.a + spec.q * kPi / 2;
    const double m11 = 1.0, m12 = (spec.chi % 2 ? -1.0 : 1.0) * e;
    const double m21 = e * (std::cos(tau) + std::sin(tau)), m22 = std::cos(tau) - std::sin(tau);
    const double r1 = psi / std::pow(rho, spec.chi), r2 = phi / std::pow(rho, spec.q);
    ReducedMode out;
    out.det = m11 * m22 - m12 * m21;
    out.a_scaled = (r1 * m22 - m12 * r2) / out.det;
    out.b = (m11 * r2 - m21 * r1) / out.det;
    return out;
}

void require_first_order(const SolutionField& field) {
    if (field.spec().n != 1 || field.spec().s != 1)
        throw OracleUnavailable("the reduced closed form exists only for n = s = 1");
}

}  // namespace

namespace {

Eigen::MatrixXd oracle_y_table(const SolutionField& field, const std::vector<double>& ys) {
    const auto& spec = field.spec();
    const int K = field.used_modes();
    const int ny = static_cast<int>(ys.size());
    Eigen::MatrixXd Yo = Eigen::MatrixXd::Zero(ny, K);
    for (int k = 1; k <= K; ++k) {
        const auto& rec = field.records()[static_cast<std::size_t>(k - 1)];
        if (rec.singular) continue;
        const double rho = std::sqrt(rec.lambda);
        const auto m = reduced_mode(spec, rho, field.expansion().phi(0, k - 1), field.expansion().psi(0, k - 1));
        const double A = m.a_scaled * std::exp(-rho * spec.a);
        for (int j = 0; j < ny; ++j) {
            const double y = ys[static_cast<std::size_t>(j)];
            Yo(j, k - 1) = y >= 0.0 ? m.a_scaled * std::exp(rho * (y - spec.a)) + m.b * std::exp(-rho * y)
                                    : (A + m.b) * std::cos(rho * y) + (A - m.b) * std::sin(rho * y);
        }
    }
    return Yo;
}

}  // namespace

double oracle_compare(const SolutionField& field, int nx, int ny) {
    require_first_order(field);
    const auto& spec = field.spec();
    if (field.used_modes() == 0) return 0.0;
    const auto xs = linspace(0.0, kPi, nx);
    const auto ys = linspace(-spec.a, spec.a, ny);
    const Eigen::MatrixXd X0 = x_table(field, xs, 0);
    const Eigen::MatrixXd oracle = oracle_y_table(field, ys) * X0.transpose();
    const Eigen::MatrixXd computed = y_table(field, ys, 0) * X0.transpose();
    const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
    return (computed - oracle).cwiseAbs().maxCoeff() / scale;
}

std::vector<double> oracle_mode_deviations(const SolutionField& field, int ny) {
    require_first_order(field);
    const auto ys = linspace(-field.spec().a, field.spec().a, ny);
    const Eigen::MatrixXd oracle = oracle_y_table(field, ys);
    const Eigen::MatrixXd computed = y_table(field, ys, 0);
    std::vector<double> out;
    for (int k = 0; k < oracle.cols(); ++k) {
        const double scale = std::max(1.0, oracle.col(k).cwiseAbs().maxCoeff());
        out.push_back((computed.col(k) - oracle.col(k)).cwiseAbs().maxCoeff() / scale);
    }
    return out;
}

std::vector<double> determinant_ratios(const SolutionField& field) {
    require_first_order(field);
    std::vector<double> out;
    for (const auto& rec : field.records()) {
        const auto m = reduced_mode(field.spec(), std::sqrt(rec.lambda), 0.0, 0.0);
        out.push_back(rec.det_scaled / m.det);
    }
    return out;
}

nlohmann::json to_json(const BoundaryReport& r) {
    nlohmann::json boundary = nlohmann::json::array(), edges = nlohmann::json::array();
    for (const auto& e : r.boundary_errors) boundary.push_back({{"condition", e.label}, {"error", e.error}});
    for (const auto& e : r.edge_errors) edges.push_back({{"condition", e.label}, {"error", e.error}});
    return {{"nx", r.nx}, {"boundary_errors", boundary}, {"edge_errors", edges}, {"matching_errors", r.matching_errors}};
}

nlohmann::json to_json(const ResidualReport& r) {
    return {{"grid", {r.nx, r.ny}},
            {"normalization", r.normalization},
            {"pde_residual_upper", r.pde_residual_upper},
            {"pde_residual_lower", r.pde_residual_lower},
            {"fd_residual_upper", r.fd_residual_upper},
            {"fd_residual_lower", r.fd_residual_lower},
            {"boundary", to_json(r.boundary)}};
}

}  // namespace mixedpde
