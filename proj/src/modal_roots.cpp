#include "mixedpde/modal_roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "mixedpde/errors.hpp"

namespace mixedpde {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* region_name(Region r) { return r == Region::Upper ? "upper" : "lower"; }

double RootSet::rhs() const {
    const bool odd = n % 2 != 0;
    const bool positive = (region == Region::Upper) ? odd : !odd;
    return positive ? lambda : -lambda;
}

bool RootSet::is_real(std::size_t family) const {
    const double t = angles[family];
    return t == 0.0 || t == kPi;
}

std::vector<std::complex<double>> RootSet::roots() const {
    std::vector<std::complex<double>> out;
    for (std::size_t r = 0; r < angles.size(); ++r) {
        out.push_back(std::polar(rho, angles[r]));
        if (!is_real(r)) out.push_back(std::polar(rho, -angles[r]));
    }
    return out;
}

RootSet characteristic_roots(int n, double lambda, Region region) {
    if (n < 1) throw ValidationError("characteristic_roots needs n >= 1");
    if (!(lambda > 0.0)) throw ValidationError("characteristic_roots needs lambda > 0");
    RootSet rs;
    rs.n = n;
    rs.lambda = lambda;
    rs.rho = std::pow(lambda, 1.0 / (2.0 * n));
    rs.region = region;
    if (rs.rhs() > 0) {
        for (int r = 0; r <= n; ++r) rs.angles.push_back(r == n ? kPi : kPi * r / n);
    } else {
        for (int r = 0; r < n; ++r) rs.angles.push_back(kPi * (1 + 2 * r) / (2.0 * n));
    }
    for (double t : rs.angles) {
        // Exact zeros for the axis directions keep e^(rho y) and cos(rho y) clean.
        const double c = (t == kPi / 2) ? 0.0 : std::cos(t);
        const double s = (t == 0.0 || t == kPi) ? 0.0 : std::sin(t);
        rs.alpha.push_back(rs.rho * c);
        rs.beta.push_back(rs.rho * s);
    }
    return rs;
}

FundamentalSystem::FundamentalSystem(RootSet roots, double a) : roots_(std::move(roots)) {
    for (std::size_t r = 0; r < roots_.angles.size(); ++r) {
        BasisFunction f{roots_.angles[r], roots_.alpha[r], roots_.beta[r], false, 0.0};
        if (a > 0.0) {
            if (roots_.region == Region::Upper && f.alpha > 0.0) f.shift = a;
            if (roots_.region == Region::Lower && f.alpha < 0.0) f.shift = -a;
        }
        funcs_.push_back(f);
        if (!roots_.is_real(r)) {
            f.sine = true;
            funcs_.push_back(f);
        }
    }
}

double FundamentalSystem::normalized(int i, double y, int j) const {
    const auto& f = function(i);
    const double arg = f.beta * y + j * f.angle;
    return std::exp(f.alpha * (y - f.shift)) * (f.sine ? std::sin(arg) : std::cos(arg));
}

double FundamentalSystem::value(int i, double y, int j) const {
    return std::pow(roots_.rho, j) * std::exp(function(i).log_scale()) * normalized(i, y, j);
}

FundamentalSystem fundamental_system(const RootSet& roots, double a) { return FundamentalSystem(roots, a); }

double normalized_wronskian(const FundamentalSystem& fs, double y) {
    const FundamentalSystem plain(fs.roots(), 0.0);
    const int m = plain.size();
    Eigen::MatrixXd w(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) w(j, i) = plain.normalized(i, y, j);
    return w.determinant();
}

double ode_residual(const FundamentalSystem& fs, int i, double y) {
    const int n = fs.roots().n;
    const double sgn = fs.roots().region == Region::Upper ? 1.0 : -1.0;
    const double sign_n = (n % 2) ? -1.0 : 1.0;
    // Y^(2n) = lambda e^(...) trig(... + 2n angle); divide the whole equation by lambda.
    const double top = fs.normalized(i, y, 2 * n);
    const double base = fs.normalized(i, y, 0);
    const auto& f = fs.function(i);
    const double scale = std::max(std::exp(f.alpha * (y - f.shift)), 1e-300);
    return std::abs(top + sgn * sign_n * base) / scale;
}

}  // namespace mixedpde
