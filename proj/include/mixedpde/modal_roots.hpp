#pragma once

#include <complex>
#include <vector>

namespace mixedpde {

enum class Region { Upper, Lower };

const char* region_name(Region r);

/// Roots of z^(2n) = (-1)^(n+1) lambda (upper half, y > 0) or
/// z^(2n) = (-1)^n lambda (lower half, y < 0), grouped into families.
///
/// Positive right-hand side: angles pi r / n, r = 0..n (two real roots at 0
/// and pi, conjugate pairs in between). Negative right-hand side: angles
/// pi (1 + 2r) / (2n), r = 0..n-1, all conjugate pairs.
struct RootSet {
    int n = 1;
    double lambda = 0.0;
    double rho = 0.0;  // lambda^(1/2n)
    Region region = Region::Upper;
    std::vector<double> angles;
    std::vector<double> alpha;  // rho cos(angle)
    std::vector<double> beta;   // rho sin(angle)

    /// +lambda or -lambda.
    double rhs() const;
    /// All 2n complex roots, each family contributing z (and conj(z) when
    /// the root is not real).
    std::vector<std::complex<double>> roots() const;
    bool is_real(std::size_t family) const;
};

RootSet characteristic_roots(int n, double lambda, Region region);

/// One real solution e^(alpha y) cos(beta y) or e^(alpha y) sin(beta y).
struct BasisFunction {
    double angle = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    bool sine = false;
    /// Envelope reference point y0: the column is stored as e^(alpha (y - y0)) trig(...)
    /// times the factor e^(alpha y0), whose log is log_scale().
    double shift = 0.0;
    double log_scale() const { return alpha * shift; }
};

/// 2n real solutions of Y^(2n) + sgn(y) (-1)^n lambda Y = 0 in one half.
///
/// j-th derivative: rho^j e^(alpha y) trig(beta y + j angle).
class FundamentalSystem {
public:
    FundamentalSystem(RootSet roots, double a);

    const RootSet& roots() const { return roots_; }
    int size() const { return static_cast<int>(funcs_.size()); }
    const BasisFunction& function(int i) const { return funcs_[static_cast<std::size_t>(i)]; }

    /// Y_i^(j)(y) in plain floating point; overflows for large rho * a.
    double value(int i, double y, int j) const;
    /// e^(alpha (y - y0)) trig(beta y + j angle) = Y_i^(j)(y) / (rho^j e^(alpha y0)).
    double normalized(int i, double y, int j) const;

private:
    RootSet roots_;
    std::vector<BasisFunction> funcs_;
};

/// Envelope shifts chosen so that every stored column is bounded by 1 on its
/// half of [-a, a]; a = 0 disables shifting.
FundamentalSystem fundamental_system(const RootSet& roots, double a = 0.0);

/// Wronskian at y divided by rho^(n(2n-1)), using unshifted columns.
double normalized_wronskian(const FundamentalSystem& fs, double y = 0.0);

/// |Y^(2n) + sgn (-1)^n lambda Y| / (lambda e^(alpha y)) for basis function i
/// at y, from the closed-form derivatives.
double ode_residual(const FundamentalSystem& fs, int i, double y);

}  // namespace mixedpde
