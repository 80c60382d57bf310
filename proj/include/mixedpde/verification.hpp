#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mixedpde/series_solver.hpp"

namespace mixedpde {

struct NamedError {
    std::string label;
    double error = 0.0;
};

struct BoundaryReport {
    /// max over x of |D_y^(q+gamma r) u(x,-a) - phi_r| then the psi rows.
    std::vector<NamedError> boundary_errors;
    /// max over y of |D_x^(2m) u| at x = 0 and x = pi, m = 0..s-1.
    std::vector<NamedError> edge_errors;
    /// max over x of the jump of D_y^j u across y = 0, j = 0..2n-1.
    std::vector<double> matching_errors;
    int nx = 0;

    double max_boundary() const;
    double max_edge() const;
    double max_matching() const;
};

/// Residual of l(u) + (-1)^n sgn(y) D_y^(2n) u on both halves of an nx x ny
/// grid, the row y = 0 excluded.
struct ResidualReport {
    int nx = 0;
    int ny = 0;
    /// lambda of the last used mode times max |u| on the grid.
    double normalization = 0.0;
    /// Closed-form derivatives of the series.
    double pde_residual_upper = 0.0;
    double pde_residual_lower = 0.0;
    /// Fourth-order finite differences of the sampled field; stencils never
    /// cross y = 0 and use the odd extension in x.
    double fd_residual_upper = 0.0;
    double fd_residual_lower = 0.0;
    BoundaryReport boundary;

    double max_pde() const;
    double max_fd() const;
};

/// ny must be odd so that y = 0 is a grid row.
ResidualReport pde_residual(const SolutionField& field, int nx, int ny);
BoundaryReport boundary_check(const SolutionField& field, int nx = 201);
/// pde_residual with boundary_check on the same x resolution.
ResidualReport verify(const SolutionField& field, int nx, int ny);

/// Closed-form solution of the two-by-two reduced system of each mode for
/// n = s = 1. Throws OracleUnavailable otherwise.
double oracle_compare(const SolutionField& field, int nx = 41, int ny = 41);
/// Per used mode, max over ny points in [-a, a] of |Y_k - reduced Y_k|,
/// relative to max(1, max |reduced Y_k|). n = s = 1 only.
std::vector<double> oracle_mode_deviations(const SolutionField& field, int ny = 101);
/// det_scaled of the full system divided by the reduced determinant, per
/// used mode. n = s = 1 only.
std::vector<double> determinant_ratios(const SolutionField& field);

nlohmann::json to_json(const BoundaryReport& r);
nlohmann::json to_json(const ResidualReport& r);

}  // namespace mixedpde
