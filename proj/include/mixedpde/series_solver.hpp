#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mixedpde/denominator_lab.hpp"
#include "mixedpde/eigenbasis.hpp"
#include "mixedpde/modal_assembly.hpp"
#include "mixedpde/problem.hpp"

namespace mixedpde {

struct ConditionCheck {
    std::string function;   // "phi_0", "psi_1", ...
    std::string condition;  // "C^4s", "f^(2m) = 0 at 0, pi", "l(f)^(2m) = 0 at 0, pi"
    bool pass = true;
    double worst = 0.0;  // largest offending endpoint value, 0 when none
    std::string detail;
};

enum class ConvergencePath { Separated, Diophantine, Unsupported };
const char* path_name(ConvergencePath p);

struct SmoothnessReport {
    std::vector<ConditionCheck> checks;
    bool passed = true;
    ConvergencePath path = ConvergencePath::Unsupported;
    /// 1 <= b <= s - 1.
    bool diophantine_path_allowed = false;
    std::vector<std::string> notes;
};

/// Endpoint and regularity conditions on the boundary data, plus the
/// convergence path chosen from the separation verdict. Never throws on
/// failed conditions; they are reported.
SmoothnessReport smoothness_check(const ProblemSpec& spec);

/// Boundary data projected on the eigenbasis.
struct BoundaryExpansion {
    Eigen::MatrixXd phi;  // n x K, row r = coefficients of phi_r
    Eigen::MatrixXd psi;  // n x K
    std::vector<double> lambdas;
    /// Quadrature L2 norm of all boundary functions taken together.
    double data_norm = 0.0;
    /// max over the last quarter of k of lambda_k^2 |coef|, per function
    /// (phi rows first, then psi rows).
    std::vector<double> tail_estimate;
    /// max over the first quarter, same layout.
    std::vector<double> head_estimate;
    /// Relative growth of the partial sums of lambda_k^4 coef^2 over the
    /// last quarter of k, same layout.
    std::vector<double> certificate_increment;

    int size() const { return static_cast<int>(phi.cols()); }
    /// max_r max(|phi_rk|, |psi_rk|), k 1-based.
    double mode_magnitude(int k) const;
    /// sum_r |phi_rk| + |psi_rk|.
    double mode_sum(int k) const;
};

BoundaryExpansion expand_boundary(const ProblemSpec& spec, const EigenBasis& basis);

enum class WeightRule { Unit, DiophantinePower, EigenDrift };
const char* weight_name(WeightRule w);

struct SolveOptions {
    double truncation_tol = 1e-12;
    double tol_singular = kDefaultSingularTolerance;
    /// ortho_tol = ortho_rel_tol * data_norm.
    double ortho_rel_tol = 1e-9;
    /// Chosen from the separation verdict when empty.
    std::optional<WeightRule> weight;
    std::optional<double> epsilon;
    int grid_size = 0;
    std::int64_t scan_k_max = 1000;
};

struct ModeRecord {
    int k = 0;
    double lambda = 0.0;
    double det_scaled = 0.0;
    double hadamard = 0.0;
    double condition = 0.0;
    double data = 0.0;  // sum_r |phi_rk| + |psi_rk|
    double term = 0.0;  // lambda weight data / |det_scaled|
    bool singular = false;
    bool solved = false;
};

/// The truncated series u = sum Y_k(y) X_k(x).
class SolutionField {
public:
    SolutionField(ProblemSpec spec, std::shared_ptr<const EigenBasis> basis);

    const ProblemSpec& spec() const { return spec_; }
    const EigenBasis& basis() const { return *basis_; }
    int requested_modes() const { return basis_->size(); }
    int used_modes() const { return static_cast<int>(modes_.size()); }
    const std::vector<ModalSolution>& modes() const { return modes_; }
    const std::vector<ModeRecord>& records() const { return records_; }
    const BoundaryExpansion& expansion() const { return expansion_; }
    const SmoothnessReport& smoothness() const { return smoothness_; }
    const SeparationResult& separation() const { return separation_; }
    const PhaseClass* phase() const { return phase_ ? &*phase_ : nullptr; }
    WeightRule weight() const { return weight_; }
    double epsilon() const { return epsilon_; }
    const SolveOptions& options() const { return options_; }

    bool nonunique() const { return !skipped_.empty(); }
    /// Singular modes skipped under orthogonal data.
    const std::vector<int>& skipped_modes() const { return skipped_; }
    /// Sum over the last quarter of used modes of lambda_k sup|X_k| max|Y_k|.
    double tail_bound() const { return tail_bound_; }

    /// D_x^dx D_y^dy u(x, y). Throws OutOfDomain outside the closed
    /// rectangle, for dx > 2s, dy > 2n, or dx = 2s together with dy = 2n.
    double evaluate(double x, double y, int dx = 0, int dy = 0) const;
    /// Same, with the side of y = 0 chosen explicitly.
    double evaluate(double x, double y, int dx, int dy, Region side) const;

    /// Values on an nx x ny uniform grid of the closed rectangle, row-major
    /// in y then x.
    std::vector<double> evaluate_grid(int nx, int ny, int dx = 0, int dy = 0) const;
    /// Columns: x, y, u.
    void write_csv(std::ostream& out, int nx, int ny) const;

    /// Copy with one modal coefficient of mode k shifted by delta.
    SolutionField perturbed(int k, int index, double delta) const;

private:
    friend SolutionField solve_problem(const ProblemSpec&, std::shared_ptr<const EigenBasis>, const SolveOptions&);

    void check_domain(double x, double y, int dx, int dy) const;

    ProblemSpec spec_;
    std::shared_ptr<const EigenBasis> basis_;
    SolveOptions options_;
    BoundaryExpansion expansion_;
    SmoothnessReport smoothness_;
    SeparationResult separation_;
    std::optional<PhaseClass> phase_;
    WeightRule weight_ = WeightRule::Unit;
    double epsilon_ = 0.5;
    std::vector<ModalSolution> modes_;
    std::vector<ModeRecord> records_;
    std::vector<int> skipped_;
    double tail_bound_ = 0.0;
};

/// Validates the problem, expands the data, solves every mode up to the
/// truncation point and sums the series. Throws ValidationError,
/// SingularModeWithData when a singular mode carries data above
/// ortho_tol, and DiscretizationTooCoarse from the eigen solver.
SolutionField solve_problem(const ProblemSpec& spec, std::shared_ptr<const EigenBasis> basis,
                            const SolveOptions& options = {});
SolutionField solve_problem(const ProblemSpec& spec, int K, const SolveOptions& options = {});

/// Copy of spec with every boundary function multiplied by factor.
ProblemSpec scale_data(const ProblemSpec& spec, double factor);

nlohmann::json to_json(const ProblemSpec& spec);
nlohmann::json to_json(const SmoothnessReport& r);
/// Metadata: modes used, tail bound, verdict, singular modes, per-mode table.
nlohmann::json to_json(const SolutionField& field);

}  // namespace mixedpde
