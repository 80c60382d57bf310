#include "mixedpde/series_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <locale>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mixedpde/errors.hpp"

namespace mixedpde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCheckPoints = 33;
constexpr int kProfilePoints = 65;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// l(f)^(d)(x) = (-1)^s f^(2s+d)(x) + sum_i C(d, i) p0^(i)(x) f^(d-i)(x)
double operator_derivative(const BoundaryFunction& f, const BoundaryFunction& p0, int s, int d, double x) {
    double acc = ((s % 2) ? -1.0 : 1.0) * f.derivative(x, 2 * s + d);
    if (!p0.is_identically_zero())
        for (int i = 0; i <= d; ++i) acc += binomial(d, i) * p0.derivative(x, i) * f.derivative(x, d - i);
    return acc;
}

template <typename F>
double sup_on_grid(F&& g) {
    double m = 0.0;
    for (int i = 0; i < kCheckPoints; ++i) m = std::max(m, std::abs(g(kPi * i / (kCheckPoints - 1))));
    return m;
}

void check_function(const std::string& name, const BoundaryFunction& f, const ProblemSpec& spec,
                    std::vector<ConditionCheck>& out) {
    const int s = spec.s;
    const double rel = f.is_expression() ? 1e-8 : 1e-5;

    ConditionCheck reg{name, "C^4s", true, 0.0, ""};
    const int top = f.is_expression() ? 4 * s : 4 * s - 2;
    try {
        for (int d = 0; d <= top && reg.pass; ++d)
            for (int i = 0; i < kCheckPoints; ++i) {
                const double v = f.derivative(kPi * i / (kCheckPoints - 1), d);
                if (!std::isfinite(v)) {
                    reg.pass = false;
                    reg.detail = "derivative of order " + std::to_string(d) + " is not finite";
                    break;
                }
            }
    } catch (const Error& e) {
        reg.pass = false;
        reg.detail = e.what();
    }
    if (reg.pass && !f.is_expression())
        reg.detail = "samples: derivatives up to order " + std::to_string(top) + " by finite differences";
    out.push_back(reg);

    ConditionCheck vanish{name, "f^(2m) = 0 at 0, pi", true, 0.0, ""};
    ConditionCheck image{name, "l(f)^(2m) = 0 at 0, pi", true, 0.0, ""};
    for (int m = 0; m < s; ++m) {
        const double scale = 1.0 + sup_on_grid([&](double x) { return f.derivative(x, 2 * m); });
        for (double x : {0.0, kPi}) {
            const double v = std::abs(f.derivative(x, 2 * m));
            if (v > rel * scale && v > vanish.worst) {
                vanish.pass = false;
                vanish.worst = v;
                vanish.detail = "order " + std::to_string(2 * m) + " at x = " + (x == 0.0 ? "0" : "pi");
            }
        }
        const double lscale =
            1.0 + sup_on_grid([&](double x) { return operator_derivative(f, spec.p0, s, 2 * m, x); });
        for (double x : {0.0, kPi}) {
            const double v = std::abs(operator_derivative(f, spec.p0, s, 2 * m, x));
            if (v > rel * lscale && v > image.worst) {
                image.pass = false;
                image.worst = v;
                image.detail = "order " + std::to_string(2 * m) + " at x = " + (x == 0.0 ? "0" : "pi");
            }
        }
    }
    out.push_back(vanish);
    out.push_back(image);
}

double sup_eigenfunction(const EigenBasis& basis, int k) {
    return std::sqrt(2.0 / kPi) * basis.sine_coefficients().col(k - 1).cwiseAbs().sum();
}

std::string format_factor(double factor) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << factor;
    return os.str();
}

}  // namespace

const char* path_name(ConvergencePath p) {
    switch (p) {
        case ConvergencePath::Separated: return "separated";
        case ConvergencePath::Diophantine: return "diophantine";
        default: return "unsupported";
    }
}

const char* weight_name(WeightRule w) {
    switch (w) {
        case WeightRule::DiophantinePower: return "k^(b+b*eps)";
        case WeightRule::EigenDrift: return "k^(2s-r-b)";
        default: return "unit";
    }
}

SmoothnessReport smoothness_check(const ProblemSpec& spec) {
    SmoothnessReport report;
    for (std::size_t r = 0; r < spec.phi.size(); ++r) check_function("phi_" + std::to_string(r), spec.phi[r], spec, report.checks);
    for (std::size_t r = 0; r < spec.psi.size(); ++r) check_function("psi_" + std::to_string(r), spec.psi[r], spec, report.checks);
    report.passed = std::all_of(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.pass; });

    const int b = spec.b();
    report.diophantine_path_allowed = b >= 1 && b <= spec.s - 1;
    if (b == spec.s)
        report.notes.push_back("higher smoothness required when b = s; the Diophantine path is refused");

    try {
        const auto sep = assess_separation(spec, 1000);
        switch (sep.verdict) {
            case Verdict::Separated: report.path = ConvergencePath::Separated; break;
            case Verdict::DiophantineBounded:
                if (report.diophantine_path_allowed) report.path = ConvergencePath::Diophantine;
                else report.notes.push_back("Diophantine bound found but 1 <= b <= s - 1 fails");
                break;
            default: report.notes.push_back("denominator separation not guaranteed: " + sep.reason); break;
        }
    } catch (const Error& e) {
        report.notes.push_back(e.what());
    }
    if (!report.passed) report.notes.push_back("boundary data fail the smoothness conditions; the series may converge slowly");
    return report;
}

double BoundaryExpansion::mode_magnitude(int k) const {
    double m = 0.0;
    for (Eigen::Index r = 0; r < phi.rows(); ++r)
        m = std::max({m, std::abs(phi(r, k - 1)), std::abs(psi(r, k - 1))});
    return m;
}

double BoundaryExpansion::mode_sum(int k) const {
    return phi.col(k - 1).cwiseAbs().sum() + psi.col(k - 1).cwiseAbs().sum();
}

BoundaryExpansion expand_boundary(const ProblemSpec& spec, const EigenBasis& basis) {
    const int n = spec.n, K = basis.size();
    BoundaryExpansion e;
    e.phi = Eigen::MatrixXd::Zero(n, K);
    e.psi = Eigen::MatrixXd::Zero(n, K);
    e.lambdas = basis.lambdas();

    const auto& nodes = basis.nodes();
    const auto& weights = basis.weights();
    double norm2 = 0.0;
    auto project = [&](const BoundaryFunction& f, Eigen::MatrixXd& into, int row) {
        if (f.is_identically_zero()) return;
        const auto c = basis.expand(f);
        for (int k = 0; k < K; ++k) into(row, k) = c[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double v = f(nodes[i]);
            norm2 += weights[i] * v * v;
        }
    };
    for (int r = 0; r < n; ++r) project(spec.phi[static_cast<std::size_t>(r)], e.phi, r);
    for (int r = 0; r < n; ++r) project(spec.psi[static_cast<std::size_t>(r)], e.psi, r);
    e.data_norm = std::sqrt(norm2);

    const int quarter = std::max(1, K / 4);
    auto diagnostics = [&](const Eigen::MatrixXd& m, int row) {
        double head = 0.0, tail = 0.0, total = 0.0, before = 0.0;
        for (int k = 0; k < K; ++k) {
            const double lam = e.lambdas[static_cast<std::size_t>(k)];
            const double w = lam * lam * std::abs(m(row, k));
            if (k < quarter) head = std::max(head, w);
            if (k >= K - quarter) tail = std::max(tail, w);
            total += w * w;
            if (k < K - quarter) before = total;
        }
        e.head_estimate.push_back(head);
        e.tail_estimate.push_back(tail);
        e.certificate_increment.push_back(total > 0.0 ? (total - before) / total : 0.0);
    };
    for (int r = 0; r < n; ++r) diagnostics(e.phi, r);
    for (int r = 0; r < n; ++r) diagnostics(e.psi, r);
    return e;
}

SolutionField::SolutionField(ProblemSpec spec, std::shared_ptr<const EigenBasis> basis)
    : spec_(std::move(spec)), basis_(std::move(basis)) {}

void SolutionField::check_domain(double x, double y, int dx, int dy) const {
    const double slack = 1e-12;
    if (!(x >= -slack && x <= kPi + slack) || !(std::abs(y) <= spec_.a * (1.0 + slack)))
        throw OutOfDomain("point outside [0, pi] x [-a, a]");
    if (dx < 0 || dy < 0 || dx > 2 * spec_.s || dy > 2 * spec_.n)
        throw OutOfDomain("derivative orders must satisfy 0 <= dx <= 2s and 0 <= dy <= 2n");
    if (dx == 2 * spec_.s && dy == 2 * spec_.n) throw OutOfDomain("mixed derivative of top order in both variables");
}

double SolutionField::evaluate(double x, double y, int dx, int dy, Region side) const {
    check_domain(x, y, dx, dy);
    if (modes_.empty()) return 0.0;
    const Eigen::VectorXd X = basis_->values(x, dx);
    double acc = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) acc += modes_[i].eval(y, dy, side) * X(static_cast<Eigen::Index>(i));
    return acc;
}

double SolutionField::evaluate(double x, double y, int dx, int dy) const {
    return evaluate(x, y, dx, dy, y < 0.0 ? Region::Lower : Region::Upper);
}

std::vector<double> SolutionField::evaluate_grid(int nx, int ny, int dx, int dy) const {
    if (nx < 2 || ny < 2) throw ValidationError("grid needs at least 2 points per direction");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        const double y = -spec_.a + 2.0 * spec_.a * j / (ny - 1);
        for (int i = 0; i < nx; ++i) out.push_back(evaluate(kPi * i / (nx - 1), y, dx, dy));
    }
    return out;
}

void SolutionField::write_csv(std::ostream& out, int nx, int ny) const {
    const auto values = evaluate_grid(nx, ny);
    out.imbue(std::locale::classic());
    out.precision(17);
    out << "x,y,u\n";
    std::size_t idx = 0;
    for (int j = 0; j < ny; ++j) {
        const double y = -spec_.a + 2.0 * spec_.a * j / (ny - 1);
        for (int i = 0; i < nx; ++i) out << kPi * i / (nx - 1) << ',' << y << ',' << values[idx++] << '\n';
    }
}

SolutionField SolutionField::perturbed(int k, int index, double delta) const {
    if (k < 1 || k > used_modes()) throw ValidationError("perturbed mode is not part of the series");
    SolutionField out = *this;
    auto& mode = out.modes_[static_cast<std::size_t>(k - 1)];
    mode = mode.with_offset(index, delta);
    return out;
}

SolutionField solve_problem(const ProblemSpec& spec, std::shared_ptr<const EigenBasis> basis,
                            const SolveOptions& options) {
    require_valid(spec);
    SolutionField field(spec, basis);
    field.options_ = options;
    field.smoothness_ = smoothness_check(spec);
    field.expansion_ = expand_boundary(spec, *basis);

    try {
        field.phase_ = classify_phase(2 * spec.n, spec.gamma, spec.q);
        field.separation_ = assess_separation(spec, options.scan_k_max);
    } catch (const CaseNotTabulated& e) {
        field.separation_.reason = e.what();
    }

    const int b = spec.b();
    const auto asym = asymptote_check(*basis, b);
    const double drift = asym.decay_rate;
    if (options.epsilon) {
        field.epsilon_ = *options.epsilon;
    } else {
        const double room = std::isfinite(drift) ? (-drift - b) / b : 1.0;
        field.epsilon_ = room > 0.0 ? 0.5 * std::min(1.0, room) : 0.5;
    }
    if (options.weight) field.weight_ = *options.weight;
    else field.weight_ = field.separation_.verdict == Verdict::DiophantineBounded ? WeightRule::DiophantinePower
                                                                                   : WeightRule::Unit;

    auto weight = [&](int k) {
        switch (field.weight_) {
            case WeightRule::DiophantinePower: return std::pow(static_cast<double>(k), b + b * field.epsilon_);
            case WeightRule::EigenDrift: return std::isfinite(drift) ? std::pow(static_cast<double>(k), -drift) : 1.0;
            default: return 1.0;
        }
    };

    const int K = basis->size();
    const double ortho_tol = options.ortho_rel_tol * field.expansion_.data_norm;
    std::vector<ModalSystem> systems;
    systems.reserve(static_cast<std::size_t>(K));
    int used = 0;
    for (int k = 1; k <= K; ++k) {
        std::vector<double> phi_k(static_cast<std::size_t>(spec.n)), psi_k(static_cast<std::size_t>(spec.n));
        for (int r = 0; r < spec.n; ++r) {
            phi_k[static_cast<std::size_t>(r)] = field.expansion_.phi(r, k - 1);
            psi_k[static_cast<std::size_t>(r)] = field.expansion_.psi(r, k - 1);
        }
        systems.push_back(assemble(spec, k, basis->lambda(k), phi_k, psi_k));
        const auto& sys = systems.back();

        ModeRecord rec;
        rec.k = k;
        rec.lambda = sys.lambda;
        rec.det_scaled = sys.det_scaled;
        rec.hadamard = sys.hadamard_bound();
        rec.data = field.expansion_.mode_sum(k);
        rec.singular = !(std::abs(sys.det_scaled) >= options.tol_singular * rec.hadamard);
        if (rec.singular) {
            const double magnitude = field.expansion_.mode_magnitude(k);
            if (magnitude > ortho_tol) throw SingularModeWithData(k, magnitude);
            field.skipped_.push_back(k);
        } else {
            rec.term = rec.lambda * weight(k) * rec.data / std::abs(sys.det_scaled);
            if (rec.term >= options.truncation_tol) used = k;
        }
        field.records_.push_back(rec);
    }

    for (int k = 1; k <= used; ++k) {
        auto& rec = field.records_[static_cast<std::size_t>(k - 1)];
        const auto& sys = systems[static_cast<std::size_t>(k - 1)];
        if (rec.singular) {
            field.modes_.push_back(ModalSolution::zero(sys));
        } else {
            field.modes_.push_back(solve_modal(sys, options.tol_singular));
            rec.condition = field.modes_.back().condition();
            rec.solved = true;
        }
    }

    if (used > 0) {
        const int from = used - std::max(1, used / 4) + 1;
        for (int k = from; k <= used; ++k) {
            const auto& mode = field.modes_[static_cast<std::size_t>(k - 1)];
            double ymax = 0.0;
            for (int j = 0; j < kProfilePoints; ++j) {
                const double y = -spec.a + 2.0 * spec.a * j / (kProfilePoints - 1);
                ymax = std::max(ymax, std::abs(mode.eval(y, 0)));
            }
            ymax = std::max(ymax, std::abs(mode.eval(0.0, 0, Region::Lower)));
            field.tail_bound_ += mode.lambda() * sup_eigenfunction(*basis, k) * ymax;
        }
    }
    return field;
}

SolutionField solve_problem(const ProblemSpec& spec, int K, const SolveOptions& options) {
    require_valid(spec);
    auto basis = std::make_shared<const EigenBasis>(make_basis(spec, K, options.grid_size));
    return solve_problem(spec, std::move(basis), options);
}

ProblemSpec scale_data(const ProblemSpec& spec, double factor) {
    auto scale = [factor](const BoundaryFunction& f) -> BoundaryFunction {
        if (const auto* e = f.expression())
            return Expression::parse("(" + format_factor(factor) + ")*(" + e->text() + ")");
        auto values = f.samples()->values();
        for (double& v : values) v *= factor;
        return SampledFunction(std::move(values));
    };
    ProblemSpec out = spec;
    for (auto& f : out.phi) f = scale(f);
    for (auto& f : out.psi) f = scale(f);
    return out;
}

nlohmann::json to_json(const SmoothnessReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"function", c.function}, {"condition", c.condition}, {"pass", c.pass},
                          {"worst", c.worst}, {"detail", c.detail}});
    return {{"passed", r.passed},
            {"path", path_name(r.path)},
            {"diophantine_path_allowed", r.diophantine_path_allowed},
            {"checks", checks},
            {"notes", r.notes}};
}

nlohmann::json to_json(const ProblemSpec& spec) {
    nlohmann::json phi = nlohmann::json::array(), psi = nlohmann::json::array();
    for (const auto& f : spec.phi) phi.push_back(f.describe());
    for (const auto& f : spec.psi) psi.push_back(f.describe());
    return {{"s", spec.s},         {"n", spec.n},         {"a", spec.a},
            {"a_over_pi", a_over_pi_str(spec.a_over_pi)},
            {"gamma", spec.gamma}, {"delta", spec.delta}, {"q", spec.q},
            {"chi", spec.chi},     {"phi", phi},          {"psi", psi},
            {"p0", spec.p0.describe()}};
}

nlohmann::json to_json(const SolutionField& field) {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& r : field.records())
        modes.push_back({{"k", r.k},
                         {"lambda", r.lambda},
                         {"det_scaled", r.det_scaled},
                         {"condition", r.solved ? nlohmann::json(r.condition) : nlohmann::json(nullptr)},
                         {"data", r.data},
                         {"term", r.term},
                         {"singular", r.singular},
                         {"solved", r.solved}});
    nlohmann::json j{{"spec", to_json(field.spec())},
                     {"modes_requested", field.requested_modes()},
                     {"modes_used", field.used_modes()},
                     {"tail_bound", field.tail_bound()},
                     {"truncation_tol", field.options().truncation_tol},
                     {"tol_singular", field.options().tol_singular},
                     {"ortho_tol", field.options().ortho_rel_tol * field.expansion().data_norm},
                     {"weight", weight_name(field.weight())},
                     {"epsilon", field.epsilon()},
                     {"verdict", verdict_name(field.separation().verdict)},
                     {"separation", to_json(field.separation())},
                     {"nonunique", field.nonunique()},
                     {"singular_modes", field.skipped_modes()},
                     {"smoothness", to_json(field.smoothness())},
                     {"basis", {{"model", field.basis().is_model()}, {"sine_modes", field.basis().sine_modes()}}},
                     {"modes", modes}};
    j["phase"] = field.phase() ? to_json(*field.phase()) : nlohmann::json(nullptr);
    return j;
}

}  // namespace mixedpde
