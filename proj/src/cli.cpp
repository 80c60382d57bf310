#include "mixedpde/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mixedpde/denominator_lab.hpp"
#include "mixedpde/errors.hpp"
#include "mixedpde/series_solver.hpp"
#include "mixedpde/verification.hpp"

namespace mixedpde {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ProblemArgs {
    int s = 1;
    int n = 1;
    std::optional<double> a;
    std::string a_over_pi;
    int gamma = 1;
    int delta = 1;
    int q = 0;
    int chi = 0;
    std::string p0 = "0";
    std::vector<std::string> phi;
    std::vector<std::string> psi;
    int K = 20;
    double tol = 1e-12;
    double tol_singular = kDefaultSingularTolerance;
    int grid = 0;
};

struct OutputArgs {
    std::string dir = "out";
    int nx = 101;
    int ny = 101;
    int residual_grid = 101;
};

void add_problem_options(CLI::App* app, ProblemArgs& p, std::string& config) {
    app->add_option("--config", config, "TOML file with problem fields (s, n, a, a_over_pi, phi, psi, K, tol, ...)");
    app->add_option("--s,-s", p.s, "x-operator order 2s")->capture_default_str();
    app->add_option("--n,-n", p.n, "y-operator order 2n")->capture_default_str();
    app->add_option("--a", p.a, "half height of the rectangle");
    app->add_option("--a-over-pi,--a_over_pi", p.a_over_pi, "exact a/pi: p/q or irrational:<name-or-decimal>");
    app->add_option("--gamma", p.gamma)->capture_default_str();
    app->add_option("--delta", p.delta)->capture_default_str();
    app->add_option("--q", p.q)->capture_default_str();
    app->add_option("--chi", p.chi)->capture_default_str();
    app->add_option("--p0", p.p0, "potential p0(x) >= 0")->capture_default_str();
    app->add_option("--phi", p.phi, "data on y = -a, one expression or CSV path per r");
    app->add_option("--psi", p.psi, "data on y = +a, one expression or CSV path per r");
    app->add_option("--K,-K", p.K, "mode cutoff")->capture_default_str();
    app->add_option("--tol", p.tol, "truncation tolerance")->capture_default_str();
    app->add_option("--tol-singular,--tol_singular", p.tol_singular, "relative singular-mode threshold")
        ->capture_default_str();
    app->add_option("--grid", p.grid, "quadrature intervals for the numeric eigensolver (0 = automatic)")
        ->capture_default_str();
}

void add_output_options(CLI::App* app, OutputArgs& o) {
    app->add_option("--out,-o", o.dir, "output directory")->capture_default_str();
    app->add_option("--nx", o.nx, "solution grid points in x")->capture_default_str();
    app->add_option("--ny", o.ny, "solution grid points in y")->capture_default_str();
    app->add_option("--residual-grid,--residual_grid", o.residual_grid, "odd residual grid size")->capture_default_str();
}

// Fills options that were not given on the command line from a TOML file.
void apply_config(CLI::App* app, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;
        CLI::Option* opt = app->get_option_no_throw("--" + item.name);
        if (opt == nullptr || opt->get_name() == "--config")
            throw ValidationError("unknown config key " + item.fullname());
        if (opt->count() > 0) continue;
        for (const auto& value : item.inputs) opt->add_result(value);
        opt->run_callback();
    }
}

ProblemSpec build_spec(const ProblemArgs& args) {
    ProblemSpec spec;
    spec.s = args.s;
    spec.n = args.n;
    spec.gamma = args.gamma;
    spec.delta = args.delta;
    spec.q = args.q;
    spec.chi = args.chi;
    if (args.a_over_pi.empty()) {
        if (!args.a) throw ValidationError("a_over_pi (or a) is required");
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os << std::setprecision(17) << *args.a / std::numbers::pi;
        spec.a_over_pi = parse_a_over_pi("irrational:" + os.str());
    } else {
        spec.a_over_pi = parse_a_over_pi(args.a_over_pi);
    }
    spec.a = args.a ? *args.a : static_cast<double>(a_over_pi_value(spec.a_over_pi) * std::numbers::pi_v<long double>);
    spec.p0 = BoundaryFunction::from_text(args.p0);
    auto load = [&](const std::vector<std::string>& texts) {
        std::vector<BoundaryFunction> out;
        for (const auto& t : texts) out.push_back(BoundaryFunction::from_text(t));
        if (texts.empty())
            for (int r = 0; r < spec.n; ++r) out.emplace_back(Expression::parse("0"));
        return out;
    };
    spec.phi = load(args.phi);
    spec.psi = load(args.psi);
    require_valid(spec);
    return spec;
}

SolveOptions solve_options(const ProblemArgs& args) {
    SolveOptions o;
    o.truncation_tol = args.tol;
    o.tol_singular = args.tol_singular;
    o.grid_size = args.grid;
    return o;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct Failure {
    int code;
    std::string kind;
    std::string message;
};

Failure classify(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e))
        return {kExitValidation, "validation", e.what()};
    if (dynamic_cast<const SingularModeWithData*>(&e)) return {kExitSingularWithData, "singular-mode-with-data", e.what()};
    if (dynamic_cast<const CaseNotTabulated*>(&e)) return {kExitNotTabulated, "case-not-tabulated", e.what()};
    return {kExitRuntime, "runtime", e.what()};
}

json denominator_json(const SolutionField& field) {
    json d{{"verdict", verdict_name(field.separation().verdict)}, {"separation", to_json(field.separation())}};
    d["phase"] = field.phase() ? to_json(*field.phase()) : json(nullptr);
    d["delta1"] = field.separation().delta1 ? json(*field.separation().delta1) : json(nullptr);
    json modes = json::array();
    for (const auto& r : field.records()) modes.push_back({{"k", r.k}, {"det_scaled", r.det_scaled}, {"singular", r.singular}});
    d["modes"] = modes;
    if (field.requested_modes() >= 4) {
        try {
            const auto report = asymptote_comparison(field.spec(), field.basis(), 1, field.requested_modes());
            d["asymptote"] = to_json(report);
            d["calibration"] = {{"L_hat", report.amplitude}};
            d["sup_residual"] = report.sup_residual_tail;
        } catch (const CalibrationUnstable& e) {
            d["calibration"] = {{"error", e.what()}};
        }
    }
    return d;
}

int cmd_solve(const ProblemArgs& args, const OutputArgs& o, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = build_spec(args);
    const auto field = solve_problem(spec, args.K, solve_options(args));
    const fs::path dir(o.dir);
    fs::create_directories(dir);

    std::ostringstream csv;
    field.write_csv(csv, o.nx, o.ny);
    write_text(dir / "solution.csv", csv.str());
    write_json(dir / "metadata.json", to_json(field));
    write_json(dir / "denominator.json", denominator_json(field));
    const auto residual = verify(field, o.residual_grid, o.residual_grid);
    write_json(dir / "residual.json", to_json(residual));

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream(dir / "run.log", std::ios::app) << timestamp() << " solve K=" << args.K << " used=" << field.used_modes()
                                                  << " seconds=" << seconds << "\n";

    out << "modes used        " << field.used_modes() << " of " << field.requested_modes() << "\n"
        << "verdict           " << verdict_name(field.separation().verdict) << "\n"
        << "phase             " << (field.phase() ? field.phase()->label() : "n/a") << "\n"
        << "nonunique         " << (field.nonunique() ? "yes" : "no") << "\n"
        << "tail bound        " << field.tail_bound() << "\n"
        << "pde residual      " << residual.max_pde() << "\n"
        << "fd residual       " << residual.max_fd() << "\n"
        << "boundary error    " << residual.boundary.max_boundary() << "\n"
        << "matching error    " << residual.boundary.max_matching() << "\n"
        << "wrote " << (dir / "solution.csv").string() << ", metadata.json, denominator.json, residual.json\n";
    return kExitOk;
}

struct VerifyThresholds {
    double pde = 1e-8;
    double fd = 1e-3;
    double boundary = 1e-7;
    double matching = 1e-7;
    double oracle = 1e-9;
};

int cmd_verify(const ProblemArgs& args, const OutputArgs& o, const VerifyThresholds& t, std::ostream& out) {
    const auto spec = build_spec(args);
    const auto field = solve_problem(spec, args.K, solve_options(args));
    const auto rep = verify(field, o.residual_grid, o.residual_grid);
    json j = to_json(rep);

    bool ok = true;
    auto line = [&](const char* name, double value, double limit) {
        const bool pass = value <= limit;
        ok = ok && pass;
        out << (pass ? "PASS " : "FAIL ") << std::left << std::setw(18) << name << value << " <= " << limit << "\n";
    };
    line("pde residual", rep.max_pde(), t.pde);
    line("fd residual", rep.max_fd(), t.fd);
    line("boundary error", rep.boundary.max_boundary(), t.boundary);
    line("matching error", rep.boundary.max_matching(), t.matching);
    if (spec.n == 1 && spec.s == 1) {
        const double dev = oracle_compare(field);
        j["oracle_deviation"] = dev;
        line("oracle deviation", dev, t.oracle);
    }
    j["passed"] = ok;
    const fs::path dir(o.dir);
    fs::create_directories(dir);
    write_json(dir / "residual.json", j);
    return ok ? kExitOk : kExitRuntime;
}

struct DenominatorArgs {
    int two_n = 2;
    int gamma = 1;
    int q = 0;
    int b = 1;
    std::string a_ratio;
    std::string tau;
    std::int64_t k_max = 1000;
    double epsilon = 0.5;
    std::string out_file;
};

int cmd_denominator(const DenominatorArgs& d, std::ostream& out) {
    if (d.a_ratio.empty() == d.tau.empty()) throw ValidationError("give exactly one of --a-ratio and --tau");
    const auto phase = classify_phase(d.two_n, d.gamma, d.q);
    ProblemSpec spec;
    spec.n = d.two_n / 2;
    spec.s = d.b * spec.n;
    spec.gamma = spec.delta = d.gamma;
    spec.q = d.q;
    spec.a_over_pi = d.a_ratio.empty() ? AOverPi(TaggedIrrational::parse(d.tau)) : parse_a_over_pi(d.a_ratio);

    std::optional<DiophantineScan> scan;
    const auto sep = assess_separation(spec, d.k_max, &scan, d.epsilon);
    json j{{"phase", to_json(phase)}, {"verdict", verdict_name(sep.verdict)}, {"separation", to_json(sep)}};
    j["delta1"] = sep.delta1 ? json(*sep.delta1) : json(nullptr);
    if (scan) j["scan"] = to_json(*scan);
    if (const auto* t = std::get_if<TaggedIrrational>(&spec.a_over_pi))
        j["continued_fraction"] = to_json(continued_fraction(t->value, 20));
    else
        j["continued_fraction"] = to_json(continued_fraction(std::get<Rational>(spec.a_over_pi)));

    out << "phase    " << phase.label() << "  (" << phase.table_row << ")\n"
        << "verdict  " << verdict_name(sep.verdict) << "\n";
    if (sep.delta1) out << "delta1   " << *sep.delta1 << "\n";
    if (scan)
        out << "scan     min w = " << scan->min_w << " at k = " << scan->argmin_w << ", raw floor = " << scan->raw_floor
            << " at k = " << scan->argmin_raw << "\n";
    out << "reason   " << sep.reason << "\n";
    if (!d.out_file.empty()) {
        const fs::path p(d.out_file);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_json(p, j);
    }
    return kExitOk;
}

struct EigsArgs {
    int s = 1;
    int n = 1;
    std::string p0 = "0";
    int K = 20;
    int grid = 0;
    std::string dir = "out";
};

int cmd_eigs(const EigsArgs& e, std::ostream& out) {
    if (e.n < 1 || e.s < 1 || e.s % e.n != 0) throw ValidationError("b = s/n not integer");
    ProblemSpec spec;
    spec.s = e.s;
    spec.n = e.n;
    spec.p0 = BoundaryFunction::from_text(e.p0);
    const auto basis = make_basis(spec, e.K, e.grid);
    const auto asym = asymptote_check(basis, e.s / e.n);
    const fs::path dir(e.dir);
    fs::create_directories(dir);
    std::ostringstream csv;
    export_csv(csv, basis, false);
    write_text(dir / "eigs.csv", csv.str());
    json j{{"b", asym.b},
           {"n", asym.n},
           {"model", basis.is_model()},
           {"max_deviation", asym.max_deviation},
           {"head_max", asym.head_max},
           {"tail_max", asym.tail_max},
           {"decaying", asym.decaying},
           {"orthonormality_error", basis.orthonormality_error()}};
    j["decay_rate"] = std::isfinite(asym.decay_rate) ? json(asym.decay_rate) : json(nullptr);
    write_json(dir / "asymptote.json", j);
    out << std::setprecision(17);
    for (int k = 1; k <= std::min(basis.size(), 10); ++k) out << "lambda_" << k << " = " << basis.lambda(k) << "\n";
    out << std::setprecision(6) << "asymptote: max |lambda^(1/2n) - k^b| = " << asym.max_deviation
        << (asym.decaying ? " (decaying)" : " (not decaying)") << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral solver for mixed-type boundary value problems on a rectangle"};
    app.require_subcommand(1);

    ProblemArgs solve_args, verify_args;
    std::string solve_config, verify_config;
    OutputArgs solve_out, verify_out;
    VerifyThresholds thresholds;
    DenominatorArgs den;
    EigsArgs eigs;

    auto* solve = app.add_subcommand("solve", "solve the problem and write solution, metadata, denominator and residual files");
    add_problem_options(solve, solve_args, solve_config);
    add_output_options(solve, solve_out);

    auto* verify_cmd = app.add_subcommand("verify", "solve and check residuals against thresholds");
    add_problem_options(verify_cmd, verify_args, verify_config);
    add_output_options(verify_cmd, verify_out);
    verify_cmd->add_option("--pde-tol", thresholds.pde)->capture_default_str();
    verify_cmd->add_option("--fd-tol", thresholds.fd)->capture_default_str();
    verify_cmd->add_option("--boundary-tol", thresholds.boundary)->capture_default_str();
    verify_cmd->add_option("--matching-tol", thresholds.matching)->capture_default_str();
    verify_cmd->add_option("--oracle-tol", thresholds.oracle)->capture_default_str();

    auto* den_cmd = app.add_subcommand("denominator", "classify the asymptotic denominator and check separation");
    den_cmd->add_option("--2n", den.two_n, "order 2n of the y-operator")->required();
    den_cmd->add_option("--gamma", den.gamma)->capture_default_str();
    den_cmd->add_option("--q", den.q)->capture_default_str();
    den_cmd->add_option("--b", den.b, "b = s/n")->capture_default_str();
    den_cmd->add_option("--a-ratio,--a_ratio", den.a_ratio, "a/pi: p/q or irrational:<name-or-decimal>");
    den_cmd->add_option("--tau", den.tau, "irrational tau: sqrtN, cbrtN, golden, pi, e or a decimal");
    den_cmd->add_option("--kmax", den.k_max)->capture_default_str();
    den_cmd->add_option("--epsilon", den.epsilon)->capture_default_str();
    den_cmd->add_option("--out,-o", den.out_file, "JSON report path");

    auto* eigs_cmd = app.add_subcommand("eigs", "eigenpairs of the x-operator");
    eigs_cmd->add_option("--s,-s", eigs.s)->capture_default_str();
    eigs_cmd->add_option("--n,-n", eigs.n, "y-order used for the asymptote check")->capture_default_str();
    eigs_cmd->add_option("--p0", eigs.p0)->capture_default_str();
    eigs_cmd->add_option("--K,-K", eigs.K)->capture_default_str();
    eigs_cmd->add_option("--grid", eigs.grid)->capture_default_str();
    eigs_cmd->add_option("--out,-o", eigs.dir)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    std::string error_dir;
    try {
        if (*solve) {
            error_dir = solve_out.dir;
            std::error_code stale;
            fs::remove(fs::path(error_dir) / "error.json", stale);
            apply_config(solve, solve_config);
            return cmd_solve(solve_args, solve_out, out);
        }
        if (*verify_cmd) {
            error_dir = verify_out.dir;
            std::error_code stale;
            fs::remove(fs::path(error_dir) / "error.json", stale);
            apply_config(verify_cmd, verify_config);
            return cmd_verify(verify_args, verify_out, thresholds, out);
        }
        if (*den_cmd) return cmd_denominator(den, out);
        return cmd_eigs(eigs, out);
    } catch (const std::exception& e) {
        const auto f = classify(e);
        const json j{{"error", f.kind}, {"message", f.message}, {"exit_code", f.code}};
        err << j.dump() << "\n";
        if (!error_dir.empty()) {
            std::error_code ec;
            fs::create_directories(error_dir, ec);
            if (!ec) write_json(fs::path(error_dir) / "error.json", j);
        }
        return f.code;
    }
}

}  // namespace mixedpde
