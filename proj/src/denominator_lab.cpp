#include "mixedpde/denominator_lab.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "mixedpde/errors.hpp"
#include "mixedpde/modal_assembly.hpp"

namespace mixedpde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

std::int64_t powmod(std::int64_t base, int exp, std::int64_t mod) {
    __int128 result = 1 % mod, b = base % mod;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) result = result * b % mod;
        b = b * b % mod;
    }
    return static_cast<std::int64_t>(result);
}

std::string parity(int q) { return q % 2 ? "q odd" : "q even"; }

}  // namespace

double PhaseClass::phase() const { return quarter * kPi / 4.0; }

std::string PhaseClass::label() const {
    static const char* names[] = {"0", "pi/4", "pi/2", "3pi/4"};
    return names[quarter];
}

PhaseClass classify_phase(int two_n, int gamma, int q) {
    if (two_n <= 0 || two_n % 2 != 0) throw CaseNotTabulated("2n = " + std::to_string(two_n) + " is not tabulated");
    if (gamma != 1 && gamma != 2) throw CaseNotTabulated("gamma = " + std::to_string(gamma) + " is not tabulated");
    if (q < 0) throw CaseNotTabulated("negative q is not tabulated");
    if (gamma == 2 && q > 1) throw CaseNotTabulated("gamma = 2 requires q in {0, 1}");

    PhaseClass p{two_n, gamma, q, 0, ""};
    const bool odd_q = q % 2 != 0;
    if (gamma == 1) {
        switch (two_n % 8) {
            case 4: p.quarter = odd_q ? 2 : 0; p.table_row = "2n=8l+4, gamma=1, "; break;
            case 0: p.quarter = odd_q ? 0 : 2; p.table_row = "2n=8l, gamma=1, "; break;
            case 2: p.quarter = odd_q ? 3 : 1; p.table_row = "2n=8l+2, gamma=1, "; break;
            default: p.quarter = odd_q ? 1 : 3; p.table_row = "2n=8l+6, gamma=1, "; break;
        }
    } else {
        p.quarter = odd_q ? 3 : 1;
        p.table_row = two_n % 4 == 0 ? "2n=4l, gamma=2, " : "2n=4l+2, gamma=2, ";
    }
    p.table_row += parity(q);
    return p;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Separated: return "separated-with-delta1";
        case Verdict::DiophantineBounded: return "diophantine-bounded";
        default: return "not-guaranteed";
    }
}

double delta1_formula(std::int64_t t, const PhaseClass& phase) {
    if (t == 1) return std::abs(std::sin(phase.phase()));
    double best = 1.0;
    for (std::int64_t k2 = 1; k2 < t; ++k2)
        best = std::min(best, std::abs(std::sin(kPi * static_cast<double>(k2) / static_cast<double>(t) + phase.phase())));
    return best;
}

double residue_floor(std::int64_t s, std::int64_t t, int b, const PhaseClass& phase) {
    double best = 1.0;
    for (std::int64_t k = 1; k <= t; ++k) {
        const __int128 r = static_cast<__int128>(powmod(k, b, t)) * (s % t) % t;
        const double v = std::abs(std::sin(kPi * static_cast<double>(r) / static_cast<double>(t) + phase.phase()));
        best = std::min(best, v);
    }
    return best;
}

SeparationResult separation_check(const Rational& r, const PhaseClass& phase, int b) {
    if (r.num() <= 0) throw ValidationError("a/pi must be positive");
    const std::int64_t s = r.num(), t = r.den();
    SeparationResult out;
    out.residue_floor = residue_floor(s, t, b, phase);
    auto separated = [&](const std::string& why) {
        out.verdict = Verdict::Separated;
        out.delta1 = delta1_formula(t, phase);
        out.reason = why;
    };
    switch (phase.quarter) {
        case 0:
            out.verdict = Verdict::NotGuaranteed;
            out.reason = t == 1 ? "phase 0 with integer a/pi: sin(pi k^b a/pi) = 0 for every k"
                                : "phase 0: k = t gives sin(pi k^b s / t) = 0";
            break;
        case 2:
            if (t == 1) separated("a/pi is an integer");
            else if (t % 2 != 0) separated("a/pi = s/t with t odd");
            else {
                out.verdict = Verdict::NotGuaranteed;
                out.reason = "a/pi = s/t with t even";
            }
            break;
        default:
            if (t == 1) separated("a/pi is an integer");
            else if (t % 4 != 0) separated("a/pi = s/t with t not a multiple of 4");
            else {
                out.verdict = Verdict::NotGuaranteed;
                out.reason = "a/pi = s/t with t a multiple of 4";
            }
            break;
    }
    return out;
}

SeparationResult separation_check(const AOverPi& a_over_pi, const PhaseClass& phase, int b) {
    if (const auto* r = std::get_if<Rational>(&a_over_pi)) return separation_check(*r, phase, b);
    throw IrrationalInput("separation_check needs an exact rational a/pi; got " + a_over_pi_str(a_over_pi));
}

Approximant half_integer_approximant(long double tau, std::int64_t k, int b) {
    const long double kb = std::pow(static_cast<long double>(k), b);
    Approximant a;
    a.m = static_cast<std::int64_t>(std::floor(tau * kb)) + 1;
    a.gap = std::fabs(tau - (2.0L * static_cast<long double>(a.m) - 1.0L) / (2.0L * kb));
    return a;
}

double shifted_sine(long double tau, std::int64_t k, int b, double phase) {
    const long double kb = std::pow(static_cast<long double>(k), b);
    const long double reduced = std::fmod(kb * tau, 2.0L);
    return static_cast<double>(std::fabs(std::sin(kPiL * reduced + static_cast<long double>(phase))));
}

DiophantineScan diophantine_scan(long double tau, int b, double epsilon, const PhaseClass& phase, std::int64_t k_max) {
    if (!(tau > 0)) throw ValidationError("diophantine_scan needs tau > 0");
    DiophantineScan scan;
    scan.tau = tau;
    scan.b = b;
    scan.epsilon = epsilon;
    scan.k_max = k_max;
    scan.min_w = scan.raw_floor = scan.min_sine = std::numeric_limits<double>::infinity();
    const double exponent = b + b * epsilon;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const double sine = shifted_sine(tau, k, b, phase.phase());
        const double w = std::pow(static_cast<double>(k), exponent) * sine;
        const double raw = std::pow(static_cast<double>(k), b) * sine;
        if (w < scan.min_w) {
            scan.min_w = w;
            scan.argmin_w = k;
            scan.records.push_back({k, w});
        }
        if (raw < scan.raw_floor) {
            scan.raw_floor = raw;
            scan.argmin_raw = k;
        }
        if (sine < scan.min_sine) {
            scan.min_sine = sine;
            scan.argmin_sine = k;
        }
    }
    return scan;
}

ContinuedFraction continued_fraction(long double tau, int depth) {
    if (!(tau > 0)) throw ValidationError("continued_fraction needs tau > 0");
    depth = std::clamp(depth, 1, 40);
    ContinuedFraction cf;
    long double p1 = 1, p2 = 0, q1 = 0, q2 = 1;
    long double x = tau;
    const long double tol = 64.0L * LDBL_EPSILON;
    for (int i = 0; i < depth; ++i) {
        long double a = std::floor(x);
        const long double nearest = std::round(x);
        bool last = false;
        if (std::fabs(x - nearest) <= tol * std::max(1.0L, x)) {
            a = nearest;
            last = true;
        }
        if (a > static_cast<long double>(kNearRationalQuotient)) {
            cf.near_rational = true;
            break;
        }
        const auto ai = static_cast<std::int64_t>(a);
        cf.quotients.push_back(ai);
        const long double pn = a * p1 + p2, qn = a * q1 + q2;
        cf.convergents.emplace_back(pn, qn);
        p2 = p1;
        p1 = pn;
        q2 = q1;
        q1 = qn;
        if (last) {
            cf.terminated = true;
            break;
        }
        x = 1.0L / (x - a);
    }
    return cf;
}

ContinuedFraction continued_fraction(const Rational& r) {
    ContinuedFraction cf;
    std::int64_t num = r.num(), den = r.den();
    long double p1 = 1, p2 = 0, q1 = 0, q2 = 1;
    while (den != 0) {
        std::int64_t a = num / den;
        if (num % den != 0 && num < 0) --a;
        cf.quotients.push_back(a);
        const long double pn = a * p1 + p2, qn = a * q1 + q2;
        cf.convergents.emplace_back(pn, qn);
        p2 = p1;
        p1 = pn;
        q2 = q1;
        q1 = qn;
        const std::int64_t rem = num - a * den;
        num = den;
        den = rem;
    }
    cf.terminated = true;
    return cf;
}

SeparationResult assess_separation(const ProblemSpec& spec, std::int64_t k_max, std::optional<DiophantineScan>* scan,
                                   double epsilon) {
    const auto phase = classify_phase(2 * spec.n, spec.gamma, spec.q);
    if (std::holds_alternative<Rational>(spec.a_over_pi)) return separation_check(spec.a_over_pi, phase, spec.b());

    const auto& t = std::get<TaggedIrrational>(spec.a_over_pi);
    auto result = diophantine_scan(t.value, spec.b(), epsilon, phase, std::max<std::int64_t>(k_max, 1));
    SeparationResult out;
    out.residue_floor = result.min_sine;
    if (t.algebraic_degree && *t.algebraic_degree >= 2 && result.min_w > 0.0) {
        out.verdict = Verdict::DiophantineBounded;
        out.reason = "algebraic irrational of degree " + std::to_string(*t.algebraic_degree) +
                     "; scan floor of k^(b+b eps)|sin| is positive up to k_max";
    } else {
        out.verdict = Verdict::NotGuaranteed;
        out.reason = "irrational a/pi without a known algebraic degree";
    }
    if (scan) *scan = std::move(result);
    return out;
}

void calibrate(DenominatorReport& report) {
    auto& rec = report.records;
    if (rec.size() < 4) throw CalibrationUnstable("need at least 4 modes to calibrate");
    const int k_lo = rec.front().k, k_hi = rec.back().k;
    const int mid = (k_lo + k_hi) / 2, upper_mid = (mid + k_hi) / 2;
    auto fit = [&](int from, int to) {
        double num = 0.0, den = 0.0;
        int count = 0;
        for (const auto& r : rec)
            if (r.k >= from && r.k <= to) {
                num += r.det_scaled * r.delta4;
                den += r.delta4 * r.delta4;
                ++count;
            }
        if (count == 0 || den <= 1e-12 * count)
            throw CalibrationUnstable("the asymptotic denominator vanishes on k in [" + std::to_string(from) + ", " +
                                      std::to_string(to) + "]");
        return num / den;
    };
    report.amplitude = fit(mid, k_hi);
    report.amplitude_lower = fit(mid, upper_mid);
    report.amplitude_upper = fit(upper_mid + 1, k_hi);
    if (report.amplitude == 0.0 ||
        std::abs(report.amplitude_lower - report.amplitude_upper) > 0.1 * std::abs(report.amplitude))
        throw CalibrationUnstable("fitted amplitude moved from " + std::to_string(report.amplitude_lower) + " to " +
                                  std::to_string(report.amplitude_upper) + " across the fit window");

    const int tail_from = k_hi - (k_hi - k_lo) / 4;
    report.sup_residual_tail = report.sup_residual_head = report.sup_residual_back = 0.0;
    for (auto& r : rec) {
        r.normalized_det = r.det_scaled / report.amplitude;
        r.residual = r.normalized_det - r.delta4;
        const double v = std::abs(r.residual);
        if (r.k >= tail_from) report.sup_residual_tail = std::max(report.sup_residual_tail, v);
        if (r.k <= mid) report.sup_residual_head = std::max(report.sup_residual_head, v);
        if (r.k >= mid) report.sup_residual_back = std::max(report.sup_residual_back, v);
    }
}

DenominatorReport asymptote_comparison(const ProblemSpec& spec, const EigenBasis& basis, int k_lo, int k_hi) {
    if (k_lo < 1 || k_hi > basis.size() || k_hi - k_lo < 3)
        throw ValidationError("mode range must lie inside the basis and span at least 4 modes");
    DenominatorReport report;
    report.phase = classify_phase(2 * spec.n, spec.gamma, spec.q);
    report.chi = spec.chi;
    report.delta = spec.delta;
    const std::vector<double> zero(static_cast<std::size_t>(spec.n), 0.0);
    for (int k = k_lo; k <= k_hi; ++k) {
        const double lambda = basis.lambda(k);
        const auto sys = assemble(spec, k, lambda, zero, zero);
        DenominatorRecord r;
        r.k = k;
        r.det_scaled = sys.det_scaled;
        r.delta4 = std::sin(std::pow(lambda, 1.0 / (2.0 * spec.n)) * spec.a + report.phase.phase());
        report.records.push_back(r);
    }
    report.separation = assess_separation(spec, k_hi, &report.scan);
    calibrate(report);
    return report;
}

nlohmann::json to_json(const PhaseClass& p) {
    return {{"two_n", p.two_n}, {"gamma", p.gamma}, {"q", p.q},
            {"phase", p.label()}, {"phase_value", p.phase()}, {"table_row", p.table_row}};
}

nlohmann::json to_json(const SeparationResult& s) {
    nlohmann::json j{{"verdict", verdict_name(s.verdict)}, {"reason", s.reason}, {"residue_floor", s.residue_floor}};
    j["delta1"] = s.delta1 ? nlohmann::json(*s.delta1) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const DiophantineScan& s) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : s.records) records.push_back({{"k", r.k}, {"w", r.w}});
    return {{"tau", static_cast<double>(s.tau)},
            {"b", s.b},
            {"epsilon", s.epsilon},
            {"k_max", s.k_max},
            {"min_w", s.min_w},
            {"argmin_w", s.argmin_w},
            {"raw_floor", s.raw_floor},
            {"argmin_raw", s.argmin_raw},
            {"min_sine", s.min_sine},
            {"argmin_sine", s.argmin_sine},
            {"scan", records}};
}

nlohmann::json to_json(const ContinuedFraction& c) {
    nlohmann::json conv = nlohmann::json::array();
    for (const auto& [p, q] : c.convergents) conv.push_back({static_cast<double>(p), static_cast<double>(q)});
    return {{"quotients", c.quotients}, {"convergents", conv}, {"terminated", c.terminated},
            {"near_rational", c.near_rational}};
}

nlohmann::json to_json(const DenominatorReport& r) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& x : r.records)
        recs.push_back({{"k", x.k},
                        {"det_scaled", x.det_scaled},
                        {"normalized_det", x.normalized_det},
                        {"delta4", x.delta4},
                        {"residual", x.residual}});
    nlohmann::json j{{"phase", to_json(r.phase)},
                     {"chi", r.chi},
                     {"delta", r.delta},
                     {"verdict", verdict_name(r.separation.verdict)},
                     {"separation", to_json(r.separation)},
                     {"calibration", {{"L_hat", r.amplitude}, {"L_hat_lower", r.amplitude_lower},
                                      {"L_hat_upper", r.amplitude_upper}}},
                     {"sup_residual", r.sup_residual_tail},
                     {"sup_residual_head", r.sup_residual_head},
                     {"sup_residual_back", r.sup_residual_back},
                     {"records", recs}};
    j["delta1"] = r.separation.delta1 ? nlohmann::json(*r.separation.delta1) : nlohmann::json(nullptr);
    if (r.scan) j["scan"] = to_json(*r.scan);
    return j;
}

}  // namespace mixedpde
