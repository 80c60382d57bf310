#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixedpde/eigenbasis.hpp"
#include "mixedpde/number.hpp"
#include "mixedpde/problem.hpp"

namespace mixedpde {

/// Phase of the asymptotic denominator sin(lambda_k^(1/2n) a + phase).
struct PhaseClass {
    int two_n = 2;
    int gamma = 1;
    int q = 0;
    int quarter = 1;  // phase = quarter * pi / 4, quarter in {0, 1, 2, 3}
    std::string table_row;

    double phase() const;
    /// "0", "pi/4", "pi/2" or "3pi/4".
    std::string label() const;
};

/// Throws CaseNotTabulated for triples outside the tables (odd 2n, gamma not
/// in {1, 2}, negative q, or q > 1 with gamma = 2).
PhaseClass classify_phase(int two_n, int gamma, int q);

enum class Verdict { Separated, NotGuaranteed, DiophantineBounded };
const char* verdict_name(Verdict v);

struct SeparationResult {
    Verdict verdict = Verdict::NotGuaranteed;
    std::optional<double> delta1;
    /// min over k of |sin(pi k^b s / t + phase)|, enumerated over residues
    /// of k^b mod t (includes k divisible by t).
    double residue_floor = 0.0;
    std::string reason;
};

/// Rational a/pi = s/t only; throws IrrationalInput otherwise.
SeparationResult separation_check(const AOverPi& a_over_pi, const PhaseClass& phase, int b = 1);
SeparationResult separation_check(const Rational& a_over_pi, const PhaseClass& phase, int b = 1);

/// min over k2 = 1..t-1 of |sin(pi k2 / t + phase)|; |sin(phase)| when t = 1.
double delta1_formula(std::int64_t t, const PhaseClass& phase);
/// Brute-force floor over k = 1..t of |sin(pi (k^b s mod t) / t + phase)|.
double residue_floor(std::int64_t s, std::int64_t t, int b, const PhaseClass& phase);

struct Approximant {
    std::int64_t m = 0;   // floor(tau k^b) + 1
    long double gap = 0;  // |tau - (2m - 1) / (2 k^b)|
};
Approximant half_integer_approximant(long double tau, std::int64_t k, int b);

/// |sin(pi k^b tau + phase)| with the argument reduced modulo 2 in long double.
double shifted_sine(long double tau, std::int64_t k, int b, double phase);

struct ScanRecord {
    std::int64_t k = 0;
    double w = 0.0;
};

struct DiophantineScan {
    long double tau = 0;
    int b = 1;
    double epsilon = 0.5;
    std::int64_t k_max = 0;
    double min_w = 0.0;  // min of k^(b + b eps) |sin(pi k^b tau + phase)|
    std::int64_t argmin_w = 0;
    double raw_floor = 0.0;  // min of k^b |sin(pi k^b tau + phase)|
    std::int64_t argmin_raw = 0;
    double min_sine = 0.0;  // min of |sin(pi k^b tau + phase)|
    std::int64_t argmin_sine = 0;
    std::vector<ScanRecord> records;  // successive minima of w
};

DiophantineScan diophantine_scan(long double tau, int b, double epsilon, const PhaseClass& phase, std::int64_t k_max);

struct ContinuedFraction {
    std::vector<std::int64_t> quotients;
    std::vector<std::pair<long double, long double>> convergents;  // (p_i, q_i)
    bool terminated = false;
    bool near_rational = false;  // a partial quotient above the threshold appeared
};

inline constexpr std::int64_t kNearRationalQuotient = 1'000'000;

/// Expansion of a real; stops at depth (<= 40), at an exact termination, or
/// when the remainder falls below long double resolution.
ContinuedFraction continued_fraction(long double tau, int depth);
/// Exact expansion of p/q by Euclid's algorithm.
ContinuedFraction continued_fraction(const Rational& r);

struct DenominatorRecord {
    int k = 0;
    double det_scaled = 0.0;
    double normalized_det = 0.0;
    double delta4 = 0.0;
    double residual = 0.0;  // normalized_det - delta4
};

struct DenominatorReport {
    PhaseClass phase;
    int chi = 0;
    int delta = 1;
    SeparationResult separation;
    std::vector<DenominatorRecord> records;
    double amplitude = 0.0;  // least-squares fit of det_scaled against delta4
    double amplitude_lower = 0.0;
    double amplitude_upper = 0.0;
    double sup_residual_tail = 0.0;  // last quarter of the range
    double sup_residual_head = 0.0;  // [k_lo, middle]
    double sup_residual_back = 0.0;  // [middle, k_hi]
    std::optional<DiophantineScan> scan;
};

/// Separation verdict for a problem: residue logic for rational a/pi,
/// a Diophantine scan up to k_max for tagged irrationals.
SeparationResult assess_separation(const ProblemSpec& spec, std::int64_t k_max, std::optional<DiophantineScan>* scan = nullptr,
                                   double epsilon = 0.5);

/// Measures det_scaled(k) over [k_lo, k_hi], fits one amplitude on the
/// upper half of the range, and reports normalized_det - delta4. Throws
/// CalibrationUnstable when the fits on the two halves of the window differ
/// by more than 10 percent or the window carries no signal.
DenominatorReport asymptote_comparison(const ProblemSpec& spec, const EigenBasis& basis, int k_lo, int k_hi);

/// Fills the fit and residual fields from det_scaled and delta4 in records.
void calibrate(DenominatorReport& report);

nlohmann::json to_json(const PhaseClass& p);
nlohmann::json to_json(const SeparationResult& s);
nlohmann::json to_json(const DiophantineScan& s);
nlohmann::json to_json(const ContinuedFraction& c);
nlohmann::json to_json(const DenominatorReport& r);

}  // namespace mixedpde
