#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poolcomp/group_data.hpp"

namespace poolcomp {

/// A two-sided z-test of estimate = 0.
struct TestResult {
    std::string label;
    double estimate = 0.0;
    double std_error = 1.0;
    double z = 0.0;
    double p_value = 1.0;
};

TestResult make_test(std::string label, double estimate, double std_error);

enum class Correction { None, Bonferroni, BhFdr };

const char* to_string(Correction c);
Correction parse_correction(const std::string& name);

struct CorrectionOutcome {
    Correction method = Correction::None;
    double level = 0.05;
    /// One threshold per test, in input order. Bonferroni and none use a
    /// constant; BH stores the rank threshold k*q/m of each test's rank.
    std::vector<double> per_test_threshold;
    std::vector<bool> rejected;
    /// z multiplier for interval half-widths; absent for BH.
    std::optional<double> interval_multiplier;
    /// BH only: number of rejections k*. The cutoff is k*q/m.
    std::size_t step_up_rank = 0;

    std::size_t n_rejected() const;
};

struct Interval {
    std::string label;
    double center = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct IntervalSet {
    std::vector<Interval> intervals;
    double nominal_level = 0.95;
    double multiplier = 1.959963984540054;
    Correction method = Correction::None;
};

/// 1 - (1 - alpha)^m, the chance of at least one false rejection among m
/// independent tests when every null holds.
double familywise_error_rate(double alpha, long m);

/// Plain per-test rejection at level alpha (p <= alpha).
CorrectionOutcome uncorrected(std::span<const double> p_values, double alpha);

/// Each test at alpha / m; interval multiplier Phi^-1(1 - alpha / (2m)).
CorrectionOutcome bonferroni(std::span<const double> p_values, double alpha);
CorrectionOutcome bonferroni(std::span<const TestResult> tests, double alpha);

/// Benjamini-Hochberg step-up at FDR level q. Tied p-values share one fate.
CorrectionOutcome bh_fdr(std::span<const double> p_values, double q);

CorrectionOutcome apply_correction(Correction method, std::span<const double> p_values,
                                   double level);

/// One z-test per group against zero, in dataset order.
std::vector<TestResult> group_z_tests(const StudyDataset& data);

/// All J(J-1)/2 differences y_j - y_k for j < k, in lexicographic pair order.
std::vector<TestResult> pairwise_z_tests(const StudyDataset& data);

/// Symmetric normal-theory intervals; BH is rejected (no FDR intervals).
IntervalSet confidence_intervals(const StudyDataset& data, double alpha, Correction method);

std::vector<double> p_values_of(std::span<const TestResult> tests);

}  // namespace poolcomp
