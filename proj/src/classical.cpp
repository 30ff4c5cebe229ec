#include "poolcomp/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poolcomp/error.hpp"
#include "poolcomp/normal.hpp"

namespace poolcomp {

namespace {

void check_level(double level, const char* what) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InputError(std::string(what) + " must lie in (0, 1), got " + std::to_string(level));
    }
}

void check_p_values(std::span<const double> p) {
    if (p.empty()) throw InputError("at least one test is required");
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InputError("p-values must lie in [0, 1], got " + std::to_string(v));
        }
    }
}

}  // namespace

const char* to_string(Correction c) {
    switch (c) {
        case Correction::None: return "none";
        case Correction::Bonferroni: return "bonferroni";
        case Correction::BhFdr: return "bh_fdr";
    }
    return "?";
}

Correction parse_correction(const std::string& name) {
    if (name == "none") return Correction::None;
    if (name == "bonferroni") return Correction::Bonferroni;
    if (name == "bh_fdr" || name == "bh-fdr") return Correction::BhFdr;
    throw InputError("unknown correction '" + name + "' (expected none, bonferroni, bh-fdr)");
}

std::size_t CorrectionOutcome::n_rejected() const {
    return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), true));
}

TestResult make_test(std::string label, double estimate, double std_error) {
    if (!(std_error > 0.0)) throw InputError("test '" + label + "': std_error must be > 0");
    TestResult t;
    t.label = std::move(label);
    t.estimate = estimate;
    t.std_error = std_error;
    t.z = estimate / std_error;
    t.p_value = two_sided_p(t.z);
    return t;
}

double familywise_error_rate(double alpha, long m) {
    check_level(alpha, "alpha");
    if (m < 1) throw InputError("number of tests must be >= 1");
    // -expm1(m log1p(-alpha)) == 1 - (1 - alpha)^m without cancellation.
    return -std::expm1(static_cast<double>(m) * std::log1p(-alpha));
}

CorrectionOutcome uncorrected(std::span<const double> p_values, double alpha) {
    check_level(alpha, "alpha");
    check_p_values(p_values);
    CorrectionOutcome out;
    out.method = Correction::None;
    out.level = alpha;
    out.per_test_threshold.assign(p_values.size(), alpha);
    for (double p : p_values) out.rejected.push_back(p <= alpha);
    out.interval_multiplier = inverse_normal_cdf(1.0 - alpha / 2.0);
    return out;
}

CorrectionOutcome bonferroni(std::span<const double> p_values, double alpha) {
    check_level(alpha, "alpha");
    check_p_values(p_values);
    const double m = static_cast<double>(p_values.size());
    const double threshold = alpha / m;
    CorrectionOutcome out;
    out.method = Correction::Bonferroni;
    out.level = alpha;
    out.per_test_threshold.assign(p_values.size(), threshold);
    for (double p : p_values) out.rejected.push_back(p <= threshold);
    out.interval_multiplier = inverse_normal_cdf(1.0 - alpha / (2.0 * m));
    return out;
}

CorrectionOutcome bonferroni(std::span<const TestResult> tests, double alpha) {
    const auto p = p_values_of(tests);
    return bonferroni(std::span<const double>(p), alpha);
}

CorrectionOutcome bh_fdr(std::span<const double> p_values, double q) {
    check_level(q, "q");
    check_p_values(p_values);
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    const auto rank_threshold = [&](std::size_t rank) {
        return static_cast<double>(rank) * q / static_cast<double>(m);
    };

    std::size_t k_star = 0;
    for (std::size_t rank = m; rank >= 1; --rank) {
        if (p_values[order[rank - 1]] <= rank_threshold(rank)) {
            k_star = rank;
            break;
        }
    }

    CorrectionOutcome out;
    out.method = Correction::BhFdr;
    out.level = q;
    out.per_test_threshold.assign(m, 0.0);
    out.rejected.assign(m, false);
    for (std::size_t rank = 1; rank <= m; ++rank) {
        out.per_test_threshold[order[rank - 1]] = rank_threshold(rank);
    }
    if (k_star > 0) {
        // Every p-value at or below p_(k*) is rejected, so ties straddling k*
        // are all rejected together.
        const double cutoff = p_values[order[k_star - 1]];
        for (std::size_t i = 0; i < m; ++i) out.rejected[i] = p_values[i] <= cutoff;
        k_star = out.n_rejected();
    }
    out.step_up_rank = k_star;
    return out;
}

CorrectionOutcome apply_correction(Correction method, std::span<const double> p_values,
                                   double level) {
    switch (method) {
        case Correction::None: return uncorrected(p_values, level);
        case Correction::Bonferroni: return bonferroni(p_values, level);
        case Correction::BhFdr: return bh_fdr(p_values, level);
    }
    throw InputError("unknown correction");
}

std::vector<TestResult> group_z_tests(const StudyDataset& data) {
    std::vector<TestResult> out;
    out.reserve(data.size());
    for (const auto& s : data.summaries) out.push_back(make_test(s.group_id, s.estimate, s.std_error));
    return out;
}

std::vector<TestResult> pairwise_z_tests(const StudyDataset& data) {
    if (data.size() < 2) throw InputError("pairwise tests need at least 2 groups");
    std::vector<TestResult> out;
    out.reserve(data.size() * (data.size() - 1) / 2);
    for (std::size_t j = 0; j < data.size(); ++j) {
        for (std::size_t k = j + 1; k < data.size(); ++k) {
            const auto& a = data.summaries[j];
            const auto& b = data.summaries[k];
            out.push_back(make_test(a.group_id + "-" + b.group_id, a.estimate - b.estimate,
                                    std::hypot(a.std_error, b.std_error)));
        }
    }
    return out;
}

IntervalSet confidence_intervals(const StudyDataset& data, double alpha, Correction method) {
    check_level(alpha, "alpha");
    const double m = static_cast<double>(data.size());
    IntervalSet set;
    set.method = method;
    set.nominal_level = 1.0 - alpha;
    switch (method) {
        case Correction::None: set.multiplier = inverse_normal_cdf(1.0 - alpha / 2.0); break;
        case Correction::Bonferroni: set.multiplier = inverse_normal_cdf(1.0 - alpha / (2.0 * m)); break;
        case Correction::BhFdr:
            throw InputError("no FDR intervals: the step-up procedure yields rejection sets only");
    }
    for (const auto& s : data.summaries) {
        const double half = set.multiplier * s.std_error;
        set.intervals.push_back({s.group_id, s.estimate, s.estimate - half, s.estimate + half});
    }
    return set;
}

std::vector<double> p_values_of(std::span<const TestResult> tests) {
    std::vector<double> p;
    p.reserve(tests.size());
    for (const auto& t : tests) p.push_back(t.p_value);
    return p;
}

}  // namespace poolcomp
