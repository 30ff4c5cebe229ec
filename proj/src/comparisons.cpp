#include "poolcomp/comparisons.hpp"

#include <cmath>
#include <limits>

#include "poolcomp/error.hpp"

namespace poolcomp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ComparisonMatrix blank_matrix(std::vector<std::string> ids, std::string method, double level) {
    ComparisonMatrix m;
    const std::size_t J = ids.size();
    m.group_ids = std::move(ids);
    m.claims.assign(J * J, Claim::Indeterminate);
    m.evidence.assign(J * J, kNaN);
    m.method = std::move(method);
    m.level = level;
    return m;
}

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InputError("level must lie in (0, 1), got " + std::to_string(level));
    }
}

Claim flip(Claim c) {
    switch (c) {
        case Claim::Higher: return Claim::Lower;
        case Claim::Lower: return Claim::Higher;
        default: return Claim::Indeterminate;
    }
}

// P(theta_j > theta_k) from draws, ties split evenly.
double prob_greater(const PosteriorDraws& draws, std::size_t j, std::size_t k) {
    std::size_t greater = 0;
    std::size_t ties = 0;
    for (std::size_t d = 0; d < draws.n_draws; ++d) {
        const double a = draws.at(d, j);
        const double b = draws.at(d, k);
        greater += a > b;
        ties += a == b;
    }
    return (static_cast<double>(greater) + 0.5 * static_cast<double>(ties)) /
           static_cast<double>(draws.n_draws);
}

}  // namespace

char claim_symbol(Claim c) {
    switch (c) {
        case Claim::Higher: return 'H';
        case Claim::Lower: return 'L';
        default: return '.';
    }
}

std::size_t ComparisonMatrix::n_directional() const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < size(); ++j) {
        for (std::size_t k = j + 1; k < size(); ++k) n += claim(j, k) != Claim::Indeterminate;
    }
    return n;
}

ComparisonMatrix ComparisonMatrix::permuted(std::span<const std::size_t> order) const {
    if (order.size() != size()) throw InputError("permutation length does not match matrix");
    std::vector<std::string> ids;
    for (std::size_t i : order) ids.push_back(group_ids.at(i));
    ComparisonMatrix out = blank_matrix(std::move(ids), method, level);
    const std::size_t J = size();
    for (std::size_t a = 0; a < J; ++a) {
        for (std::size_t b = 0; b < J; ++b) {
            out.claims[a * J + b] = claim(order[a], order[b]);
            out.evidence[a * J + b] = evidence_at(order[a], order[b]);
        }
    }
    return out;
}

ComparisonMatrix bayes_pairwise(const PosteriorDraws& draws, double level) {
    check_level(level);
    if (draws.n_draws == 0) throw InputError("no posterior draws");
    ComparisonMatrix m = blank_matrix(draws.group_ids, "bayes", level);
    const std::size_t J = m.size();
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = j + 1; k < J; ++k) {
            const double e = prob_greater(draws, j, k);
            Claim c = Claim::Indeterminate;
            if (e >= level) {
                c = Claim::Higher;
            } else if (e <= 1.0 - level) {
                c = Claim::Lower;
            }
            m.evidence[j * J + k] = e;
            m.evidence[k * J + j] = 1.0 - e;
            m.claims[j * J + k] = c;
            m.claims[k * J + j] = flip(c);
        }
    }
    return m;
}

ComparisonMatrix bayes_interval_pairwise(const PosteriorDraws& draws, double level) {
    check_level(level);
    if (draws.n_draws == 0) throw InputError("no posterior draws");
    ComparisonMatrix m = blank_matrix(draws.group_ids, "bayes_interval", level);
    const std::size_t J = m.size();
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = j + 1; k < J; ++k) {
            const auto [lo, hi] = difference_interval(draws, j, k, level);
            Claim c = Claim::Indeterminate;
            if (lo > 0.0) {
                c = Claim::Higher;
            } else if (hi < 0.0) {
                c = Claim::Lower;
            }
            const double e = prob_greater(draws, j, k);
            m.evidence[j * J + k] = e;
            m.evidence[k * J + j] = 1.0 - e;
            m.claims[j * J + k] = c;
            m.claims[k * J + j] = flip(c);
        }
    }
    return m;
}

ComparisonMatrix classical_pairwise(const StudyDataset& data, double alpha, Correction correction) {
    check_level(alpha);
    const auto tests = pairwise_z_tests(data);
    const auto p = p_values_of(tests);
    const CorrectionOutcome outcome = apply_correction(correction, p, alpha);
    ComparisonMatrix m = blank_matrix(data.group_ids(), to_string(correction), alpha);
    const std::size_t J = m.size();
    std::size_t t = 0;
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = j + 1; k < J; ++k, ++t) {
            Claim c = Claim::Indeterminate;
            if (outcome.rejected[t] && tests[t].estimate != 0.0) {
                c = tests[t].estimate > 0.0 ? Claim::Higher : Claim::Lower;
            }
            m.evidence[j * J + k] = tests[t].p_value;
            m.evidence[k * J + j] = tests[t].p_value;
            m.claims[j * J + k] = c;
            m.claims[k * J + j] = flip(c);
        }
    }
    return m;
}

double ClaimScore::significant_rate() const {
    return n_claims == 0 ? 0.0 : static_cast<double>(n_significant) / static_cast<double>(n_claims);
}

std::optional<double> ClaimScore::correct_sign_rate() const {
    if (n_significant == 0) return std::nullopt;
    return static_cast<double>(n_correct_sign) / static_cast<double>(n_significant);
}

ClaimScore score_claims(const ComparisonMatrix& matrix, std::span<const double> truths) {
    if (truths.size() != matrix.size()) {
        throw InputError("score_claims: " + std::to_string(truths.size()) + " truths for " +
                         std::to_string(matrix.size()) + " groups");
    }
    ClaimScore s;
    const std::size_t J = matrix.size();
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = j + 1; k < J; ++k) {
            ++s.n_claims;
            const Claim c = matrix.claim(j, k);
            if (c == Claim::Indeterminate) continue;
            ++s.n_significant;
            const double diff = truths[j] - truths[k];
            if ((c == Claim::Higher && diff > 0.0) || (c == Claim::Lower && diff < 0.0)) {
                ++s.n_correct_sign;
            }
        }
    }
    return s;
}

TypeMSummary type_m_summary(std::span<const double> estimates, std::span<const double> truths,
                            const std::vector<bool>& significant) {
    if (estimates.size() != truths.size() || estimates.size() != significant.size()) {
        throw InputError("type_m_summary: estimates, truths and flags must have equal length");
    }
    TypeMSummary out;
    double total = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (!significant[i]) continue;
        if (truths[i] == 0.0) {
            ++out.n_zero_truth;
            continue;
        }
        const double r = std::fabs(estimates[i]) / std::fabs(truths[i]);
        out.exaggeration_ratios.push_back(r);
        total += r;
    }
    if (!out.exaggeration_ratios.empty()) {
        out.mean_ratio = total / static_cast<double>(out.exaggeration_ratios.size());
    }
    return out;
}

}  // namespace poolcomp
