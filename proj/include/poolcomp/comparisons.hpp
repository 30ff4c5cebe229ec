#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poolcomp/classical.hpp"
#include "poolcomp/group_data.hpp"
#include "poolcomp/hier_model.hpp"

namespace poolcomp {

enum class Claim { Higher, Lower, Indeterminate };

/// 'H', 'L' or '.'.
char claim_symbol(Claim c);

/// All-pairs claims. Row j, column k says how group j compares with group k.
/// Evidence is P(theta_j > theta_k) for Bayesian matrices and the two-sided
/// p-value for classical ones. The diagonal holds Indeterminate / NaN.
struct ComparisonMatrix {
    std::vector<std::string> group_ids;
    std::vector<Claim> claims;
    std::vector<double> evidence;
    std::string method;
    double level = 0.95;

    std::size_t size() const { return group_ids.size(); }
    Claim claim(std::size_t j, std::size_t k) const { return claims[j * size() + k]; }
    double evidence_at(std::size_t j, std::size_t k) const { return evidence[j * size() + k]; }
    /// Number of unordered pairs carrying a directional claim.
    std::size_t n_directional() const;
    /// Reorders rows and columns; `order[i]` is the old index placed at i.
    ComparisonMatrix permuted(std::span<const std::size_t> order) const;
};

/// Claim j > k when at least `level` of the draws have theta_j > theta_k.
/// Tied draws count half to each side.
ComparisonMatrix bayes_pairwise(const PosteriorDraws& draws, double level);

/// Claim a direction when the central `level` interval of theta_j - theta_k
/// (empirical quantiles of the draws) excludes zero.
ComparisonMatrix bayes_interval_pairwise(const PosteriorDraws& draws, double level);

/// Pairwise z-tests with one correction applied jointly to all J(J-1)/2 pairs.
ComparisonMatrix classical_pairwise(const StudyDataset& data, double alpha, Correction correction);

struct ClaimScore {
    std::size_t n_claims = 0;
    std::size_t n_significant = 0;
    std::size_t n_correct_sign = 0;

    double significant_rate() const;
    /// Share of significant claims with the correct sign; absent with no claims.
    std::optional<double> correct_sign_rate() const;
};

ClaimScore score_claims(const ComparisonMatrix& matrix, std::span<const double> truths);

struct TypeMSummary {
    std::vector<double> exaggeration_ratios;
    std::optional<double> mean_ratio;
    std::size_t n_zero_truth = 0;
};

/// |estimate| / |truth| over significant entries with truth != 0.
TypeMSummary type_m_summary(std::span<const double> estimates, std::span<const double> truths,
                            const std::vector<bool>& significant);

}  // namespace poolcomp
