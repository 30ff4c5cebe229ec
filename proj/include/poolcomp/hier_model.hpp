#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poolcomp/group_data.hpp"

namespace poolcomp {

/// Normal-normal hierarchical model
///
///     y_j | theta_j ~ N(theta_j, sigma_j^2)
///     theta_j | mu, tau ~ N(mu, tau^2)
///
/// with a flat prior on mu and a uniform prior on tau over [0, tau_max].

struct NormalMoments {
    double mean = 0.0;
    double sd = 0.0;
};

/// Posterior of one group effect given the hyperparameters. tau = 0 is the
/// complete-pooling limit (mu, 0); tau = +inf gives (y, sigma_y).
NormalMoments conditional_posterior(double y_bar, double sigma_y, double mu, double tau);

/// Factor 1/sqrt(1 + sigma_y^2/tau^2) by which partial pooling scales the
/// z-score of a comparison. 0 at tau = 0, 1 at tau = +inf.
double zscore_correction(double sigma_y, double tau);

struct PairPosterior {
    double mean = 0.0;
    double sd = 0.0;
    double z = 0.0;
};

/// Posterior of theta_j - theta_k for a common sigma_y, with mu integrated
/// out of the difference. At tau = 0 all three are 0.
PairPosterior pair_posterior(double y_bar_j, double y_bar_k, double sigma_y, double tau);

struct HyperDraw {
    double mu = 0.0;
    double tau = 0.0;
};

struct GridConfig {
    std::size_t n_points = 1000;
    /// Defaults to 2 * sd(estimates) + max(std_error) when unset.
    std::optional<double> tau_max;
};

double default_tau_max(const StudyDataset& data);

/// Marginal posterior of tau tabulated on a uniform grid over [0, tau_max].
struct TauGrid {
    std::vector<double> tau;
    std::vector<double> log_density;  // unnormalized
    std::vector<double> weight;       // trapezoid-normalized, sums to 1
    std::vector<double> mu_hat;       // precision-weighted mean at each tau
    std::vector<double> mu_var;       // its variance V_mu(tau)
    double tau_max = 0.0;

    /// Posterior mass in the top 10% of the grid; large values mean tau_max truncates.
    double top_decile_mass() const;
};

TauGrid tau_posterior(const StudyDataset& data, const GridConfig& grid);

/// Row-major [n_draws x J] matrix of theta draws plus the (mu, tau) draw
/// behind each row.
struct PosteriorDraws {
    std::vector<std::string> group_ids;
    std::vector<double> theta;
    std::vector<HyperDraw> hypers;
    std::size_t n_draws = 0;
    std::uint64_t seed = 0;
    double tau_max = 0.0;
    std::size_t grid_points = 0;
    std::vector<std::string> warnings;

    std::size_t n_groups() const { return group_ids.size(); }
    double at(std::size_t draw, std::size_t group) const { return theta[draw * n_groups() + group]; }
    std::vector<double> column(std::size_t group) const;
};

inline constexpr std::size_t kRecommendedDraws = 1000;

/// Exact posterior simulation: draw tau from its tabulated marginal, then
/// mu | tau, then each theta_j | mu, tau. Bit-identical for identical inputs.
PosteriorDraws fit_grid(const StudyDataset& data, std::size_t n_draws, const GridConfig& grid,
                        std::uint64_t seed);

struct GroupPosterior {
    std::string group_id;
    double mean = 0.0;
    double sd = 0.0;
    double lower = 0.0;  // 2.5% quantile
    double upper = 0.0;  // 97.5% quantile
};

struct PosteriorSummary {
    std::vector<GroupPosterior> groups;
    double tau_median = 0.0;
    double mu_median = 0.0;
};

inline constexpr std::size_t kMinSummaryDraws = 100;

PosteriorSummary summarize(const PosteriorDraws& draws);

/// Linear-interpolation quantile (R type 7) of already sorted values.
double sorted_quantile(std::span<const double> sorted, double p);

/// Central interval [q(lo), q(1 - lo)] of theta_j - theta_k across draws.
std::pair<double, double> difference_interval(const PosteriorDraws& draws, std::size_t j,
                                              std::size_t k, double level);

}  // namespace poolcomp
