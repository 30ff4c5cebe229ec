#include "poolcomp/hier_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "poolcomp/error.hpp"
#include "poolcomp/rng.hpp"

namespace poolcomp {

namespace {

void check_sigma(double sigma_y) {
    if (!(sigma_y > 0.0)) throw InputError("sigma_y must be > 0, got " + std::to_string(sigma_y));
}

void check_tau(double tau) {
    if (!(tau >= 0.0)) throw InputError("tau must be >= 0, got " + std::to_string(tau));
}

double sample_sd(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

}  // namespace

NormalMoments conditional_posterior(double y_bar, double sigma_y, double mu, double tau) {
    check_sigma(sigma_y);
    check_tau(tau);
    if (tau == 0.0) return {mu, 0.0};
    if (std::isinf(tau)) return {y_bar, sigma_y};
    const double prior_prec = 1.0 / (tau * tau);
    const double data_prec = 1.0 / (sigma_y * sigma_y);
    const double prec = prior_prec + data_prec;
    return {(prior_prec * mu + data_prec * y_bar) / prec, 1.0 / std::sqrt(prec)};
}

double zscore_correction(double sigma_y, double tau) {
    check_sigma(sigma_y);
    check_tau(tau);
    if (tau == 0.0) return 0.0;
    if (std::isinf(tau)) return 1.0;
    const double ratio = sigma_y / tau;
    return 1.0 / std::sqrt(1.0 + ratio * ratio);
}

PairPosterior pair_posterior(double y_bar_j, double y_bar_k, double sigma_y, double tau) {
    check_sigma(sigma_y);
    check_tau(tau);
    if (tau == 0.0) return {0.0, 0.0, 0.0};
    const double diff = y_bar_j - y_bar_k;
    if (std::isinf(tau)) {
        const double sd = std::numbers::sqrt2 * sigma_y;
        return {diff, sd, diff / sd};
    }
    const double s2 = sigma_y * sigma_y;
    const double t2 = tau * tau;
    PairPosterior out;
    out.mean = t2 / (s2 + t2) * diff;
    out.sd = std::numbers::sqrt2 * sigma_y * tau / std::sqrt(s2 + t2);
    out.z = out.mean / out.sd;
    return out;
}

double default_tau_max(const StudyDataset& data) {
    const auto est = data.estimates();
    const auto se = data.std_errors();
    return 2.0 * sample_sd(est) + *std::max_element(se.begin(), se.end());
}

double TauGrid::top_decile_mass() const {
    const double cut = 0.9 * tau_max;
    double mass = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] > cut) mass += weight[i];
    }
    return mass;
}

TauGrid tau_posterior(const StudyDataset& data, const GridConfig& grid) {
    if (data.size() < 2) throw InputError("fit needs at least 2 groups");
    const double tau_max = grid.tau_max.value_or(default_tau_max(data));
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
        throw InputError("grid upper bound tau_max must be > 0");
    }
    if (grid.n_points < 2) throw InputError("grid needs at least 2 points");

    const auto y = data.estimates();
    const auto se = data.std_errors();
    const std::size_t n = grid.n_points;

    TauGrid g;
    g.tau_max = tau_max;
    g.tau.resize(n);
    g.log_density.resize(n);
    g.mu_hat.resize(n);
    g.mu_var.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = tau_max * static_cast<double>(i) / static_cast<double>(n - 1);
        double prec_sum = 0.0;
        double weighted = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double w = 1.0 / (se[j] * se[j] + tau * tau);
            prec_sum += w;
            weighted += w * y[j];
        }
        const double mu_hat = weighted / prec_sum;
        const double v_mu = 1.0 / prec_sum;
        double log_p = 0.5 * std::log(v_mu);
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double var = se[j] * se[j] + tau * tau;
            const double r = y[j] - mu_hat;
            log_p += -0.5 * std::log(var) - 0.5 * r * r / var;
        }
        g.tau[i] = tau;
        g.log_density[i] = log_p;
        g.mu_hat[i] = mu_hat;
        g.mu_var[i] = v_mu;
    }

    const double peak = *std::max_element(g.log_density.begin(), g.log_density.end());
    if (!std::isfinite(peak)) throw NumericalError("tau posterior density is not finite");
    g.weight.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double edge = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        g.weight[i] = edge * std::exp(g.log_density[i] - peak);
        total += g.weight[i];
    }
    if (!(total > 0.0)) throw NumericalError("tau posterior has no mass on the grid");
    for (double& w : g.weight) w /= total;
    return g;
}

std::vector<double> PosteriorDraws::column(std::size_t group) const {
    std::vector<double> out(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) out[i] = at(i, group);
    return out;
}

PosteriorDraws fit_grid(const StudyDataset& data, std::size_t n_draws, const GridConfig& grid,
                        std::uint64_t seed) {
    if (n_draws < 1) throw InputError("n_draws must be >= 1");
    const TauGrid g = tau_posterior(data, grid);
    const auto y = data.estimates();
    const auto se = data.std_errors();
    const std::size_t J = y.size();

    std::vector<double> cdf(g.weight.size());
    std::partial_sum(g.weight.begin(), g.weight.end(), cdf.begin());

    PosteriorDraws out;
    out.group_ids = data.group_ids();
    out.n_draws = n_draws;
    out.seed = seed;
    out.tau_max = g.tau_max;
    out.grid_points = g.tau.size();
    out.theta.resize(n_draws * J);
    out.hypers.resize(n_draws);

    if (J < 3) out.warnings.push_back("fewer than 3 groups: tau is weakly identified");
    if (n_draws < kRecommendedDraws) {
        out.warnings.push_back("n_draws " + std::to_string(n_draws) + " is below the recommended " +
                               std::to_string(kRecommendedDraws));
    }
    if (g.top_decile_mass() > 0.01) {
        out.warnings.push_back("more than 1% of tau posterior mass lies in the top grid decile; "
                               "consider a larger tau_max");
    }

    Rng rng = Rng::substream(seed, stream::kGridFit, 0);
    for (std::size_t d = 0; d < n_draws; ++d) {
        const double u = rng.uniform() * cdf.back();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx =
            std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        const double tau = g.tau[idx];
        const double mu = rng.normal(g.mu_hat[idx], std::sqrt(g.mu_var[idx]));
        out.hypers[d] = {mu, tau};
        for (std::size_t j = 0; j < J; ++j) {
            const NormalMoments post = conditional_posterior(y[j], se[j], mu, tau);
            out.theta[d * J + j] = rng.normal(post.mean, post.sd);
        }
    }
    return out;
}

double sorted_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InputError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

PosteriorSummary summarize(const PosteriorDraws& draws) {
    if (draws.n_draws < kMinSummaryDraws) {
        throw InputError("summarize needs at least " + std::to_string(kMinSummaryDraws) +
                         " draws, got " + std::to_string(draws.n_draws));
    }
    PosteriorSummary out;
    for (std::size_t j = 0; j < draws.n_groups(); ++j) {
        auto col = draws.column(j);
        GroupPosterior gp;
        gp.group_id = draws.group_ids[j];
        gp.mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
        double ss = 0.0;
        for (double x : col) ss += (x - gp.mean) * (x - gp.mean);
        gp.sd = std::sqrt(ss / static_cast<double>(col.size() - 1));
        std::sort(col.begin(), col.end());
        gp.lower = sorted_quantile(col, 0.025);
        gp.upper = sorted_quantile(col, 0.975);
        out.groups.push_back(gp);
    }
    std::vector<double> tau, mu;
    tau.reserve(draws.n_draws);
    mu.reserve(draws.n_draws);
    for (const auto& h : draws.hypers) {
        tau.push_back(h.tau);
        mu.push_back(h.mu);
    }
    std::sort(tau.begin(), tau.end());
    std::sort(mu.begin(), mu.end());
    out.tau_median = sorted_quantile(tau, 0.5);
    out.mu_median = sorted_quantile(mu, 0.5);
    return out;
}

std::pair<double, double> difference_interval(const PosteriorDraws& draws, std::size_t j,
                                              std::size_t k, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("interval level must lie in (0, 1)");
    std::vector<double> diff(draws.n_draws);
    for (std::size_t d = 0; d < draws.n_draws; ++d) diff[d] = draws.at(d, j) - draws.at(d, k);
    std::sort(diff.begin(), diff.end());
    const double tail = 0.5 * (1.0 - level);
    return {sorted_quantile(diff, tail), sorted_quantile(diff, 1.0 - tail)};
}

}  // namespace poolcomp
