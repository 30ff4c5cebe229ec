#include "poolcomp/sim_study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "poolcomp/error.hpp"
#include "poolcomp/rng.hpp"

namespace poolcomp {

const char* to_string(Analysis a) {
    switch (a) {
        case Analysis::Classical: return "classical";
        case Analysis::Bayes: return "bayes";
        case Analysis::Both: return "both";
    }
    return "?";
}

Analysis parse_analysis(const std::string& name) {
    if (name == "classical") return Analysis::Classical;
    if (name == "bayes") return Analysis::Bayes;
    if (name == "both") return Analysis::Both;
    throw InputError("unknown analysis '" + name + "' (expected classical, bayes, both)");
}

void SimConfig::validate() const {
    if (sigma_list.size() < 2) throw InputError("simulation needs at least 2 groups");
    for (double s : sigma_list) {
        if (!(s > 0.0) || !std::isfinite(s)) throw InputError("every sigma must be > 0");
    }
    if (!(tau_true >= 0.0) || !std::isfinite(tau_true)) throw InputError("tau_true must be >= 0");
    if (!std::isfinite(mu_true)) throw InputError("mu_true must be finite");
    if (n_reps < 1) throw InputError("n_reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (bayes_draws < 1) throw InputError("bayes_draws must be >= 1");
    if (grid.n_points < 2) throw InputError("grid needs at least 2 points");
    if (grid.tau_max && !(*grid.tau_max > 0.0)) throw InputError("tau_max must be > 0");
}

std::vector<double> eight_schools_std_errors() {
    return {15.0, 10.0, 16.0, 11.0, 9.0, 11.0, 10.0, 18.0};
}

SimConfig eight_group_preset(double tau_true, std::uint64_t seed) {
    SimConfig c;
    c.tau_true = tau_true;
    c.sigma_list = eight_schools_std_errors();
    c.n_reps = 1000;
    c.alpha = 0.05;
    c.seed = seed;
    return c;
}

namespace {

ArmReplication score_arm(const ComparisonMatrix& m, const std::vector<double>& pair_estimates,
                         const std::vector<double>& truths) {
    ArmReplication arm;
    arm.score = score_claims(m, truths);
    std::vector<double> pair_truths;
    std::vector<bool> significant;
    const std::size_t J = m.size();
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = j + 1; k < J; ++k) {
            pair_truths.push_back(truths[j] - truths[k]);
            significant.push_back(m.claim(j, k) != Claim::Indeterminate);
        }
    }
    const TypeMSummary tm = type_m_summary(pair_estimates, pair_truths, significant);
    for (double r : tm.exaggeration_ratios) arm.exaggeration_sum += r;
    arm.exaggeration_count = tm.exaggeration_ratios.size();
    arm.zero_truth = tm.n_zero_truth;
    return arm;
}

}  // namespace

ReplicationResult run_replication(const SimConfig& config, std::size_t rep_index) {
    config.validate();
    const std::size_t J = config.groups();
    Rng rng = Rng::substream(config.seed, stream::kReplication, rep_index);

    ReplicationResult out;
    out.rep_index = rep_index;
    out.truths.resize(J);
    out.estimates.resize(J);
    for (std::size_t j = 0; j < J; ++j) out.truths[j] = rng.normal(config.mu_true, config.tau_true);
    for (std::size_t j = 0; j < J; ++j) {
        out.estimates[j] = rng.normal(out.truths[j], config.sigma_list[j]);
    }

    std::vector<GroupSummary> groups;
    for (std::size_t j = 0; j < J; ++j) {
        groups.push_back({"g" + std::to_string(j + 1), out.estimates[j], config.sigma_list[j], {}});
    }
    const StudyDataset data = make_dataset(std::move(groups));

    if (config.analysis != Analysis::Bayes) {
        const ComparisonMatrix m = classical_pairwise(data, config.alpha, config.correction);
        std::vector<double> diffs;
        for (std::size_t j = 0; j < J; ++j) {
            for (std::size_t k = j + 1; k < J; ++k) diffs.push_back(out.estimates[j] - out.estimates[k]);
        }
        out.classical = score_arm(m, diffs, out.truths);
    }
    if (config.analysis != Analysis::Classical) {
        const auto fit_seed = Rng::substream_seed(config.seed, stream::kGridFit, rep_index);
        const PosteriorDraws draws = fit_grid(data, config.bayes_draws, config.grid, fit_seed);
        const ComparisonMatrix m = bayes_interval_pairwise(draws, 1.0 - config.alpha);
        std::vector<double> means(J, 0.0);
        for (std::size_t d = 0; d < draws.n_draws; ++d) {
            for (std::size_t j = 0; j < J; ++j) means[j] += draws.at(d, j);
        }
        for (double& v : means) v /= static_cast<double>(draws.n_draws);
        std::vector<double> diffs;
        for (std::size_t j = 0; j < J; ++j) {
            for (std::size_t k = j + 1; k < J; ++k) diffs.push_back(means[j] - means[k]);
        }
        out.bayes = score_arm(m, diffs, out.truths);
    }
    return out;
}

SimReport aggregate(const SimConfig& config, const std::vector<ReplicationResult>& reps) {
    // Reps are folded in index order so floating-point sums do not depend on
    // the order in which workers finished.
    std::vector<const ReplicationResult*> ordered;
    for (const auto& r : reps) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->rep_index < b->rep_index; });

    auto fold = [&](auto member) {
        ArmReport a;
        double ratio_sum = 0.0;
        for (const auto* r : ordered) {
            const auto& arm = r->*member;
            if (!arm) continue;
            ++a.n_reps;
            a.n_claims += arm->score.n_claims;
            a.n_significant += arm->score.n_significant;
            a.n_correct_sign += arm->score.n_correct_sign;
            a.n_reps_any_significant += arm->score.n_significant > 0;
            ratio_sum += arm->exaggeration_sum;
            a.n_exaggeration += arm->exaggeration_count;
            a.n_zero_truth += arm->zero_truth;
        }
        if (a.n_claims > 0) {
            a.pct_significant = 100.0 * static_cast<double>(a.n_significant) / static_cast<double>(a.n_claims);
        }
        if (a.n_significant > 0) {
            a.pct_correct_sign =
                100.0 * static_cast<double>(a.n_correct_sign) / static_cast<double>(a.n_significant);
        }
        if (a.n_reps > 0) {
            a.pct_any_significant =
                100.0 * static_cast<double>(a.n_reps_any_significant) / static_cast<double>(a.n_reps);
        }
        if (a.n_exaggeration > 0) a.mean_exaggeration = ratio_sum / static_cast<double>(a.n_exaggeration);
        return a;
    };

    SimReport report;
    report.config = config;
    if (config.analysis != Analysis::Bayes) report.classical = fold(&ReplicationResult::classical);
    if (config.analysis != Analysis::Classical) report.bayes = fold(&ReplicationResult::bayes);
    return report;
}

SimReport run_study(const SimConfig& config, std::size_t threads) {
    config.validate();
    std::vector<ReplicationResult> reps(config.n_reps);
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, config.n_reps);
    if (workers == 1) {
        for (std::size_t r = 0; r < config.n_reps; ++r) reps[r] = run_replication(config, r);
        return aggregate(config, reps);
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < config.n_reps; r = next++) {
                    try {
                        reps[r] = run_replication(config, r);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return aggregate(config, reps);
}

}  // namespace poolcomp
