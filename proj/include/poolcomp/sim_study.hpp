#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poolcomp/classical.hpp"
#include "poolcomp/comparisons.hpp"
#include "poolcomp/hier_model.hpp"

namespace poolcomp {

enum class Analysis { Classical, Bayes, Both };

const char* to_string(Analysis a);
Analysis parse_analysis(const std::string& name);

/// One simulation study: true effects theta_j ~ N(mu_true, tau_true^2),
/// estimates y_j ~ N(theta_j, sigma_j^2), then every pair is compared.
///
/// The classical arm tests each difference against its standard error with
/// `correction` (uncorrected by default). The Bayes arm fits the grid model
/// and claims a direction when the central (1 - alpha) posterior interval of
/// theta_j - theta_k excludes zero.
struct SimConfig {
    double tau_true = 5.0;
    double mu_true = 0.0;
    std::vector<double> sigma_list;
    std::size_t n_reps = 1000;
    double alpha = 0.05;
    Analysis analysis = Analysis::Both;
    std::size_t bayes_draws = 1000;
    GridConfig grid;
    Correction correction = Correction::None;
    std::uint64_t seed = 0;

    std::size_t groups() const { return sigma_list.size(); }
    void validate() const;
};

/// 8-schools standard errors (15, 10, 16, 11, 9, 11, 10, 18).
std::vector<double> eight_schools_std_errors();

/// J = 8 with the 8-schools standard errors, 1000 reps, alpha 0.05.
SimConfig eight_group_preset(double tau_true, std::uint64_t seed = 20080101);

struct ArmReplication {
    ClaimScore score;
    double exaggeration_sum = 0.0;
    std::size_t exaggeration_count = 0;
    std::size_t zero_truth = 0;
};

struct ReplicationResult {
    std::size_t rep_index = 0;
    std::vector<double> truths;
    std::vector<double> estimates;
    std::optional<ArmReplication> classical;
    std::optional<ArmReplication> bayes;
};

/// Replication r draws from substream (seed, "sim-reps", r); its Bayes fit
/// uses seed substream_seed(seed, "fit-grid", r). Both arms see the same data.
ReplicationResult run_replication(const SimConfig& config, std::size_t rep_index);

struct ArmReport {
    std::size_t n_reps = 0;
    std::size_t n_claims = 0;
    std::size_t n_significant = 0;
    std::size_t n_correct_sign = 0;
    std::size_t n_reps_any_significant = 0;
    double pct_significant = 0.0;
    std::optional<double> pct_correct_sign;
    double pct_any_significant = 0.0;
    std::optional<double> mean_exaggeration;
    std::size_t n_exaggeration = 0;
    std::size_t n_zero_truth = 0;
};

struct SimReport {
    SimConfig config;
    std::optional<ArmReport> classical;
    std::optional<ArmReport> bayes;
};

/// Adds replications into per-arm reports. Counting is order-independent.
SimReport aggregate(const SimConfig& config, const std::vector<ReplicationResult>& reps);

/// Runs all replications (on `threads` workers when > 1) and aggregates them.
SimReport run_study(const SimConfig& config, std::size_t threads = 1);

}  // namespace poolcomp
