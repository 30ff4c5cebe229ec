#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "poolcomp/classical.hpp"
#include "poolcomp/comparisons.hpp"
#include "poolcomp/hier_model.hpp"
#include "poolcomp/sim_study.hpp"

namespace poolcomp {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; "nan"/"inf" never appear in outputs
/// because callers map non-finite values to empty cells or null.
std::string format_real(double v);

/// Header `draw,mu,tau,<group_id...>`, one row per draw, draws numbered from 1.
std::string draws_csv(const PosteriorDraws& draws);

Json summary_json(const PosteriorSummary& summary, const PosteriorDraws& draws);

/// Square grid with a header row of group ids; cells H, L or '.', diagonal empty.
std::string claims_csv(const ComparisonMatrix& m);
/// Same layout with evidence values.
std::string evidence_csv(const ComparisonMatrix& m);

Json matrix_json(const ComparisonMatrix& m);

Json correction_json(const std::vector<TestResult>& tests, const CorrectionOutcome& outcome,
                     const std::optional<IntervalSet>& intervals);

Json sim_config_json(const SimConfig& config);
/// Inverse of sim_config_json; missing keys keep the values already in `base`.
SimConfig sim_config_from_json(const Json& j, SimConfig base);

/// Field names: config, classical, bayes; each arm carries n_reps, n_claims,
/// n_significant, n_correct_sign, n_reps_any_significant, pct_significant,
/// pct_correct_sign, pct_any_significant, mean_exaggeration, n_exaggeration,
/// n_zero_truth. Undefined rates are null.
Json sim_report_json(const SimReport& report);

struct ShrinkagePoint {
    double variance_ratio = 0.0;  // tau^2 / sigma_y^2
    double tau = 0.0;
    double factor = 0.0;
};

/// zscore_correction on variance ratios 10^(-3 + i/per_decade), i = 0..6*per_decade.
std::vector<ShrinkagePoint> shrinkage_table(double sigma_y, int per_decade = 10);
std::string shrinkage_csv(const std::vector<ShrinkagePoint>& table);

}  // namespace poolcomp
