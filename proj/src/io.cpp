#include "poolcomp/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "poolcomp/error.hpp"

namespace poolcomp {

namespace {

Json real_or_null(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json optional_real(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

std::string grid_csv(const ComparisonMatrix& m, auto cell) {
    std::ostringstream out;
    out << "group";
    for (const auto& id : m.group_ids) out << ',' << id;
    out << '\n';
    for (std::size_t j = 0; j < m.size(); ++j) {
        out << m.group_ids[j];
        for (std::size_t k = 0; k < m.size(); ++k) {
            out << ',';
            if (j != k) out << cell(j, k);
        }
        out << '\n';
    }
    return out.str();
}

Json arm_json(const ArmReport& a) {
    Json j;
    j["n_reps"] = a.n_reps;
    j["n_claims"] = a.n_claims;
    j["n_significant"] = a.n_significant;
    j["n_correct_sign"] = a.n_correct_sign;
    j["n_reps_any_significant"] = a.n_reps_any_significant;
    j["pct_significant"] = a.pct_significant;
    j["pct_correct_sign"] = optional_real(a.pct_correct_sign);
    j["pct_any_significant"] = a.pct_any_significant;
    j["mean_exaggeration"] = optional_real(a.mean_exaggeration);
    j["n_exaggeration"] = a.n_exaggeration;
    j["n_zero_truth"] = a.n_zero_truth;
    return j;
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericalError("cannot format number");
    return std::string(buf, ptr);
}

std::string draws_csv(const PosteriorDraws& draws) {
    std::ostringstream out;
    out << "draw,mu,tau";
    for (const auto& id : draws.group_ids) out << ',' << id;
    out << '\n';
    for (std::size_t d = 0; d < draws.n_draws; ++d) {
        out << (d + 1) << ',' << format_real(draws.hypers[d].mu) << ','
            << format_real(draws.hypers[d].tau);
        for (std::size_t j = 0; j < draws.n_groups(); ++j) out << ',' << format_real(draws.at(d, j));
        out << '\n';
    }
    return out.str();
}

Json summary_json(const PosteriorSummary& summary, const PosteriorDraws& draws) {
    Json j;
    j["n_draws"] = draws.n_draws;
    j["seed"] = draws.seed;
    j["tau_max"] = draws.tau_max;
    j["grid_points"] = draws.grid_points;
    j["mu_median"] = summary.mu_median;
    j["tau_median"] = summary.tau_median;
    Json groups = Json::array();
    for (const auto& g : summary.groups) {
        groups.push_back({{"group", g.group_id},
                          {"mean", g.mean},
                          {"sd", g.sd},
                          {"lower_95", g.lower},
                          {"upper_95", g.upper}});
    }
    j["groups"] = std::move(groups);
    j["warnings"] = draws.warnings;
    return j;
}

std::string claims_csv(const ComparisonMatrix& m) {
    return grid_csv(m, [&](std::size_t j, std::size_t k) { return claim_symbol(m.claim(j, k)); });
}

std::string evidence_csv(const ComparisonMatrix& m) {
    return grid_csv(m, [&](std::size_t j, std::size_t k) { return format_real(m.evidence_at(j, k)); });
}

Json matrix_json(const ComparisonMatrix& m) {
    Json j;
    j["method"] = m.method;
    j["level"] = m.level;
    j["groups"] = m.group_ids;
    j["n_pairs"] = m.size() * (m.size() - 1) / 2;
    j["n_directional"] = m.n_directional();
    return j;
}

Json correction_json(const std::vector<TestResult>& tests, const CorrectionOutcome& outcome,
                     const std::optional<IntervalSet>& intervals) {
    Json j;
    j["method"] = to_string(outcome.method);
    j["level"] = outcome.level;
    j["m"] = tests.size();
    if (outcome.method != Correction::BhFdr) {
        j["per_test_threshold"] = outcome.per_test_threshold.empty() ? 0.0 : outcome.per_test_threshold.front();
    } else {
        j["per_test_threshold"] = outcome.per_test_threshold;
        j["step_up_rank"] = outcome.step_up_rank;
    }
    j["interval_multiplier"] = optional_real(outcome.interval_multiplier);
    j["n_rejected"] = outcome.n_rejected();
    Json rows = Json::array();
    for (std::size_t i = 0; i < tests.size(); ++i) {
        Json r;
        r["label"] = tests[i].label;
        r["estimate"] = real_or_null(tests[i].estimate);
        r["std_error"] = real_or_null(tests[i].std_error);
        r["z"] = real_or_null(tests[i].z);
        r["p_value"] = tests[i].p_value;
        r["threshold"] = outcome.per_test_threshold[i];
        r["rejected"] = static_cast<bool>(outcome.rejected[i]);
        if (intervals) {
            r["lower"] = intervals->intervals[i].lower;
            r["upper"] = intervals->intervals[i].upper;
        }
        rows.push_back(std::move(r));
    }
    j["tests"] = std::move(rows);
    return j;
}

Json sim_config_json(const SimConfig& c) {
    Json j;
    j["groups"] = c.groups();
    j["tau_true"] = c.tau_true;
    j["mu_true"] = c.mu_true;
    j["sigma_list"] = c.sigma_list;
    j["n_reps"] = c.n_reps;
    j["alpha"] = c.alpha;
    j["analysis"] = to_string(c.analysis);
    j["bayes_draws"] = c.bayes_draws;
    j["grid_points"] = c.grid.n_points;
    j["tau_max"] = c.grid.tau_max ? Json(*c.grid.tau_max) : Json(nullptr);
    j["correction"] = to_string(c.correction);
    j["seed"] = c.seed;
    return j;
}

SimConfig sim_config_from_json(const Json& j, SimConfig c) {
    try {
        if (j.contains("tau_true")) c.tau_true = j.at("tau_true").get<double>();
        if (j.contains("mu_true")) c.mu_true = j.at("mu_true").get<double>();
        if (j.contains("sigma_list")) c.sigma_list = j.at("sigma_list").get<std::vector<double>>();
        if (j.contains("n_reps")) c.n_reps = j.at("n_reps").get<std::size_t>();
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("analysis")) c.analysis = parse_analysis(j.at("analysis").get<std::string>());
        if (j.contains("bayes_draws")) c.bayes_draws = j.at("bayes_draws").get<std::size_t>();
        if (j.contains("grid_points")) c.grid.n_points = j.at("grid_points").get<std::size_t>();
        if (j.contains("tau_max")) {
            const auto& t = j.at("tau_max");
            c.grid.tau_max = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
        }
        if (j.contains("correction")) c.correction = parse_correction(j.at("correction").get<std::string>());
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("simulation config: ") + e.what());
    }
    if (j.contains("groups") && j.at("groups").is_number_integer() &&
        j.at("groups").get<long long>() != static_cast<long long>(c.sigma_list.size())) {
        throw InputError("simulation config: 'groups' does not match the length of 'sigma_list'");
    }
    return c;
}

Json sim_report_json(const SimReport& report) {
    Json j;
    j["config"] = sim_config_json(report.config);
    j["classical"] = report.classical ? arm_json(*report.classical) : Json(nullptr);
    j["bayes"] = report.bayes ? arm_json(*report.bayes) : Json(nullptr);
    return j;
}

std::vector<ShrinkagePoint> shrinkage_table(double sigma_y, int per_decade) {
    if (!(sigma_y > 0.0)) throw InputError("sigma_y must be > 0");
    if (per_decade < 1) throw InputError("per_decade must be >= 1");
    std::vector<ShrinkagePoint> out;
    const int n = 6 * per_decade;
    for (int i = 0; i <= n; ++i) {
        const double exponent = static_cast<double>(i - 3 * per_decade) / per_decade;
        ShrinkagePoint p;
        p.variance_ratio = std::pow(10.0, exponent);
        p.tau = sigma_y * std::sqrt(p.variance_ratio);
        p.factor = zscore_correction(sigma_y, p.tau);
        out.push_back(p);
    }
    return out;
}

std::string shrinkage_csv(const std::vector<ShrinkagePoint>& table) {
    std::ostringstream out;
    out << "variance_ratio,tau,factor\n";
    for (const auto& p : table) {
        out << format_real(p.variance_ratio) << ',' << format_real(p.tau) << ','
            << format_real(p.factor) << '\n';
    }
    return out.str();
}

}  // namespace poolcomp
