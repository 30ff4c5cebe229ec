#include <doctest.h>

#include <algorithm>

#include "poolcomp/error.hpp"
#include "poolcomp/io.hpp"
#include "poolcomp/sim_study.hpp"

using namespace poolcomp;

namespace {

SimConfig small_config(double tau, std::size_t reps, Analysis arm = Analysis::Both) {
    SimConfig c = eight_group_preset(tau, 99);
    c.n_reps = reps;
    c.analysis = arm;
    return c;
}

}  // namespace

TEST_CASE("null effects: classical false-positive rate is the test size") {
    SimConfig c = small_config(0.0, 10000, Analysis::Classical);
    const auto r = run_study(c);
    REQUIRE(r.classical);
    CHECK(std::fabs(r.classical->pct_significant - 5.0) <= 1.0);
    CHECK(r.classical->n_correct_sign == 0);
    CHECK_FALSE(r.bayes.has_value());
}

TEST_CASE("noiseless limit: every classical claim is significant and correct") {
    SimConfig c = small_config(5.0, 50, Analysis::Classical);
    c.sigma_list.assign(8, 1e-6);
    const auto r = run_study(c);
    CHECK(r.classical->pct_significant > 99.0);
    CHECK(*r.classical->pct_correct_sign > 99.9);
}

TEST_CASE("run_replication is deterministic and pairs the arms") {
    const SimConfig c = small_config(5.0, 10);
    const auto a = run_replication(c, 4);
    const auto b = run_replication(c, 4);
    CHECK(a.truths == b.truths);
    CHECK(a.estimates == b.estimates);
    CHECK(a.bayes->score.n_significant == b.bayes->score.n_significant);
    CHECK(a.classical->score.n_claims == 28);
    CHECK(a.bayes->score.n_claims == 28);
    const auto other = run_replication(c, 5);
    CHECK(other.truths != a.truths);
}

TEST_CASE("run_study determinism and rep-order independence") {
    const SimConfig c = small_config(5.0, 40);
    const auto first = sim_report_json(run_study(c)).dump();
    CHECK(first == sim_report_json(run_study(c)).dump());
    CHECK(first == sim_report_json(run_study(c, 3)).dump());

    std::vector<ReplicationResult> reps;
    for (std::size_t r = 0; r < c.n_reps; ++r) reps.push_back(run_replication(c, r));
    std::reverse(reps.begin(), reps.end());
    CHECK(first == sim_report_json(aggregate(c, reps)).dump());
}

TEST_CASE("directional and conservatism properties") {
    std::optional<double> prev_classical, prev_bayes;
    for (double tau : {0.0, 5.0, 10.0}) {
        const auto r = run_study(small_config(tau, 300));
        const double cs = r.classical->pct_correct_sign.value_or(0.0);
        const double bs = r.bayes->pct_correct_sign.value_or(0.0);
        if (prev_classical) CHECK(cs >= *prev_classical);
        if (prev_bayes) CHECK(bs >= *prev_bayes);
        prev_classical = cs;
        prev_bayes = bs;
        CHECK(r.bayes->pct_any_significant <= r.classical->pct_any_significant);
        CHECK(r.bayes->n_significant <= r.classical->n_significant);
        if (tau == 0.0) CHECK(r.bayes->pct_significant < 1.0);
    }
}

TEST_CASE("Type M: noisier estimates exaggerate more") {
    SimConfig c = small_config(1.0, 2000, Analysis::Classical);
    c.sigma_list.assign(8, 1.0);
    const auto precise = run_study(c);
    c.sigma_list.assign(8, 3.0);
    const auto noisy = run_study(c);
    REQUIRE(precise.classical->mean_exaggeration);
    REQUIRE(noisy.classical->mean_exaggeration);
    CHECK(*noisy.classical->mean_exaggeration > *precise.classical->mean_exaggeration);
}

TEST_CASE("single replication gives a valid report") {
    const auto r = run_study(small_config(5.0, 1));
    CHECK(r.classical->n_reps == 1);
    CHECK((r.classical->pct_any_significant == 0.0 || r.classical->pct_any_significant == 100.0));
    const auto j = sim_report_json(r);
    CHECK(j["config"]["n_reps"] == 1);
    CHECK(Json::parse(j.dump())["bayes"]["n_claims"] == 28);
}

TEST_CASE("report counts agree with rates") {
    const auto r = run_study(small_config(10.0, 100));
    for (const auto* arm : {&*r.classical, &*r.bayes}) {
        CHECK(arm->n_claims == 2800);
        CHECK(arm->n_correct_sign <= arm->n_significant);
        CHECK(arm->n_significant <= arm->n_claims);
        CHECK(arm->pct_significant == doctest::Approx(100.0 * arm->n_significant / 2800.0));
        CHECK(arm->pct_any_significant == doctest::Approx(arm->n_reps_any_significant));
    }
}

TEST_CASE("config validation") {
    SimConfig c = small_config(5.0, 10);
    c.sigma_list = {1.0};
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config(5.0, 10);
    c.sigma_list[2] = 0.0;
    CHECK_THROWS_AS(run_study(c), InputError);
    c = small_config(-1.0, 10);
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config(5.0, 0);
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config(5.0, 10);
    c.alpha = 1.5;
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("config JSON round trip") {
    SimConfig c = small_config(7.5, 123);
    c.grid.tau_max = 40.0;
    c.correction = Correction::BhFdr;
    const SimConfig back = sim_config_from_json(sim_config_json(c), SimConfig{});
    CHECK(sim_config_json(back).dump() == sim_config_json(c).dump());
    Json bad = sim_config_json(c);
    bad["groups"] = 3;
    CHECK_THROWS_AS(sim_config_from_json(bad, SimConfig{}), InputError);
}
