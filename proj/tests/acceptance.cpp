// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria (capped at 1).

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "poolcomp/classical.hpp"
#include "poolcomp/comparisons.hpp"
#include "poolcomp/fixtures.hpp"
#include "poolcomp/hier_model.hpp"
#include "poolcomp/io.hpp"
#include "poolcomp/sim_study.hpp"

namespace fs = std::filesystem;
using namespace poolcomp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
}

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

void check_band(Outcome& o, const std::string& label, double v, double lo, double hi) {
    const bool ok = within(v, lo, hi);
    o.require(ok, label + "=" + fmt(v, 2) + " not in [" + fmt(lo, 1) + "," + fmt(hi, 1) + "]");
    if (ok) o.note(label + "=" + fmt(v, 2));
}

#ifdef POOLCOMP_CLI
fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("poolcomp_accept_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(POOLCOMP_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}
#endif

const double kMeans[] = {11, 7, 6, 7, 5, 6, 10, 8};
const double kSds[] = {8, 6, 8, 7, 6, 7, 7, 8};

Outcome eight_schools_posterior() {
    Outcome o;
    PosteriorSummary summary;
    const auto start = Clock::now();
#ifdef POOLCOMP_CLI
    const fs::path dir = scratch() / "c1";
    o.require(run_cli("fit --fixture eight-schools --draws 20000 --seed 1 --out-dir " + dir.string()) == 0,
              "fit exited non-zero");
    const Json j = Json::parse(slurp(dir / "posterior_summary.json"));
    for (const auto& g : j["groups"]) {
        summary.groups.push_back({g["group"], g["mean"], g["sd"], g["lower_95"], g["upper_95"]});
    }
#else
    summary = summarize(fit_grid(eight_schools(), 20000, GridConfig{}, 1));
#endif
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    o.require(summary.groups.size() == 8, "expected 8 groups");
    double worst_mean = 0.0, worst_sd = 0.0;
    for (std::size_t j = 0; j < summary.groups.size(); ++j) {
        worst_mean = std::max(worst_mean, std::fabs(summary.groups[j].mean - kMeans[j]));
        worst_sd = std::max(worst_sd, std::fabs(summary.groups[j].sd - kSds[j]));
    }
    o.require(worst_mean <= 1.5, "max |mean - table| = " + fmt(worst_mean));
    o.require(worst_sd <= 1.5, "max |sd - table| = " + fmt(worst_sd));
    o.require(secs < 5.0, "runtime " + fmt(secs) + "s >= 5s");
    o.note("max |dmean|=" + fmt(worst_mean) + " max |dsd|=" + fmt(worst_sd));
    return o;
}

Outcome eight_schools_comparisons() {
    Outcome o;
    const auto draws = fit_grid(eight_schools(), 20000, GridConfig{}, 1);
    const auto m = bayes_pairwise(draws, 0.95);
    double max_evidence = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (j != k) max_evidence = std::max(max_evidence, m.evidence_at(j, k));
        }
    }
    o.require(m.n_directional() == 0, std::to_string(m.n_directional()) + " directional claims");
    o.note("28 pairs, max P(theta_j > theta_k)=" + fmt(max_evidence));
    return o;
}

Outcome simulation(double tau, bool small_effects) {
    Outcome o;
    const auto start = Clock::now();
    const SimReport r = run_study(eight_group_preset(tau));
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const ArmReport& c = *r.classical;
    const ArmReport& b = *r.bayes;
    if (small_effects) {
        check_band(o, "classical sig%", c.pct_significant, 5.0, 9.0);
        check_band(o, "classical sign%", c.pct_correct_sign.value_or(-1.0), 55.0, 71.0);
        check_band(o, "classical any%", c.pct_any_significant, 43.0, 51.0);
        check_band(o, "bayes sig%", b.pct_significant, 0.0, 1.0);
        if (b.n_significant >= 30) {
            check_band(o, "bayes sign%", b.pct_correct_sign.value_or(-1.0), 79.0, 99.0);
        } else {
            o.note("bayes sign% skipped (" + std::to_string(b.n_significant) + " claims)");
        }
        check_band(o, "bayes any%", b.pct_any_significant, 3.0, 7.0);
    } else {
        check_band(o, "classical sig%", c.pct_significant, 10.0, 14.0);
        check_band(o, "classical sign%", c.pct_correct_sign.value_or(-1.0), 80.0, 92.0);
        check_band(o, "bayes sig%", b.pct_significant, 1.5, 4.5);
        check_band(o, "bayes sign%", b.pct_correct_sign.value_or(-1.0), 92.0, 100.0);
    }
    o.require(secs < 300.0, "runtime " + fmt(secs) + "s >= 300s");
    return o;
}

Outcome exact_arithmetic() {
    Outcome o;
    const double f2 = familywise_error_rate(0.05, 2);
    const double f8 = familywise_error_rate(0.05, 8);
    const double f20 = familywise_error_rate(0.05, 20);
    o.require(std::fabs(f2 - 0.0975) <= 1e-12, "fwer(0.05,2)=" + format_real(f2));
    o.require(std::fabs(f8 - 0.336579568710938) <= 1e-9, "fwer(0.05,8)=" + format_real(f8));
    o.require(std::fabs(f20 - 0.641514077591458) <= 1e-9, "fwer(0.05,20)=" + format_real(f20));
    const std::vector<double> p(8, 0.5);
    const double t = bonferroni(p, 0.05).per_test_threshold.front();
    o.require(t == 0.00625, "bonferroni threshold " + format_real(t));
    o.note("fwer=" + format_real(f2) + "," + fmt(f8, 6) + "," + fmt(f20, 6) + " threshold=" + format_real(t));
    return o;
}

Outcome analytic_identities() {
    Outcome o;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> y(-100.0, 100.0);
    std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
    double worst = 0.0;
    int bound_violations = 0, limit_violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const double yj = y(gen), yk = y(gen), mu = y(gen);
        const double sigma = std::pow(10.0, log_scale(gen));
        const double tau = std::pow(10.0, log_scale(gen));
        const PairPosterior pp = pair_posterior(yj, yk, sigma, tau);
        const double classical_z = (yj - yk) / (std::sqrt(2.0) * sigma);
        const double factored = classical_z * zscore_correction(sigma, tau);
        const double rel = std::fabs(pp.z - factored) / std::max(std::fabs(factored), 1e-300);
        if (yj != yk) worst = std::max(worst, rel);

        const NormalMoments post = conditional_posterior(yj, sigma, mu, tau);
        const double eps = 1e-12 * (1.0 + std::fabs(yj) + std::fabs(mu));
        if (post.mean < std::min(yj, mu) - eps || post.mean > std::max(yj, mu) + eps ||
            post.sd > std::min(sigma, tau) * (1.0 + 1e-14)) {
            ++bound_violations;
        }
        const NormalMoments pooled = conditional_posterior(yj, sigma, mu, 0.0);
        const NormalMoments unpooled = conditional_posterior(yj, sigma, mu, INFINITY);
        const NormalMoments near_unpooled = conditional_posterior(yj, sigma, mu, sigma * 1e8);
        if (pooled.mean != mu || pooled.sd != 0.0 || unpooled.mean != yj || unpooled.sd != sigma ||
            std::fabs(near_unpooled.mean - yj) > 1e-9 * (1.0 + std::fabs(yj - mu)) ||
            zscore_correction(sigma, 0.0) != 0.0 || zscore_correction(sigma, INFINITY) != 1.0) {
            ++limit_violations;
        }
    }
    o.require(worst <= 1e-12, "max relative error " + format_real(worst));
    o.require(bound_violations == 0, std::to_string(bound_violations) + " shrinkage-bound violations");
    o.require(limit_violations == 0, std::to_string(limit_violations) + " pooling-limit violations");
    o.note("1000 points, max rel err=" + format_real(worst));
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> y(-5.0, 5.0);
    std::uniform_real_distribution<double> s(0.5, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> ys = {y(gen), y(gen)};
        const std::vector<double> ss = {s(gen), s(gen)};
        const StudyDataset ds = make_dataset({{"1", ys[0], ss[0], {}}, {"2", ys[1], ss[1], {}}});
        const double tau_max = default_tau_max(ds);
        const auto draws = fit_grid(ds, 100000, GridConfig{1000, tau_max}, 100 + trial);
        double mean = 0.0;
        for (std::size_t d = 0; d < draws.n_draws; ++d) mean += draws.at(d, 0);
        mean /= static_cast<double>(draws.n_draws);
        const double exact = oracle::brute_force_theta_mean(ys, ss, tau_max, 0);
        worst = std::max(worst, std::fabs(mean - exact));
    }
    o.require(worst <= 0.05, "max |grid - brute force| = " + fmt(worst, 4));
    o.note("10 problems, max |diff|=" + fmt(worst, 4));
    return o;
}

Outcome procedure_properties() {
    Outcome o;
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> size(1, 50);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> p(static_cast<std::size_t>(size(gen)));
        for (auto& v : p) v = unit(gen) < 0.3 ? 0.05 * std::pow(unit(gen), 3.0) : unit(gen);
        const auto b = bonferroni(p, 0.05).rejected;
        const auto h = bh_fdr(p, 0.05).rejected;
        const auto u = uncorrected(p, 0.05).rejected;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if ((b[i] && !h[i]) || (h[i] && !u[i])) ++violations;
        }
    }
    const std::vector<double> fixture = {0.001, 0.013, 0.04, 0.2};
    const std::size_t rejected = bh_fdr(fixture, 0.05).n_rejected();
    o.require(violations == 0, std::to_string(violations) + " dominance violations");
    o.require(rejected == 2, "fixture rejects " + std::to_string(rejected));
    o.note("1000 vectors, fixture rejects " + std::to_string(rejected));
    return o;
}

Outcome large_spread_matrix() {
    Outcome o;
    const auto states = synthetic_states();
    const auto bayes = bayes_pairwise(fit_grid(states, 4000, GridConfig{}, 1), 0.95);
    const auto fdr = classical_pairwise(states, 0.05, Correction::BhFdr);
    o.require(bayes.n_directional() >= fdr.n_directional(),
              "bayes " + std::to_string(bayes.n_directional()) + " < fdr " + std::to_string(fdr.n_directional()));
    o.note("directional of 1275: bayes=" + std::to_string(bayes.n_directional()) +
           " fdr=" + std::to_string(fdr.n_directional()));
    return o;
}

Outcome determinism() {
    Outcome o;
#ifdef POOLCOMP_CLI
    const fs::path base = scratch();
    {
        std::ofstream(base / "p.csv") << "label,p_value\na,0.001\nb,0.013\nc,0.04\nd,0.2\n";
    }
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"fit --fixture eight-schools --draws 5000 --seed 4 --compare-classical",
         {"posterior_draws.csv", "posterior_summary.json", "run_manifest.json"}},
        {"correct --fixture eight-schools --method bonferroni", {"corrections.json", "run_manifest.json"}},
        {"correct --input " + (base / "p.csv").string() + " --format pvalues --method bh-fdr",
         {"corrections.json", "run_manifest.json"}},
        {"compare --fixture eight-schools --method bayes --draws 2000 --seed 4",
         {"matrix.csv", "evidence.csv", "run_manifest.json"}},
        {"compare --fixture states --method bh-fdr", {"matrix.csv", "evidence.csv", "run_manifest.json"}},
        {"simulate --preset eight-group-tau5 --reps 50 --seed 4", {"sim_report.json", "run_manifest.json"}},
        {"shrinkage --sigma-y 3", {"shrinkage.csv", "run_manifest.json"}},
    };
    int n = 0, compared = 0;
    for (const auto& [args, files] : runs) {
        const fs::path a = base / ("det" + std::to_string(n) + "a");
        const fs::path b = base / ("det" + std::to_string(n) + "b");
        ++n;
        const int ra = run_cli(args + " --out-dir " + a.string());
        const int rb = run_cli(args + " --out-dir " + b.string());
        o.require(ra == 0 && rb == 0, "'" + args + "' exited non-zero");
        for (const auto& f : files) {
            ++compared;
            o.require(fs::exists(a / f) && slurp(a / f) == slurp(b / f), "'" + args + "' " + f + " differs");
        }
    }
    o.note(std::to_string(runs.size()) + " invocations, " + std::to_string(compared) + " files byte-identical");
#else
    o.require(false, "CLI not built");
#endif
    return o;
}

}  // namespace

int main() {
    criterion(1, "8-schools posterior reproduction", eight_schools_posterior);
    criterion(2, "8-schools Bayesian comparisons all indeterminate", eight_schools_comparisons);
    criterion(3, "simulation study tau=5", [] { return simulation(5.0, true); });
    criterion(4, "simulation study tau=10", [] { return simulation(10.0, false); });
    criterion(5, "exact familywise and Bonferroni arithmetic", exact_arithmetic);
    criterion(6, "analytic identity suite", analytic_identities);
    criterion(7, "grid sampler vs brute-force integration", oracle_equivalence);
    criterion(8, "procedure dominance and BH fixture", procedure_properties);
    criterion(9, "large-spread matrix: Bayes >= FDR claims", large_spread_matrix);
    criterion(10, "CLI determinism", determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
