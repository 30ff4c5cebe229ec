// poolcomp: classical multiple-comparison corrections and hierarchical
// partial pooling from the command line.
//
// Every subcommand writes its outputs plus run_manifest.json into --out-dir.
// Passing a manifest back through --config reproduces the run.
//
// Exit codes: 0 success, 2 input or validation error, 3 numerical failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "poolcomp/classical.hpp"
#include "poolcomp/comparisons.hpp"
#include "poolcomp/error.hpp"
#include "poolcomp/fixtures.hpp"
#include "poolcomp/group_data.hpp"
#include "poolcomp/hier_model.hpp"
#include "poolcomp/io.hpp"
#include "poolcomp/sim_study.hpp"
#include "poolcomp/svg.hpp"
#include "poolcomp/version.hpp"

namespace fs = std::filesystem;
using namespace poolcomp;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

/// Collects outputs for one run and writes each file atomically.
class Run {
public:
    Run(std::string subcommand, fs::path out_dir)
        : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
        fs::create_directories(out_dir_);
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path target = out_dir_ / name;
        const fs::path tmp = out_dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw InputError(tmp.string() + ": cannot write");
            out << content;
            if (!out) throw InputError(tmp.string() + ": write failed");
        }
        fs::rename(tmp, target);
        outputs_.push_back(name);
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    void add_input(const fs::path& path) {
        inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
    }

    void warn(const std::string& message) {
        std::cerr << "warning: " << message << "\n";
        warnings_.push_back(message);
    }

    void finish(const Json& config, std::uint64_t seed) {
        Json m;
        m["tool"] = "poolcomp";
        m["version"] = kVersion;
        m["subcommand"] = subcommand_;
        m["config"] = config;
        m["seed"] = seed;
        m["inputs"] = inputs_;
        m["warnings"] = warnings_;
        m["outputs"] = outputs_;
        const std::string body = m.dump(2) + "\n";
        const fs::path tmp = out_dir_ / "run_manifest.json.tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << body;
        }
        fs::rename(tmp, out_dir_ / "run_manifest.json");
    }

private:
    std::string subcommand_;
    fs::path out_dir_;
    Json inputs_ = Json::array();
    Json warnings_ = Json::array();
    std::vector<std::string> outputs_;
};

Json load_config(const std::string& path, const std::string& subcommand) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open config");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    if (j.contains("subcommand") && j.contains("config")) {
        if (j["subcommand"] != subcommand) {
            throw InputError(path + ": manifest is for '" + j["subcommand"].get<std::string>() +
                             "', not '" + subcommand + "'");
        }
        return j["config"];
    }
    return j;
}

/// Takes a value from the config file unless the flag was given explicitly.
template <typename T>
void from_config(const Json& cfg, const CLI::App* cmd, const std::string& key, T& field) {
    if (!cfg.contains(key) || cmd->count("--" + [&] {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            return flag;
        }()) > 0) {
        return;
    }
    try {
        if constexpr (std::is_same_v<T, std::optional<double>>) {
            field = cfg[key].is_null() ? std::nullopt : std::optional<double>(cfg[key].get<double>());
        } else {
            field = cfg[key].get<T>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config key '" + key + "': " + e.what());
    }
}

std::uint64_t resolve_seed(const CLI::App* cmd, std::uint64_t flag_value, bool from_cfg) {
    if (cmd->count("--seed") > 0 || from_cfg) return flag_value;
    if (const char* env = std::getenv("POOLCOMP_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InputError(std::string("POOLCOMP_SEED is not an integer: '") + env + "'");
        }
    }
    return kDefaultSeed;
}

Json grid_json(std::size_t points, const std::optional<double>& tau_max) {
    return {{"grid_points", points}, {"tau_max", tau_max ? Json(*tau_max) : Json(nullptr)}};
}

// ---------------------------------------------------------------------------
// Data input shared by fit, correct, compare.

struct InputOptions {
    std::string input;
    std::string fixture;
    std::string format = "summary";

    void add(CLI::App* cmd, bool allow_pvalues) {
        cmd->add_option("--input", input, "CSV file with group summaries or unit records");
        cmd->add_option("--fixture", fixture, "Bundled dataset instead of --input")
            ->check(CLI::IsMember({"eight-schools", "states"}));
        std::vector<std::string> formats = {"summary", "units"};
        if (allow_pvalues) formats.push_back("pvalues");
        cmd->add_option("--format", format, "Input schema")->check(CLI::IsMember(formats));
    }

    void merge(const Json& cfg, const CLI::App* cmd) {
        from_config(cfg, cmd, "input", input);
        from_config(cfg, cmd, "fixture", fixture);
        from_config(cfg, cmd, "format", format);
    }

    Json to_json() const {
        return {{"input", input}, {"fixture", fixture}, {"format", format}};
    }

    StudyDataset load(Run& run) const {
        if (input.empty() == fixture.empty()) {
            throw InputError("exactly one of --input or --fixture is required");
        }
        if (!fixture.empty()) return fixture == "states" ? synthetic_states() : eight_schools();
        run.add_input(input);
        if (format == "units") {
            auto ds = make_dataset(reduce_units(load_units(input)), Provenance::ReducedFromUnits);
            ds.metadata["source"] = fs::path(input).filename().string();
            return ds;
        }
        return load_summaries(input);
    }
};

// p-value list: header `label,p_value`.
std::vector<TestResult> load_p_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    std::string line;
    std::size_t line_no = 0;
    std::vector<TestResult> tests;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != "label,p_value") throw InputError(path + ": header must be 'label,p_value'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        const std::string ctx = path + ": row " + std::to_string(line_no);
        if (comma == std::string::npos) throw InputError(ctx + ": expected 2 fields");
        TestResult t;
        t.label = line.substr(0, comma);
        try {
            std::size_t used = 0;
            const std::string field = line.substr(comma + 1);
            t.p_value = std::stod(field, &used);
            if (used != field.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw InputError(ctx + ": p_value is not a number");
        }
        if (!(t.p_value >= 0.0 && t.p_value <= 1.0)) throw InputError(ctx + ": p_value must lie in [0, 1]");
        t.estimate = std::numeric_limits<double>::quiet_NaN();
        t.std_error = std::numeric_limits<double>::quiet_NaN();
        t.z = std::numeric_limits<double>::quiet_NaN();
        tests.push_back(std::move(t));
    }
    if (tests.empty()) throw InputError(path + ": no p-values");
    return tests;
}

double pooled_estimate(const StudyDataset& data) {
    double num = 0.0, den = 0.0;
    for (const auto& s : data.summaries) {
        const double w = 1.0 / (s.std_error * s.std_error);
        num += w * s.estimate;
        den += w;
    }
    return num / den;
}

svg::IntervalPanel classical_panel(const StudyDataset& data, double alpha, Correction method,
                                   const std::string& title) {
    const IntervalSet set = confidence_intervals(data, alpha, method);
    svg::IntervalPanel panel;
    panel.title = title;
    for (const auto& iv : set.intervals) panel.rows.push_back({iv.label, iv.center, iv.lower, iv.upper});
    panel.dashed_line = pooled_estimate(data);
    return panel;
}

// ---------------------------------------------------------------------------

struct FitOptions {
    InputOptions in;
    std::size_t draws = 10000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t grid_points = 1000;
    std::optional<double> tau_max;
    double alpha = 0.05;
    bool compare_classical = false;
    std::string out_dir;
    std::string config;
};

int cmd_fit(const FitOptions& flags, const CLI::App* cmd) {
    FitOptions o = flags;
    bool seed_in_cfg = false;
    if (!o.config.empty()) {
        const Json cfg = load_config(o.config, "fit");
        o.in.merge(cfg, cmd);
        from_config(cfg, cmd, "draws", o.draws);
        from_config(cfg, cmd, "seed", o.seed);
        from_config(cfg, cmd, "grid_points", o.grid_points);
        from_config(cfg, cmd, "tau_max", o.tau_max);
        from_config(cfg, cmd, "alpha", o.alpha);
        from_config(cfg, cmd, "compare_classical", o.compare_classical);
        seed_in_cfg = cfg.contains("seed");
    }
    o.seed = resolve_seed(cmd, o.seed, seed_in_cfg);

    Run run("fit", o.out_dir);
    const StudyDataset data = o.in.load(run);
    GridConfig grid{o.grid_points, o.tau_max};
    const PosteriorDraws draws = fit_grid(data, o.draws, grid, o.seed);
    for (const auto& w : draws.warnings) run.warn(w);
    const PosteriorSummary summary = summarize(draws);

    run.write("posterior_draws.csv", draws_csv(draws));
    run.write_json("posterior_summary.json", summary_json(summary, draws));

    std::vector<svg::IntervalPanel> panels;
    if (o.compare_classical) {
        panels.push_back(classical_panel(data, o.alpha, Correction::None, "Classical"));
        panels.push_back(classical_panel(data, o.alpha, Correction::Bonferroni, "Bonferroni"));
    }
    svg::IntervalPanel multilevel;
    multilevel.title = "Multilevel";
    for (const auto& g : summary.groups) multilevel.rows.push_back({g.group_id, g.mean, g.lower, g.upper});
    multilevel.dashed_line = pooled_estimate(data);
    panels.push_back(std::move(multilevel));
    run.write("intervals.svg", svg::render_intervals(panels, "effect"));

    Json cfg = o.in.to_json();
    cfg["draws"] = o.draws;
    cfg["seed"] = o.seed;
    cfg.update(grid_json(o.grid_points, draws.tau_max));
    cfg["alpha"] = o.alpha;
    cfg["compare_classical"] = o.compare_classical;
    run.finish(cfg, o.seed);
    return 0;
}

// ---------------------------------------------------------------------------

struct CorrectOptions {
    InputOptions in;
    double alpha = 0.05;
    std::string method = "bonferroni";
    bool intervals = false;
    std::string out_dir;
    std::string config;
};

int cmd_correct(const CorrectOptions& flags, const CLI::App* cmd) {
    CorrectOptions o = flags;
    if (!o.config.empty()) {
        const Json cfg = load_config(o.config, "correct");
        o.in.merge(cfg, cmd);
        from_config(cfg, cmd, "alpha", o.alpha);
        from_config(cfg, cmd, "method", o.method);
        from_config(cfg, cmd, "intervals", o.intervals);
    }
    const Correction method = parse_correction(o.method);
    if (method == Correction::BhFdr && o.intervals) {
        throw InputError("no FDR intervals: bh-fdr produces rejection sets only; drop --intervals");
    }

    Run run("correct", o.out_dir);
    std::vector<TestResult> tests;
    std::optional<StudyDataset> data;
    if (o.in.format == "pvalues") {
        if (o.in.input.empty()) throw InputError("--format pvalues requires --input");
        if (o.intervals) throw InputError("--intervals needs estimates; p-value input has none");
        run.add_input(o.in.input);
        tests = load_p_values(o.in.input);
    } else {
        data = o.in.load(run);
        tests = group_z_tests(*data);
    }

    const auto p = p_values_of(tests);
    const CorrectionOutcome outcome = apply_correction(method, p, o.alpha);
    std::optional<IntervalSet> intervals;
    if (data && method != Correction::BhFdr) intervals = confidence_intervals(*data, o.alpha, method);

    run.write_json("corrections.json", correction_json(tests, outcome, intervals));
    if (intervals) {
        std::vector<svg::IntervalPanel> panels = {classical_panel(
            *data, o.alpha, method, method == Correction::None ? "Classical" : "Bonferroni")};
        run.write("intervals.svg", svg::render_intervals(panels, "effect"));
    }

    Json cfg = o.in.to_json();
    cfg["alpha"] = o.alpha;
    cfg["method"] = o.method;
    cfg["intervals"] = o.intervals;
    run.finish(cfg, 0);
    return 0;
}

// ---------------------------------------------------------------------------

struct CompareOptions {
    InputOptions in;
    std::string method = "bayes";
    double level = 0.95;
    std::optional<double> alpha;
    std::size_t draws = 4000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t grid_points = 1000;
    std::optional<double> tau_max;
    bool sort_by_estimate = false;
    std::string out_dir;
    std::string config;
};

int cmd_compare(const CompareOptions& flags, const CLI::App* cmd) {
    CompareOptions o = flags;
    bool seed_in_cfg = false;
    if (!o.config.empty()) {
        const Json cfg = load_config(o.config, "compare");
        o.in.merge(cfg, cmd);
        from_config(cfg, cmd, "method", o.method);
        from_config(cfg, cmd, "level", o.level);
        from_config(cfg, cmd, "draws", o.draws);
        from_config(cfg, cmd, "seed", o.seed);
        from_config(cfg, cmd, "grid_points", o.grid_points);
        from_config(cfg, cmd, "tau_max", o.tau_max);
        from_config(cfg, cmd, "sort_by_estimate", o.sort_by_estimate);
        seed_in_cfg = cfg.contains("seed");
    }
    if (o.alpha) o.level = 1.0 - *o.alpha;
    if (!(o.level > 0.0 && o.level < 1.0)) throw InputError("--level must lie in (0, 1)");
    o.seed = resolve_seed(cmd, o.seed, seed_in_cfg);

    Run run("compare", o.out_dir);
    const StudyDataset data = o.in.load(run);
    Json cfg = o.in.to_json();
    cfg["method"] = o.method;
    cfg["level"] = o.level;

    ComparisonMatrix matrix;
    if (o.method == "bayes") {
        GridConfig grid{o.grid_points, o.tau_max};
        const PosteriorDraws draws = fit_grid(data, o.draws, grid, o.seed);
        for (const auto& w : draws.warnings) run.warn(w);
        matrix = bayes_pairwise(draws, o.level);
        cfg["draws"] = o.draws;
        cfg["seed"] = o.seed;
        cfg.update(grid_json(o.grid_points, draws.tau_max));
    } else {
        matrix = classical_pairwise(data, 1.0 - o.level, parse_correction(o.method));
    }
    cfg["sort_by_estimate"] = o.sort_by_estimate;

    std::vector<std::size_t> by_estimate(data.size());
    std::iota(by_estimate.begin(), by_estimate.end(), 0);
    std::stable_sort(by_estimate.begin(), by_estimate.end(), [&](std::size_t a, std::size_t b) {
        return data.summaries[a].estimate < data.summaries[b].estimate;
    });
    const ComparisonMatrix sorted = matrix.permuted(by_estimate);
    const ComparisonMatrix& table = o.sort_by_estimate ? sorted : matrix;

    run.write("matrix.csv", claims_csv(table));
    run.write("evidence.csv", evidence_csv(table));
    run.write("matrix.svg", svg::render_matrix(sorted, "Pairwise comparisons (" + matrix.method + ", level " +
                                                           format_real(o.level) + ")"));
    std::cout << matrix.n_directional() << " of " << data.size() * (data.size() - 1) / 2
              << " pairs carry a directional claim\n";
    run.finish(cfg, o.method == "bayes" ? o.seed : 0);
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string preset;
    double tau_true = 5.0;
    double mu_true = 0.0;
    std::vector<double> sigmas;
    std::size_t reps = 1000;
    double alpha = 0.05;
    std::string analysis = "both";
    std::size_t draws = 1000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t grid_points = 1000;
    std::optional<double> tau_max;
    std::string correction = "none";
    std::size_t threads = 1;
    std::string out_dir;
    std::string config;
};

int cmd_simulate(const SimulateOptions& o, const CLI::App* cmd) {
    SimConfig c;
    c.sigma_list = eight_schools_std_errors();
    bool seed_given = false;
    if (!o.preset.empty()) {
        c = eight_group_preset(o.preset == "eight-group-tau10" ? 10.0 : 5.0, o.seed);
    }
    if (!o.config.empty()) {
        const Json cfg = load_config(o.config, "simulate");
        c = sim_config_from_json(cfg, c);
        seed_given = cfg.contains("seed");
    }
    const auto given = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (given("--tau-true")) c.tau_true = o.tau_true;
    if (given("--mu-true")) c.mu_true = o.mu_true;
    if (given("--sigmas")) c.sigma_list = o.sigmas;
    if (given("--reps")) c.n_reps = o.reps;
    if (given("--alpha")) c.alpha = o.alpha;
    if (given("--analysis")) c.analysis = parse_analysis(o.analysis);
    if (given("--draws")) c.bayes_draws = o.draws;
    if (given("--grid-points")) c.grid.n_points = o.grid_points;
    if (given("--tau-max")) c.grid.tau_max = o.tau_max;
    if (given("--correction")) c.correction = parse_correction(o.correction);
    if (given("--seed") || !seed_given) c.seed = resolve_seed(cmd, o.seed, false);
    c.validate();

    Run run("simulate", o.out_dir);
    const SimReport report = run_study(c, o.threads);
    run.write_json("sim_report.json", sim_report_json(report));

    for (const auto& [name, arm] : {std::pair{"classical", report.classical}, std::pair{"bayes", report.bayes}}) {
        if (!arm) continue;
        std::cout << std::fixed << std::setprecision(2) << name << ": " << arm->pct_significant
                  << "% significant, ";
        if (arm->pct_correct_sign) {
            std::cout << *arm->pct_correct_sign << "% correct sign, ";
        } else {
            std::cout << "n/a correct sign, ";
        }
        std::cout << arm->pct_any_significant << "% of reps with any significant\n";
    }
    run.finish(sim_config_json(c), c.seed);
    return 0;
}

// ---------------------------------------------------------------------------

struct ShrinkageOptions {
    double sigma_y = 1.0;
    int per_decade = 10;
    std::string out_dir;
};

int cmd_shrinkage(const ShrinkageOptions& o) {
    if (!(o.sigma_y > 0.0)) throw InputError("--sigma-y must be > 0");
    Run run("shrinkage", o.out_dir);
    const auto table = shrinkage_table(o.sigma_y, o.per_decade);
    run.write("shrinkage.csv", shrinkage_csv(table));
    run.write("shrinkage.svg", svg::render_shrinkage(table, o.sigma_y));
    run.finish({{"sigma_y", o.sigma_y}, {"per_decade", o.per_decade}}, 0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"poolcomp: multiple comparisons, classical corrections and partial pooling"};
    app.set_version_flag("--version", std::string("poolcomp ") + kVersion);
    app.require_subcommand(1);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the hierarchical model by grid simulation");
    fit.in.add(fit_cmd, false);
    fit_cmd->add_option("--draws", fit.draws, "Posterior draws")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--seed", fit.seed, "Random seed (falls back to POOLCOMP_SEED)");
    fit_cmd->add_option("--grid-points", fit.grid_points, "Points on the tau grid");
    fit_cmd->add_option("--tau-max", fit.tau_max, "Upper bound of the uniform tau prior");
    fit_cmd->add_option("--alpha", fit.alpha, "Level for the classical comparison panels");
    fit_cmd->add_flag("--compare-classical", fit.compare_classical,
                      "Add classical and Bonferroni panels to intervals.svg");
    fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory")->required();
    fit_cmd->add_option("--config", fit.config, "JSON config or run manifest to replay");

    CorrectOptions correct;
    auto* correct_cmd = app.add_subcommand("correct", "Per-group tests with a classical correction");
    correct.in.add(correct_cmd, true);
    correct_cmd->add_option("--alpha", correct.alpha, "Significance (or FDR) level");
    correct_cmd->add_option("--method", correct.method, "Correction")
        ->check(CLI::IsMember({"none", "bonferroni", "bh-fdr"}));
    correct_cmd->add_flag("--intervals", correct.intervals, "Require interval output");
    correct_cmd->add_option("--out-dir", correct.out_dir, "Output directory")->required();
    correct_cmd->add_option("--config", correct.config, "JSON config or run manifest to replay");

    CompareOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "All-pairs comparison matrix");
    compare.in.add(compare_cmd, false);
    compare_cmd->add_option("--method", compare.method, "bayes or a classical correction")
        ->check(CLI::IsMember({"none", "bonferroni", "bh-fdr", "bayes"}));
    compare_cmd->add_option("--level", compare.level, "Confidence level for a claim");
    compare_cmd->add_option("--alpha", compare.alpha, "Shorthand for --level 1-alpha");
    compare_cmd->add_option("--draws", compare.draws, "Posterior draws (bayes)")->check(CLI::PositiveNumber);
    compare_cmd->add_option("--seed", compare.seed, "Random seed (falls back to POOLCOMP_SEED)");
    compare_cmd->add_option("--grid-points", compare.grid_points, "Points on the tau grid");
    compare_cmd->add_option("--tau-max", compare.tau_max, "Upper bound of the uniform tau prior");
    compare_cmd->add_flag("--sort-by-estimate", compare.sort_by_estimate,
                          "Order CSV rows and columns by raw estimate");
    compare_cmd->add_option("--out-dir", compare.out_dir, "Output directory")->required();
    compare_cmd->add_option("--config", compare.config, "JSON config or run manifest to replay");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Replicated Type S / Type M simulation study");
    sim_cmd->add_option("--preset", sim.preset, "Start from a preset")
        ->check(CLI::IsMember({"eight-group-tau5", "eight-group-tau10"}));
    sim_cmd->add_option("--tau-true", sim.tau_true, "Sd of the true effects");
    sim_cmd->add_option("--mu-true", sim.mu_true, "Mean of the true effects");
    sim_cmd->add_option("--sigmas", sim.sigmas, "Comma-separated standard errors")->delimiter(',');
    sim_cmd->add_option("--reps", sim.reps, "Replications")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--alpha", sim.alpha, "Significance level");
    sim_cmd->add_option("--analysis", sim.analysis, "Arms to run")
        ->check(CLI::IsMember({"classical", "bayes", "both"}));
    sim_cmd->add_option("--draws", sim.draws, "Posterior draws per Bayes fit")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Master seed (falls back to POOLCOMP_SEED)");
    sim_cmd->add_option("--grid-points", sim.grid_points, "Points on the tau grid");
    sim_cmd->add_option("--tau-max", sim.tau_max, "Fixed tau prior bound for every fit");
    sim_cmd->add_option("--correction", sim.correction, "Classical arm correction")
        ->check(CLI::IsMember({"none", "bonferroni", "bh-fdr"}));
    sim_cmd->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->required();
    sim_cmd->add_option("--config", sim.config, "JSON SimConfig or run manifest to replay");

    ShrinkageOptions shrink;
    auto* shrink_cmd = app.add_subcommand("shrinkage", "Tabulate and plot the z-score correction factor");
    shrink_cmd->add_option("--sigma-y", shrink.sigma_y, "Standard error of each group estimate");
    shrink_cmd->add_option("--per-decade", shrink.per_decade, "Grid points per decade of variance ratio")
        ->check(CLI::PositiveNumber);
    shrink_cmd->add_option("--out-dir", shrink.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit, fit_cmd);
        if (*correct_cmd) return cmd_correct(correct, correct_cmd);
        if (*compare_cmd) return cmd_compare(compare, compare_cmd);
        if (*sim_cmd) return cmd_simulate(sim, sim_cmd);
        if (*shrink_cmd) return cmd_shrinkage(shrink);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
