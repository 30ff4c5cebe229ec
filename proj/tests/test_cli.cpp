#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("poolcomp_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + " " + POOLCOMP_CLI + " " + args + " >" + (scratch() / "stdout.txt").string() +
                            " 2>" + (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string stderr_text() { return slurp(scratch() / "stderr.txt"); }

// Claim symbols in the body of a matrix CSV, skipping the header row and id column.
std::string matrix_cells(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, cells;
    std::getline(in, line);
    while (std::getline(in, line)) cells += line.substr(line.find(','));
    return cells;
}

std::string out(const std::string& name) { return (scratch() / name).string(); }

std::string write_file(const std::string& name, const std::string& content) {
    std::ofstream(scratch() / name) << content;
    return out(name);
}

const std::string kSchools = std::string(POOLCOMP_DATA_DIR) + "/eight_schools.csv";

}  // namespace

TEST_CASE("fit writes draws, summary, svg and manifest") {
    REQUIRE(run("fit --input " + kSchools + " --draws 20000 --seed 3 --compare-classical --out-dir " +
                out("fit")) == 0);
    const Json summary = Json::parse(slurp(out("fit/posterior_summary.json")));
    const double means[] = {11, 7, 6, 7, 5, 6, 10, 8};
    for (std::size_t j = 0; j < 8; ++j) CHECK(std::fabs(summary["groups"][j]["mean"].get<double>() - means[j]) <= 1.5);

    const std::string csv = slurp(out("fit/posterior_draws.csv"));
    CHECK(csv.rfind("draw,mu,tau,A,B,C,D,E,F,G,H\n", 0) == 0);

    const std::string svg = slurp(out("fit/intervals.svg"));
    CHECK(svg.find("data-title=\"Bonferroni\"") != std::string::npos);
    CHECK(svg.find("data-title=\"Multilevel\"") != std::string::npos);

    const Json manifest = Json::parse(slurp(out("fit/run_manifest.json")));
    CHECK(manifest["subcommand"] == "fit");
    CHECK(manifest["config"]["draws"] == 20000);
    CHECK(manifest["config"]["tau_max"].is_number());
    CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(manifest["outputs"].size() == 3);
}

TEST_CASE("fit with few draws records a warning") {
    REQUIRE(run("fit --fixture eight-schools --draws 100 --out-dir " + out("fit100")) == 0);
    const Json manifest = Json::parse(slurp(out("fit100/run_manifest.json")));
    REQUIRE(manifest["warnings"].size() >= 1);
    CHECK(manifest["warnings"][0].get<std::string>().find("below the recommended") != std::string::npos);
}

TEST_CASE("fit is byte-identical across runs and replays from its manifest") {
    REQUIRE(run("fit --fixture eight-schools --draws 2000 --seed 11 --out-dir " + out("fa")) == 0);
    REQUIRE(run("fit --fixture eight-schools --draws 2000 --seed 11 --out-dir " + out("fb")) == 0);
    REQUIRE(run("fit --config " + out("fa/run_manifest.json") + " --out-dir " + out("fc")) == 0);
    for (const char* f : {"posterior_draws.csv", "posterior_summary.json", "run_manifest.json", "intervals.svg"}) {
        CHECK(slurp(out(std::string("fa/") + f)) == slurp(out(std::string("fb/") + f)));
        CHECK(slurp(out(std::string("fa/") + f)) == slurp(out(std::string("fc/") + f)));
    }
}

TEST_CASE("POOLCOMP_SEED is the seed fallback") {
    REQUIRE(run("fit --fixture eight-schools --draws 500 --out-dir " + out("env1"), "POOLCOMP_SEED=42") == 0);
    REQUIRE(run("fit --fixture eight-schools --draws 500 --seed 42 --out-dir " + out("env2")) == 0);
    CHECK(slurp(out("env1/posterior_draws.csv")) == slurp(out("env2/posterior_draws.csv")));
    CHECK(run("fit --fixture eight-schools --draws 500 --out-dir " + out("env3"), "POOLCOMP_SEED=abc") == 2);
}

TEST_CASE("correct: bonferroni threshold on 8 schools") {
    REQUIRE(run("correct --input " + kSchools + " --method bonferroni --alpha 0.05 --out-dir " + out("bon")) == 0);
    const Json j = Json::parse(slurp(out("bon/corrections.json")));
    CHECK(j["per_test_threshold"].get<double>() == 0.00625);
    CHECK(j["m"] == 8);
    CHECK(j["tests"][0]["upper"].get<double>() == doctest::Approx(28 + 2.734368786533177 * 15));
    CHECK(fs::exists(out("bon/intervals.svg")));
}

TEST_CASE("correct: p-value fixture with bh-fdr") {
    const auto p = write_file("p.csv", "label,p_value\nt1,0.001\nt2,0.013\nt3,0.04\nt4,0.2\n");
    REQUIRE(run("correct --input " + p + " --format pvalues --method bh-fdr --alpha 0.05 --out-dir " + out("bh")) == 0);
    const Json j = Json::parse(slurp(out("bh/corrections.json")));
    CHECK(j["n_rejected"] == 2);
    CHECK(j["tests"][1]["rejected"] == true);
    CHECK(j["tests"][2]["rejected"] == false);
    CHECK_FALSE(fs::exists(out("bh/intervals.svg")));
}

TEST_CASE("correct: m = 1 gives the same decisions under none and bonferroni") {
    const auto p = write_file("p1.csv", "label,p_value\nonly,0.03\n");
    REQUIRE(run("correct --input " + p + " --format pvalues --method none --out-dir " + out("m1n")) == 0);
    REQUIRE(run("correct --input " + p + " --format pvalues --method bonferroni --out-dir " + out("m1b")) == 0);
    Json a = Json::parse(slurp(out("m1n/corrections.json")));
    Json b = Json::parse(slurp(out("m1b/corrections.json")));
    a.erase("method");
    b.erase("method");
    CHECK(a == b);
}

TEST_CASE("correct: FDR intervals are refused") {
    CHECK(run("correct --input " + kSchools + " --method bh-fdr --intervals --out-dir " + out("bad")) == 2);
    CHECK(stderr_text().find("no FDR intervals") != std::string::npos);
}

TEST_CASE("compare: 8 schools bayes matrix is all indeterminate") {
    REQUIRE(run("compare --fixture eight-schools --method bayes --level 0.95 --draws 4000 --out-dir " +
                out("cmp")) == 0);
    const std::string csv = matrix_cells(slurp(out("cmp/matrix.csv")));
    CHECK(csv.find('H') == std::string::npos);
    CHECK(csv.find('L') == std::string::npos);
    CHECK(slurp(out("cmp/matrix.svg")).find("data-claim=\".\"") != std::string::npos);
}

TEST_CASE("compare: states fixture, bayes claims at least as many as FDR") {
    REQUIRE(run("compare --fixture states --method bayes --out-dir " + out("sb")) == 0);
    REQUIRE(run("compare --fixture states --method bh-fdr --out-dir " + out("sf")) == 0);
    const auto directional = [](const std::string& csv) {
        return std::count(csv.begin(), csv.end(), 'H') + std::count(csv.begin(), csv.end(), 'L');
    };
    CHECK(directional(matrix_cells(slurp(out("sb/matrix.csv")))) >=
          directional(matrix_cells(slurp(out("sf/matrix.csv")))));
}

TEST_CASE("compare: two identical groups") {
    const auto f = write_file("twins.csv", "group,estimate,std_error\nx,3,1\ny,3,1\n");
    for (const char* m : {"none", "bonferroni", "bh-fdr", "bayes"}) {
        const std::string dir = out(std::string("tw_") + m);
        REQUIRE(run("compare --input " + f + " --method " + m + " --out-dir " + dir) == 0);
        CHECK(slurp(dir + "/matrix.csv") == "group,x,y\nx,,.\ny,.,\n");
    }
}

TEST_CASE("compare: sorting and validation") {
    REQUIRE(run("compare --fixture eight-schools --method none --sort-by-estimate --out-dir " + out("sorted")) == 0);
    CHECK(slurp(out("sorted/matrix.csv")).rfind("group,C,E,F,D,B,H,G,A\n", 0) == 0);
    CHECK(run("compare --fixture eight-schools --method holm --out-dir " + out("x")) == 2);
    CHECK(run("compare --fixture eight-schools --level 1.5 --out-dir " + out("x")) == 2);
}

TEST_CASE("simulate: minimal run and manifest replay") {
    REQUIRE(run("simulate --preset eight-group-tau5 --reps 1 --out-dir " + out("sim1")) == 0);
    const Json j = Json::parse(slurp(out("sim1/sim_report.json")));
    CHECK(j["config"]["n_reps"] == 1);
    CHECK(j["classical"]["n_claims"] == 28);

    REQUIRE(run("simulate --preset eight-group-tau10 --reps 20 --seed 5 --out-dir " + out("sim2")) == 0);
    REQUIRE(run("simulate --config " + out("sim2/run_manifest.json") + " --out-dir " + out("sim3")) == 0);
    CHECK(slurp(out("sim2/sim_report.json")) == slurp(out("sim3/sim_report.json")));
    CHECK(Json::parse(slurp(out("sim3/sim_report.json")))["config"]["tau_true"] == 10.0);

    CHECK(run("simulate --sigmas 1 --out-dir " + out("bad")) == 2);
    CHECK(run("simulate --reps 0 --out-dir " + out("bad")) == 2);
}

TEST_CASE("shrinkage: table and plot") {
    REQUIRE(run("shrinkage --sigma-y 2 --out-dir " + out("sh1")) == 0);
    REQUIRE(run("shrinkage --sigma-y 2 --out-dir " + out("sh2")) == 0);
    const std::string csv = slurp(out("sh1/shrinkage.csv"));
    CHECK(csv == slurp(out("sh2/shrinkage.csv")));
    CHECK(csv.rfind("variance_ratio,tau,factor\n", 0) == 0);
    CHECK(csv.find("\n1,2,0.7071067811865475\n") != std::string::npos);
    CHECK(run("shrinkage --sigma-y 0 --out-dir " + out("sh3")) == 2);
}

TEST_CASE("ingestion errors exit with code 2 and row context") {
    const auto f = write_file("zero.csv", "group,estimate,std_error\na,1,1\nb,2,0\n");
    CHECK(run("fit --input " + f + " --out-dir " + out("e1")) == 2);
    CHECK(stderr_text().find("row 3") != std::string::npos);
    const auto one = write_file("one.csv", "group,estimate,std_error\na,1,1\n");
    CHECK(run("fit --input " + one + " --out-dir " + out("e2")) == 2);
    CHECK(run("fit --out-dir " + out("e3")) == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("unit-level input is reduced before fitting") {
    const auto f = write_file("units.csv",
                              "group,outcome,treatment\n"
                              "a,0,0\na,2,0\na,3,1\na,5,1\n"
                              "b,1,0\nb,2,0\nb,1,1\nb,4,1\n"
                              "c,3,0\nc,4,0\nc,8,1\nc,6,1\n");
    REQUIRE(run("correct --input " + f + " --format units --method none --out-dir " + out("units")) == 0);
    const Json j = Json::parse(slurp(out("units/corrections.json")));
    CHECK(j["tests"][0]["estimate"].get<double>() == doctest::Approx(3.0));
    CHECK(j["tests"][0]["std_error"].get<double>() == doctest::Approx(std::sqrt(2.0)));
}
