#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "poolcomp/classical.hpp"
#include "poolcomp/comparisons.hpp"
#include "poolcomp/error.hpp"
#include "poolcomp/fixtures.hpp"
#include "poolcomp/group_data.hpp"
#include "poolcomp/hier_model.hpp"
#include "poolcomp/io.hpp"
#include "poolcomp/normal.hpp"
#include "poolcomp/sim_study.hpp"
#include "poolcomp/version.hpp"

namespace py = pybind11;
using namespace poolcomp;

namespace {

StudyDataset dataset_from(const std::vector<std::tuple<std::string, double, double>>& rows) {
    std::vector<GroupSummary> groups;
    for (const auto& [id, est, se] : rows) groups.push_back({id, est, se, {}});
    return make_dataset(std::move(groups));
}

py::array_t<double> draws_array(const PosteriorDraws& d) {
    py::array_t<double> out({d.n_draws, d.n_groups()});
    std::copy(d.theta.begin(), d.theta.end(), out.mutable_data());
    return out;
}

py::object json_to_py(const Json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiple comparisons, classical corrections and hierarchical partial pooling";
    m.attr("__version__") = kVersion;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<GroupSummary>(m, "GroupSummary")
        .def_readonly("group_id", &GroupSummary::group_id)
        .def_readonly("estimate", &GroupSummary::estimate)
        .def_readonly("std_error", &GroupSummary::std_error)
        .def_readonly("n", &GroupSummary::n)
        .def("__repr__", [](const GroupSummary& g) {
            return "GroupSummary('" + g.group_id + "', " + format_real(g.estimate) + ", " +
                   format_real(g.std_error) + ")";
        });

    py::class_<StudyDataset>(m, "StudyDataset")
        .def(py::init(&dataset_from), py::arg("rows"),
             "Build from (group_id, estimate, std_error) tuples")
        .def_readonly("summaries", &StudyDataset::summaries)
        .def_property_readonly("group_ids", &StudyDataset::group_ids)
        .def_property_readonly("estimates", &StudyDataset::estimates)
        .def_property_readonly("std_errors", &StudyDataset::std_errors)
        .def("__len__", &StudyDataset::size);

    m.def("load_summaries", [](const std::string& path) { return load_summaries(path); }, py::arg("path"));
    m.def("eight_schools", &eight_schools);
    m.def("synthetic_states", &synthetic_states, py::arg("seed") = kStatesSeed);
    m.def(
        "reduce_units",
        [](const std::vector<std::tuple<std::string, double, std::optional<int>>>& records) {
            std::vector<UnitRecord> units;
            for (const auto& [id, y, t] : records) units.push_back({id, y, t});
            return reduce_units(units);
        },
        py::arg("records"), "Records are (group_id, outcome, treatment-or-None) tuples");

    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("inverse_normal_cdf", &inverse_normal_cdf, py::arg("p"));
    m.def("familywise_error_rate", &familywise_error_rate, py::arg("alpha"), py::arg("m"));

    py::class_<TestResult>(m, "TestResult")
        .def_readonly("label", &TestResult::label)
        .def_readonly("estimate", &TestResult::estimate)
        .def_readonly("std_error", &TestResult::std_error)
        .def_readonly("z", &TestResult::z)
        .def_readonly("p_value", &TestResult::p_value);

    py::class_<CorrectionOutcome>(m, "CorrectionOutcome")
        .def_property_readonly("method", [](const CorrectionOutcome& o) { return to_string(o.method); })
        .def_readonly("level", &CorrectionOutcome::level)
        .def_readonly("per_test_threshold", &CorrectionOutcome::per_test_threshold)
        .def_readonly("rejected", &CorrectionOutcome::rejected)
        .def_readonly("interval_multiplier", &CorrectionOutcome::interval_multiplier)
        .def_property_readonly("n_rejected", &CorrectionOutcome::n_rejected);

    m.def("bonferroni", [](const std::vector<double>& p, double alpha) { return bonferroni(p, alpha); },
          py::arg("p_values"), py::arg("alpha"));
    m.def("bh_fdr", [](const std::vector<double>& p, double q) { return bh_fdr(p, q); },
          py::arg("p_values"), py::arg("q"));
    m.def("pairwise_z_tests", &pairwise_z_tests, py::arg("data"));
    m.def(
        "confidence_intervals",
        [](const StudyDataset& data, double alpha, const std::string& method) {
            const IntervalSet set = confidence_intervals(data, alpha, parse_correction(method));
            std::vector<std::tuple<std::string, double, double, double>> out;
            for (const auto& iv : set.intervals) out.emplace_back(iv.label, iv.center, iv.lower, iv.upper);
            return out;
        },
        py::arg("data"), py::arg("alpha") = 0.05, py::arg("method") = "none");

    m.def(
        "conditional_posterior",
        [](double y, double s, double mu, double tau) {
            const auto r = conditional_posterior(y, s, mu, tau);
            return py::make_tuple(r.mean, r.sd);
        },
        py::arg("y_bar"), py::arg("sigma_y"), py::arg("mu"), py::arg("tau"));
    m.def("zscore_correction", &zscore_correction, py::arg("sigma_y"), py::arg("tau"));
    m.def(
        "pair_posterior",
        [](double yj, double yk, double s, double tau) {
            const auto r = pair_posterior(yj, yk, s, tau);
            return py::make_tuple(r.mean, r.sd, r.z);
        },
        py::arg("y_bar_j"), py::arg("y_bar_k"), py::arg("sigma_y"), py::arg("tau"));

    py::class_<PosteriorDraws>(m, "PosteriorDraws")
        .def_readonly("group_ids", &PosteriorDraws::group_ids)
        .def_readonly("n_draws", &PosteriorDraws::n_draws)
        .def_readonly("seed", &PosteriorDraws::seed)
        .def_readonly("tau_max", &PosteriorDraws::tau_max)
        .def_readonly("warnings", &PosteriorDraws::warnings)
        .def_property_readonly("theta", &draws_array)
        .def_property_readonly("mu", [](const PosteriorDraws& d) {
            std::vector<double> v;
            for (const auto& h : d.hypers) v.push_back(h.mu);
            return v;
        })
        .def_property_readonly("tau", [](const PosteriorDraws& d) {
            std::vector<double> v;
            for (const auto& h : d.hypers) v.push_back(h.tau);
            return v;
        });

    m.def(
        "fit_grid",
        [](const StudyDataset& data, std::size_t n_draws, std::uint64_t seed, std::size_t grid_points,
           std::optional<double> tau_max) {
            return fit_grid(data, n_draws, GridConfig{grid_points, tau_max}, seed);
        },
        py::arg("data"), py::arg("n_draws") = 4000, py::arg("seed") = 1, py::arg("grid_points") = 1000,
        py::arg("tau_max") = py::none());

    m.def(
        "summarize",
        [](const PosteriorDraws& d) { return json_to_py(summary_json(summarize(d), d)); },
        py::arg("draws"), "Posterior summary as a dict");

    py::class_<ComparisonMatrix>(m, "ComparisonMatrix")
        .def_readonly("group_ids", &ComparisonMatrix::group_ids)
        .def_readonly("method", &ComparisonMatrix::method)
        .def_readonly("level", &ComparisonMatrix::level)
        .def_property_readonly("n_directional", &ComparisonMatrix::n_directional)
        .def("claim", [](const ComparisonMatrix& mat, std::size_t j, std::size_t k) {
            return std::string(1, claim_symbol(mat.claim(j, k)));
        })
        .def("evidence", &ComparisonMatrix::evidence_at)
        .def("claims_csv", [](const ComparisonMatrix& mat) { return claims_csv(mat); });

    m.def("bayes_pairwise", &bayes_pairwise, py::arg("draws"), py::arg("level") = 0.95);
    m.def(
        "classical_pairwise",
        [](const StudyDataset& data, double alpha, const std::string& correction) {
            return classical_pairwise(data, alpha, parse_correction(correction));
        },
        py::arg("data"), py::arg("alpha") = 0.05, py::arg("correction") = "none");
    m.def(
        "score_claims",
        [](const ComparisonMatrix& mat, const std::vector<double>& truths) {
            const ClaimScore s = score_claims(mat, truths);
            return py::make_tuple(s.n_claims, s.n_significant, s.n_correct_sign);
        },
        py::arg("matrix"), py::arg("truths"), "Returns (n_claims, n_significant, n_correct_sign)");

    m.def(
        "run_study",
        [](double tau_true, std::size_t n_reps, std::uint64_t seed, const std::string& analysis,
           std::optional<std::vector<double>> sigmas, double alpha, std::size_t bayes_draws) {
            SimConfig c = eight_group_preset(tau_true, seed);
            c.n_reps = n_reps;
            c.analysis = parse_analysis(analysis);
            if (sigmas) c.sigma_list = *sigmas;
            c.alpha = alpha;
            c.bayes_draws = bayes_draws;
            SimReport r;
            {
                py::gil_scoped_release release;
                r = run_study(c);
            }
            return json_to_py(sim_report_json(r));
        },
        py::arg("tau_true") = 5.0, py::arg("n_reps") = 1000, py::arg("seed") = 20080101,
        py::arg("analysis") = "both", py::arg("sigmas") = py::none(), py::arg("alpha") = 0.05,
        py::arg("bayes_draws") = 1000, "Simulation study; returns the JSON report as a dict");
}
