#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "taskxfer/aggregate.hpp"
#include "taskxfer/cli.hpp"
#include "taskxfer/error.hpp"
#include "taskxfer/graph.hpp"
#include "taskxfer/io.hpp"
#include "taskxfer/pgf.hpp"
#include "taskxfer/pipeline.hpp"
#include "taskxfer/stats.hpp"
#include "taskxfer/synth.hpp"

namespace py = pybind11;
using namespace taskxfer;

namespace {

Sidedness parse_alternative(const std::string& alternative) {
    if (alternative == "greater") return Sidedness::OneSidedGreater;
    if (alternative == "less") return Sidedness::OneSidedLess;
    if (alternative == "two-sided") return Sidedness::TwoSided;
    throw py::value_error("alternative must be 'greater', 'less' or 'two-sided'");
}

py::dict test_result(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["method"] = std::string(to_string(r.method));
    d["sample_size"] = r.sample_size;
    if (r.method == TestMethod::WelchT || r.method == TestMethod::PooledT) d["df"] = r.degrees_of_freedom;
    return d;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw py::value_error("matrix must be square");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

EdgeSign parse_sign(const std::string& sign) {
    if (sign == "positive") return EdgeSign::Positive;
    if (sign == "negative") return EdgeSign::Negative;
    throw py::value_error("sign must be 'positive' or 'negative'");
}

std::string analyze(const std::string& records_text, const std::optional<std::string>& tasks_csv,
                    const std::string& ceiling, double fixed_ceiling, const std::map<std::string, double>& overrides,
                    double percentile, double alpha, bool include_diagonal, const std::vector<std::string>& targets,
                    unsigned threads) {
    PipelineOptions options;
    if (ceiling == "best") {
        options.ceiling.mode = CeilingMode::BestObserved;
    } else if (ceiling == "fixed") {
        options.ceiling.fixed_value = fixed_ceiling;
    } else {
        throw py::value_error("ceiling must be 'fixed' or 'best'");
    }
    for (const auto& [id, value] : overrides) options.ceiling.per_task_override[id] = value;
    options.config.edge_percentile = percentile;
    options.config.alpha = alpha;
    options.config.include_diagonal_in_scores = include_diagonal;
    options.targets = targets;
    options.threads = threads;
    const TaskSet tasks = tasks_csv ? io::parse_task_set_csv(*tasks_csv) : blink_task_set();
    py::gil_scoped_release release;
    return io::export_report_json(run_analysis(io::parse_records(records_text), tasks, options));
}

std::string synth(double noise, std::uint64_t rng_seed, int questions, const std::string& format) {
    PlantedDesign design;
    design.noise_std = noise;
    design.rng_seed = rng_seed;
    design.questions = questions;
    const auto records = generate(default_planted_structure(design)).records;
    if (format == "csv") return io::write_records_csv(records);
    if (format == "json") return io::write_records_json(records);
    throw py::value_error("format must be 'csv' or 'json'");
}

}  // namespace

PYBIND11_MODULE(_taskxfer, m) {
    m.doc() = "Task transferability analysis core";
    m.attr("__version__") = kToolVersion;

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result(
        [&m]() { return py::exception<Error>(m, "TaskxferError", PyExc_ValueError); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::object& type = error_type.get_stored();
            py::object instance = type(e.what());
            instance.attr("code") = std::string(to_string(e.code()));
            instance.attr("details") = e.details();
            PyErr_SetObject(type.ptr(), instance.ptr());
        }
    });

    m.def("pgf_cell", &pgf_cell, py::arg("baseline"), py::arg("finetuned"), py::arg("ceiling"),
          py::arg("epsilon") = 1e-6, "Perfection gap factor of one cell, accuracies in percent");
    m.def("pgf_min_bound", &pgf_min_bound, py::arg("num_questions"));

    m.def(
        "breadth_weighted_score",
        [](const std::vector<double>& values, std::size_t task_count) {
            const auto s = breadth_weighted_score(values, task_count);
            return py::make_tuple(s.positive, s.negative, s.positive_count, s.negative_count);
        },
        py::arg("values"), py::arg("task_count"), "(positive, negative, p, n) for one row or column");

    m.def(
        "wilcoxon_signed_rank",
        [](const std::vector<double>& samples, double mu0, const std::string& alternative) {
            return test_result(wilcoxon_signed_rank(samples, mu0, parse_alternative(alternative)));
        },
        py::arg("samples"), py::arg("mu0") = 0.0, py::arg("alternative") = "two-sided");
    m.def(
        "t_test",
        [](const std::vector<double>& a, const std::vector<double>& b, bool welch, const std::string& alternative) {
            return test_result(unpaired_t_test(a, b, welch ? TTestVariant::Welch : TTestVariant::Pooled,
                                               parse_alternative(alternative)));
        },
        py::arg("a"), py::arg("b"), py::arg("welch") = true, py::arg("alternative") = "two-sided");
    m.def("t_cdf", &t_cdf, py::arg("t"), py::arg("df"));

    m.def(
        "maximal_cliques",
        [](const std::vector<std::vector<double>>& matrix, const std::string& sign) {
            return maximal_cliques(consistency_graph(to_matrix(matrix), parse_sign(sign)));
        },
        py::arg("matrix"), py::arg("sign") = "positive", "Maximal sign-consistent index sets of a mean PGF matrix");

    m.def("analyze_json", &analyze, py::arg("records"), py::arg("tasks_csv") = std::nullopt,
          py::arg("ceiling") = "fixed", py::arg("fixed_ceiling") = 100.0,
          py::arg("overrides") = std::map<std::string, double>{}, py::arg("percentile") = 20.0,
          py::arg("alpha") = 0.05, py::arg("include_diagonal") = true,
          py::arg("targets") = std::vector<std::string>{}, py::arg("threads") = 1u,
          "Full analysis of record text (CSV or JSON); returns the report document");
    m.def("synth", &synth, py::arg("noise") = 0.0, py::arg("rng_seed") = 20250101u, py::arg("questions") = 0,
          py::arg("format") = "csv", "Records for the default planted structure");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr)");
}
