#include "taskxfer/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "taskxfer/error.hpp"
#include "taskxfer/io.hpp"
#include "taskxfer/pipeline.hpp"
#include "taskxfer/synth.hpp"

namespace taskxfer::cli {

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << text;
}

TaskSet load_tasks(const std::string& path) {
    if (path.empty()) return blink_task_set();
    return io::parse_task_set_csv(read_text(path));
}

std::vector<EvalRecord> load_records(const std::vector<std::string>& inputs) {
    std::vector<EvalRecord> records;
    for (const auto& path : inputs) {
        auto part = io::read_records(path);
        records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return records;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw UsageError(what);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("invalid " + what + ": '" + text + "'");
    }
}

CeilingSpec parse_ceiling(const std::string& text, const std::vector<std::string>& overrides) {
    CeilingSpec spec;
    if (text == "best") {
        spec.mode = CeilingMode::BestObserved;
    } else if (text == "fixed") {
        spec.mode = CeilingMode::Fixed;
    } else if (text.starts_with("fixed:")) {
        spec.mode = CeilingMode::Fixed;
        spec.fixed_value = parse_double(text.substr(6), "ceiling");
    } else {
        throw UsageError("--ceiling expects fixed:<percent> or best, got '" + text + "'");
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--ceiling-override expects TASK=PERCENT");
        spec.per_task_override[o.substr(0, eq)] = parse_double(o.substr(eq + 1), "ceiling override");
    }
    return spec;
}

void parse_threshold(const std::string& text, AnalysisConfig& config) {
    if (text.starts_with("pct:")) {
        config.selection_strategy = SelectionStrategy::ColumnPercentile;
        config.selection_threshold = parse_double(text.substr(4), "threshold percentile");
    } else {
        config.selection_strategy = SelectionStrategy::AbsoluteThreshold;
        config.selection_threshold = parse_double(text, "threshold");
    }
}

std::string shortest(double v) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, result.ptr);
}

nlohmann::json error_json(const Error& e) {
    return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", e.details()}};
}

struct AnalyzeArgs {
    std::vector<std::string> inputs;
    std::string output_dir = "taskxfer-out";
    std::string tasks;
    std::string ceiling = "fixed:100";
    std::vector<std::string> ceiling_overrides;
    double percentile = 20.0;
    double alpha = 0.05;
    bool include_diagonal = true;
    bool category_diagonal = false;
    std::vector<std::string> targets;
    std::string threshold = "0";
    double epsilon = 1e-6;
    double min_gap_warn = 0.5;
    bool exclude_self = false;
    bool all_cliques = false;
    bool with_std = false;
    unsigned threads = 1;
    std::string timestamp;
};

int cmd_validate(const std::vector<std::string>& inputs, const std::string& tasks_path, bool json_errors,
                 std::ostream& out, std::ostream& err) {
    nlohmann::json doc = {{"ok", true}, {"errors", nlohmann::json::array()}, {"warnings", nlohmann::json::array()}};
    int status = kSuccess;
    try {
        const TaskSet tasks = load_tasks(tasks_path);
        const auto records = load_records(inputs);
        const auto assembled = assemble_matrices(records, tasks);
        for (const auto& w : assembled.warnings) {
            err << "warning: " << w.message << '\n';
            doc["warnings"].push_back(w.message);
        }
        err << "ok: " << records.size() << " records, " << assembled.matrices.size() << " (model, seed) matrices\n";
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& d : e.details()) err << "  " << d << '\n';
        doc["ok"] = false;
        doc["errors"].push_back(error_json(e));
        status = kDataError;
    }
    if (json_errors) out << doc.dump(2) << '\n';
    return status;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
    PipelineOptions options;
    options.ceiling = parse_ceiling(a.ceiling, a.ceiling_overrides);
    options.config.epsilon = a.epsilon;
    options.config.include_diagonal_in_scores = a.include_diagonal;
    options.config.include_diagonal_in_categories = a.category_diagonal;
    options.config.min_gap_warn = a.min_gap_warn;
    options.config.alpha = a.alpha;
    options.config.edge_percentile = a.percentile;
    options.config.exclude_self_from_average = a.exclude_self;
    parse_threshold(a.threshold, options.config);
    options.targets = a.targets;
    options.all_cliques = a.all_cliques;
    options.threads = std::max(1u, a.threads);

    const TaskSet tasks = load_tasks(a.tasks);
    const auto records = load_records(a.inputs);
    io::AnalysisReport report = run_analysis(records, tasks, options);

    auto& manifest = report.manifest;
    manifest.subcommand = "analyze";
    manifest.inputs = a.inputs;
    if (!a.tasks.empty()) manifest.inputs.push_back(a.tasks);
    manifest.ceiling = a.ceiling;
    manifest.tool_version = kToolVersion;
    if (!a.timestamp.empty()) {
        manifest.timestamp = a.timestamp;
    } else if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        manifest.timestamp = epoch;
    }
    auto& cfg = manifest.config;
    cfg["alpha"] = shortest(a.alpha);
    cfg["epsilon"] = shortest(a.epsilon);
    cfg["min_gap_warn"] = shortest(a.min_gap_warn);
    cfg["edge_percentile"] = shortest(a.percentile);
    cfg["include_diagonal_in_scores"] = a.include_diagonal ? "true" : "false";
    cfg["include_diagonal_in_categories"] = a.category_diagonal ? "true" : "false";
    cfg["exclude_self_from_average"] = a.exclude_self ? "true" : "false";
    cfg["threshold"] = a.threshold;
    cfg["all_cliques"] = a.all_cliques ? "true" : "false";
    for (const auto& [id, value] : options.ceiling.per_task_override) cfg["ceiling_override." + id] = shortest(value);
    std::string target_list;
    for (const auto& t : a.targets) target_list += (target_list.empty() ? "" : ",") + t;
    cfg["targets"] = target_list;

    for (const auto& w : report.warnings) err << "warning: " << w.message << '\n';
    const auto files = write_outputs(report, a.output_dir, a.with_std);
    for (const auto& f : files) out << (std::filesystem::path(a.output_dir) / f).string() << '\n';
    return kSuccess;
}

int cmd_synth(const std::string& structure_path, const CLI::App& sub, double noise, std::uint64_t rng_seed,
              int questions, const std::string& format, const std::string& output,
              const std::string& structure_out, std::ostream& out) {
    PlantedStructure structure = structure_path.empty() ? default_planted_structure()
                                                        : io::parse_structure_json(read_text(structure_path));
    if (sub.count("--noise")) structure.noise_std = noise;
    if (sub.count("--rng-seed")) structure.rng_seed = rng_seed;
    if (sub.count("--questions")) structure.questions.assign(structure.task_set.size(), questions);

    const SynthOutput data = generate(structure);
    const std::string text =
        format == "json" ? io::write_records_json(data.records) : io::write_records_csv(data.records);
    if (output == "-") {
        out << text;
    } else {
        write_text(output, text);
    }
    if (!structure_out.empty()) write_text(structure_out, io::write_structure_json(structure));
    return kSuccess;
}

int cmd_report(const std::string& report_path, const std::string& structure_path, std::ostream& out) {
    const auto findings = io::parse_report_findings(read_text(report_path));
    for (std::size_t m = 0; m < findings.model_ids.size(); ++m) {
        out << "model " << findings.model_ids[m] << '\n';
        for (const auto& c : findings.cliques[m]) {
            if (!c.maximal) continue;
            out << "  clique" << (c.sign == EdgeSign::Positive ? "+" : "-") << " {";
            for (std::size_t k = 0; k < c.members.size(); ++k) out << (k ? "," : "") << c.members[k];
            out << "} p=" << io::format_fixed(c.p_value, 6) << (c.significant ? " significant" : "") << '\n';
        }
    }
    for (const auto& p : findings.personas)
        if (p.consistent) out << "persona " << to_string(p.persona) << " " << p.task_id << '\n';

    if (!structure_path.empty()) {
        const PlantedStructure structure = io::parse_structure_json(read_text(structure_path));
        std::vector<Clique> cliques;
        for (const auto& per_model : findings.cliques) cliques.insert(cliques.end(), per_model.begin(), per_model.end());
        // a planted clique must show up in every model
        RecoveryReport combined;
        bool first = true;
        for (const auto& per_model : findings.cliques) {
            RecoveryReport r = recovery_report(structure, per_model, findings.personas);
            if (first) {
                combined = r;
                first = false;
                continue;
            }
            for (std::size_t k = 0; k < r.features.size(); ++k)
                combined.features[k].recovered = combined.features[k].recovered && r.features[k].recovered;
        }
        if (first) combined = recovery_report(structure, cliques, findings.personas);
        std::size_t hits = 0;
        for (const auto& f : combined.features) {
            out << "planted " << f.feature << ": " << (f.recovered ? "recovered" : "missed") << '\n';
            hits += f.recovered ? 1 : 0;
        }
        const double recall = combined.features.empty() ? 1.0 : static_cast<double>(hits) / combined.features.size();
        out << "recall " << io::format_fixed(recall, 4) << '\n';
    }
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cross-task transfer analysis from finetuning evaluation results", "taskxfer"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "TOML/INI config file; flags override it");
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "Parse and assemble record files, report problems");
    std::vector<std::string> validate_inputs;
    std::string validate_tasks;
    bool json_errors = false;
    validate->add_option("inputs", validate_inputs, "Record files (CSV or JSON)")->required()->check(CLI::ExistingFile);
    validate->add_option("--tasks", validate_tasks, "Task taxonomy CSV (default: BLINK tasks)");
    validate->add_flag("--json-errors", json_errors, "Print a machine-readable result document on stdout");

    auto* analyze = app.add_subcommand("analyze", "Run the full analysis and write reports");
    AnalyzeArgs a;
    analyze->add_option("inputs", a.inputs, "Record files (CSV or JSON)")->required()->check(CLI::ExistingFile);
    analyze->add_option("-o,--output-dir", a.output_dir, "Output directory")->envname("TASKXFER_OUTPUT_DIR");
    analyze->add_option("--tasks", a.tasks, "Task taxonomy CSV (default: BLINK tasks)");
    analyze->add_option("--ceiling", a.ceiling, "fixed:<percent> or best");
    analyze->add_option("--ceiling-override", a.ceiling_overrides, "TASK=PERCENT, repeatable");
    analyze->add_option("--percentile", a.percentile, "Percent of strongest edges kept per sign");
    analyze->add_option("--alpha", a.alpha, "Significance level");
    analyze->add_option("--include-diagonal", a.include_diagonal, "Include self-transfer in scores (true/false)");
    analyze->add_flag("--category-diagonal", a.category_diagonal, "Include self-transfer in category aggregates");
    analyze->add_option("--target", a.targets, "Mixture target task, repeatable (default: all)");
    analyze->add_option("--threshold", a.threshold, "Selection threshold X or pct:Q");
    analyze->add_option("--epsilon", a.epsilon, "PGF denominator constant");
    analyze->add_option("--min-gap-warn", a.min_gap_warn, "Warn when ceiling - baseline is below this");
    analyze->add_flag("--exclude-self-from-average", a.exclude_self, "Persona averages skip the candidate task");
    analyze->add_flag("--all-cliques", a.all_cliques, "Report non-maximal cliques too");
    analyze->add_flag("--with-std", a.with_std, "Append ±std to heatmap CSV cells");
    analyze->add_option("--threads", a.threads, "Worker threads for PGF computation")->envname("TASKXFER_THREADS");
    analyze->add_option("--timestamp", a.timestamp, "Timestamp recorded in the manifest (default: SOURCE_DATE_EPOCH)");

    auto* synth = app.add_subcommand("synth", "Generate a planted-structure record file");
    std::string structure_path;
    std::string synth_format = "csv";
    std::string synth_output;
    std::string structure_out;
    double noise = 0.0;
    std::uint64_t rng_seed = 0;
    int questions = 0;
    synth->add_option("--structure", structure_path, "Structure JSON (default: built-in planted design)");
    synth->add_option("--noise", noise, "Gaussian noise std in accuracy points");
    synth->add_option("--rng-seed", rng_seed, "Noise stream seed");
    synth->add_option("--questions", questions, "Question count for every task (0 disables quantization)");
    synth->add_option("--format", synth_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    synth->add_option("-o,--output", synth_output, "Output file, '-' for stdout")->required();
    synth->add_option("--structure-out", structure_out, "Also write the effective structure JSON");

    auto* report = app.add_subcommand("report", "Summarize an analysis report, optionally against planted truth");
    std::string report_path;
    std::string report_structure;
    report->add_option("report", report_path, "report.json from analyze")->required()->check(CLI::ExistingFile);
    report->add_option("--structure", report_structure, "Structure JSON to score recovery against");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*validate) return cmd_validate(validate_inputs, validate_tasks, json_errors, out, err);
        if (*analyze) return cmd_analyze(a, out, err);
        if (*synth)
            return cmd_synth(structure_path, *synth, noise, rng_seed, questions, synth_format, synth_output,
                             structure_out, out);
        if (*report) return cmd_report(report_path, report_structure, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& d : e.details()) err << "  " << d << '\n';
        return e.code() == ErrorCode::InvalidConfig ? kUsageError : kDataError;
    }
    return kUsageError;
}

}  // namespace taskxfer::cli
