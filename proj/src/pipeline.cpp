#include "taskxfer/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <thread>

#include "taskxfer/aggregate.hpp"
#include "taskxfer/error.hpp"
#include "taskxfer/graph.hpp"
#include "taskxfer/personas.hpp"
#include "taskxfer/pgf.hpp"
#include "taskxfer/selection.hpp"

namespace taskxfer {

namespace {

std::vector<PGFMatrix> compute_pgf(const std::vector<AccuracyMatrix>& matrices, const TaskSet& task_set,
                                   const PipelineOptions& options) {
    std::vector<PGFMatrix> out(matrices.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(matrices.size())));
    if (workers == 1) {
        for (std::size_t k = 0; k < matrices.size(); ++k)
            out[k] = pgf_matrix(matrices[k], task_set, options.ceiling, options.config);
        return out;
    }
    // each worker owns a strided slice of the output; no shared writes
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < matrices.size(); k += workers)
                        out[k] = pgf_matrix(matrices[k], task_set, options.ceiling, options.config);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string warning_text(const PGFMatrix& m, const PgfWarning& w, const TaskSet& tasks) {
    std::string where = m.model_id + "/seed " + std::to_string(m.seed) + " ";
    if (w.kind == PgfWarningKind::ZeroGapUnderBestObserved)
        return "ZeroGapUnderBestObserved: " + where + "column " + tasks[w.target].id +
               " has no headroom above its baseline";
    return "NearCeiling: " + where + tasks[*w.source].id + "->" + tasks[w.target].id +
           " baseline is within min_gap_warn of the ceiling";
}

}  // namespace

io::AnalysisReport run_analysis(const std::vector<EvalRecord>& records, const TaskSet& task_set,
                                const PipelineOptions& options) {
    options.ceiling.validate();
    options.config.validate();
    for (const auto& t : options.targets) task_set.index_of(t);

    AssembleResult assembled = assemble_matrices(records, task_set);
    io::AnalysisReport report;
    report.task_set = task_set;
    report.warnings = assembled.warnings;
    if (assembled.matrices.empty()) return report;

    const std::vector<PGFMatrix> all = compute_pgf(assembled.matrices, task_set, options);
    for (const auto& m : all)
        for (const auto& w : m.warnings) report.warnings.push_back({warning_text(m, w, task_set)});

    // assembled matrices arrive sorted by (model_id, seed)
    std::vector<ModelScores> persona_input;
    for (std::size_t begin = 0; begin < all.size();) {
        std::size_t end = begin;
        while (end < all.size() && all[end].model_id == all[begin].model_id) ++end;
        std::vector<PGFMatrix> per_seed(all.begin() + static_cast<std::ptrdiff_t>(begin),
                                        all.begin() + static_cast<std::ptrdiff_t>(end));
        begin = end;

        io::ModelAnalysis model;
        model.model_id = per_seed.front().model_id;
        model.summary = pgf_summary(per_seed);
        model.transfer = all_transferability(model.summary.mean, task_set, options.config);
        model.malleability = all_malleability(model.summary.mean, task_set, options.config);
        model.transfer_average = model_average(std::span<const TransferScore>(model.transfer));
        model.malleability_average = model_average(std::span<const MalleabilityScore>(model.malleability));

        ModelScores scores;
        scores.model_id = model.model_id;
        for (const auto& m : per_seed) {
            SeedScores s;
            s.seed = m.seed;
            s.transfer = all_transferability(m.values, task_set, options.config);
            s.malleability = all_malleability(m.values, task_set, options.config);
            scores.seeds.push_back(s);
        }
        model.seed_scores = scores.seeds;
        persona_input.push_back(std::move(scores));

        for (CategoryAxis axis : {CategoryAxis::PerceptualLevel, CategoryAxis::Granularity}) {
            auto cats = category_aggregate(per_seed, task_set, axis, options.config);
            model.categories.insert(model.categories.end(), cats.begin(), cats.end());
        }
        model.graph = build_graph(model.summary, task_set, options.config);

        CliqueOptions clique_options;
        clique_options.maximal_only = !options.all_cliques;
        for (EdgeSign sign : {EdgeSign::Positive, EdgeSign::Negative}) {
            auto cliques = find_cliques(per_seed, task_set, sign, options.config, clique_options);
            model.cliques.insert(model.cliques.end(), cliques.begin(), cliques.end());
        }

        std::vector<std::string> targets = options.targets;
        if (targets.empty())
            for (const auto& t : task_set.tasks()) targets.push_back(t.id);
        for (const auto& target : targets)
            model.plans.push_back(recommend_mixture(model.summary, task_set, target, options.config));

        model.per_seed = std::move(per_seed);
        report.models.push_back(std::move(model));
    }
    report.personas = classify_personas(persona_input, options.config);
    return report;
}

std::string file_stem(const std::string& model_id) {
    std::string out;
    for (char c : model_id) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += safe ? c : '_';
    }
    return out.empty() ? "model" : out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace

std::vector<std::string> write_outputs(const io::AnalysisReport& report, const std::filesystem::path& directory,
                                       bool heatmap_with_std) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + directory.string() + ": " + ec.message());

    std::map<std::string, std::string> files;
    files["report.json"] = io::export_report_json(report);
    for (const auto& m : report.models) {
        const std::string stem = file_stem(m.model_id);
        files["pgf_" + stem + ".csv"] = io::export_heatmap_csv(m.summary, report.task_set, heatmap_with_std);
        files["pgf_" + stem + ".svg"] = io::export_svg_heatmap(m.summary, report.task_set);
        files["graph_" + stem + ".dot"] = io::export_dot(m.graph);
    }
    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
        write_text(directory / name, text);
        names.push_back(name);
    }
    return names;
}

}  // namespace taskxfer
