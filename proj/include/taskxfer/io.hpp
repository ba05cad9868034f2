#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taskxfer/aggregate.hpp"
#include "taskxfer/graph.hpp"
#include "taskxfer/model.hpp"
#include "taskxfer/personas.hpp"
#include "taskxfer/pgf.hpp"
#include "taskxfer/selection.hpp"
#include "taskxfer/synth.hpp"

namespace taskxfer::io {

inline constexpr int kSchemaVersion = 1;

enum class RecordFormat { DelimitedText, StructuredRecords };

/// Comma-separated records with a mandatory header naming the columns
/// model_id, seed, source, target, accuracy, num_questions in any order.
/// Source "BASELINE" marks baseline rows. Errors name the 1-based line.
std::vector<EvalRecord> parse_records_csv(std::string_view text);

/// {"schema_version": 1, "records": [{...}, ...]}
std::vector<EvalRecord> parse_records_json(std::string_view text);

/// Picks the format from the first non-blank character ('{' = structured).
std::vector<EvalRecord> parse_records(std::string_view text);

std::vector<EvalRecord> read_records(const std::filesystem::path& path);

/// Canonical column order; accuracy in shortest round-trip form.
std::string write_records_csv(const std::vector<EvalRecord>& records);
std::string write_records_json(const std::vector<EvalRecord>& records);

/// Task taxonomy file: header id,abbreviation,perceptual_level,granularity[,name].
TaskSet parse_task_set_csv(std::string_view text);
std::string write_task_set_csv(const TaskSet& task_set);

/// Fixed-point formatting with a collapsed negative zero.
std::string format_fixed(double value, int decimals);

std::string export_heatmap_csv(const PGFSummary& summary, const TaskSet& task_set, bool with_std = false);

std::string export_dot(const TransferGraph& graph);

struct ColorScale {
    std::string negative_color = "#b2182b";
    std::string positive_color = "#2166ac";
    int cell_size = 40;
};

std::string export_svg_heatmap(const PGFSummary& summary, const TaskSet& task_set, const ColorScale& scale = {});

/// Interpolated "#rrggbb" for `value` on the diverging scale [-range, range].
std::string diverging_color(double value, double range, const ColorScale& scale);

struct ModelAnalysis {
    std::string model_id;
    std::vector<PGFMatrix> per_seed;
    PGFSummary summary;
    std::vector<TransferScore> transfer;            // on the seed-mean matrix
    std::vector<MalleabilityScore> malleability;    // on the seed-mean matrix
    ScoreAverage transfer_average;
    ScoreAverage malleability_average;
    std::vector<SeedScores> seed_scores;
    std::vector<CategoryAggregate> categories;      // both axes
    TransferGraph graph;
    std::vector<Clique> cliques;                    // both signs
    std::vector<MixturePlan> plans;
};

struct RunManifest {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::string ceiling;
    std::map<std::string, std::string> config;
    std::optional<std::string> timestamp;
    std::string tool_version;
};

struct AnalysisReport {
    RunManifest manifest;
    TaskSet task_set;
    std::vector<ModelAnalysis> models;
    PersonaResult personas;
    std::vector<Diagnostic> warnings;
};

std::string export_report_json(const AnalysisReport& report);

/// Planted-structure document for the synth subcommand. Either
/// {"preset": "default", ...design overrides} or a full description with
/// baseline, ceiling, effects and planted features. "tasks" defaults to the
/// BLINK task set.
PlantedStructure parse_structure_json(std::string_view text);
std::string write_structure_json(const PlantedStructure& structure);

/// Cliques and personas read back from an exported report, per model.
struct ReportFindings {
    std::vector<std::string> model_ids;
    std::vector<std::vector<Clique>> cliques;  // parallel to model_ids
    std::vector<PersonaReport> personas;
};
ReportFindings parse_report_findings(std::string_view report_json);

}  // namespace taskxfer::io
