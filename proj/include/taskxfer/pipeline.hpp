#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "taskxfer/io.hpp"
#include "taskxfer/model.hpp"

namespace taskxfer {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineOptions {
    CeilingSpec ceiling;
    AnalysisConfig config;
    std::vector<std::string> targets;  // mixture targets; empty = every task
    bool all_cliques = false;          // include non-maximal cliques
    unsigned threads = 1;
};

/// Runs assembly, PGF, scores, category aggregates, transfer graphs,
/// cliques, personas and mixture plans for every model in `records`.
io::AnalysisReport run_analysis(const std::vector<EvalRecord>& records, const TaskSet& task_set,
                                const PipelineOptions& options);

/// Writes report.json plus pgf_<model>.csv, pgf_<model>.svg and
/// graph_<model>.dot. Returns the written file names, sorted.
std::vector<std::string> write_outputs(const io::AnalysisReport& report, const std::filesystem::path& directory,
                                       bool heatmap_with_std = false);

/// Model id made safe for file names.
std::string file_stem(const std::string& model_id);

}  // namespace taskxfer
