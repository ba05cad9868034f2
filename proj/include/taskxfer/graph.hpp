#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taskxfer/matrix.hpp"
#include "taskxfer/model.hpp"
#include "taskxfer/pgf.hpp"
#include "taskxfer/stats.hpp"

namespace taskxfer {

enum class EdgeSign { Positive, Negative };

std::string_view to_string(EdgeSign sign);

struct TransferEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    double weight = 0.0;  // seed-mean PGF
    EdgeSign sign = EdgeSign::Positive;

    friend bool operator==(const TransferEdge&, const TransferEdge&) = default;
};

struct TransferGraph {
    TaskSet task_set;
    std::vector<TransferEdge> edges;  // sorted by (source, target)
    double percentile = 20.0;
    std::string provenance;           // e.g. "model=qwen-3b seeds=4 (mean)"

    std::size_t count(EdgeSign sign) const;
};

/// Number of edges kept from a sign class of `class_size` cells:
/// ceil(percentile / 100 * class_size).
std::size_t kept_edge_count(double percentile, std::size_t class_size);

/// Keeps the strongest config.edge_percentile percent of the strictly
/// positive and of the strictly negative off-diagonal seed-mean cells,
/// ranked by |weight| with ties broken by (source id, target id).
TransferGraph build_graph(const PGFSummary& summary, const TaskSet& task_set, const AnalysisConfig& config);

struct PairStat {
    std::size_t source = 0;
    std::size_t target = 0;
    double mean_pgf = 0.0;
};

struct Clique {
    std::vector<std::size_t> indices;  // ascending
    std::vector<std::string> members;  // task ids, same order
    EdgeSign sign = EdgeSign::Positive;
    bool maximal = true;
    std::optional<TestResult> stability;  // pooled one-sample Wilcoxon vs 0
    double p_value = 1.0;
    bool significant = false;
    std::vector<PairStat> per_pair_stats;
};

struct CliqueOptions {
    bool maximal_only = true;
    WilcoxonOptions wilcoxon;
};

/// Sign-consistency graph on the seed-mean matrix: {i, j} is an edge when
/// both mean(i->j) and mean(j->i) carry `sign` strictly.
std::vector<std::vector<bool>> consistency_graph(const Matrix& mean_pgf, EdgeSign sign);

/// Maximal cliques (size >= 2) of an undirected graph, each sorted
/// ascending, found by pivoted recursive enumeration.
std::vector<std::vector<std::size_t>> maximal_cliques(const std::vector<std::vector<bool>>& adjacency);

/// Finds task cliques of consistent `sign` on the seed-mean matrix and tests
/// each for stability by pooling every per-seed ordered-pair PGF inside the
/// clique into one one-sided Wilcoxon signed-rank test against 0. Result is
/// sorted by (size desc, p asc, members).
std::vector<Clique> find_cliques(std::span<const PGFMatrix> pgf_per_seed, const TaskSet& task_set, EdgeSign sign,
                                 const AnalysisConfig& config, const CliqueOptions& options = {});

/// Exhaustive subset search for maximal sign-consistent cliques. Throws
/// TooLarge for more than 16 tasks.
std::vector<std::vector<std::size_t>> brute_force_cliques(const Matrix& mean_pgf, EdgeSign sign);

}  // namespace taskxfer
