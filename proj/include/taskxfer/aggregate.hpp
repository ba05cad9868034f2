#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taskxfer/matrix.hpp"
#include "taskxfer/model.hpp"
#include "taskxfer/pgf.hpp"

namespace taskxfer {

/// Positive and negative parts of a breadth-weighted score.
struct DirectionalScore {
    std::string task_id;
    double positive = 0.0;   // >= 0
    double negative = 0.0;   // <= 0
    int positive_count = 0;  // p
    int negative_count = 0;  // n
};

/// How a source task moves the targets it is transferred to (row-wise).
struct TransferScore : DirectionalScore {};
/// How a target task is moved by the sources finetuned on (column-wise).
struct MalleabilityScore : DirectionalScore {};

/// Breadth-weighted sum over `values`:
///
///     positive = (1 - exp(-p / task_count)) / p * sum of entries > 0
///     negative = (1 - exp(-n / task_count)) / n * sum of entries < 0
///
/// Exact zeros count towards neither side; an empty side scores 0.
DirectionalScore breadth_weighted_score(std::span<const double> values, std::size_t task_count);

TransferScore transferability(const PGFMatrix& pgf, std::size_t source, const TaskSet& task_set,
                              const AnalysisConfig& config);
MalleabilityScore malleability(const PGFMatrix& pgf, std::size_t target, const TaskSet& task_set,
                               const AnalysisConfig& config);

// Matrix-level variants used on seed means.
TransferScore transferability(const Matrix& pgf, std::size_t source, const TaskSet& task_set,
                              const AnalysisConfig& config);
MalleabilityScore malleability(const Matrix& pgf, std::size_t target, const TaskSet& task_set,
                               const AnalysisConfig& config);

std::vector<TransferScore> all_transferability(const Matrix& pgf, const TaskSet& task_set,
                                               const AnalysisConfig& config);
std::vector<MalleabilityScore> all_malleability(const Matrix& pgf, const TaskSet& task_set,
                                                const AnalysisConfig& config);

struct ScoreAverage {
    double positive = 0.0;
    double negative = 0.0;
};

/// Arithmetic mean of the positive and of the negative parts. Throws EmptyInput.
ScoreAverage model_average(std::span<const DirectionalScore> scores);
ScoreAverage model_average(std::span<const TransferScore> scores);
ScoreAverage model_average(std::span<const MalleabilityScore> scores);

enum class CategoryAxis { PerceptualLevel, Granularity };

std::string_view to_string(CategoryAxis axis);

struct CategoryAggregate {
    CategoryAxis axis = CategoryAxis::PerceptualLevel;
    std::string source_category;
    std::string target_category;
    double positive_mean = 0.0;
    double negative_mean = 0.0;
    int positive_samples = 0;
    int negative_samples = 0;
    int pair_count = 0;  // task cells per seed
    int seed_count = 0;
};

/// For every ordered pair of non-empty categories on `axis`, pools the
/// (seed, source task, target task) PGF samples and averages the positive
/// ones and the negative ones separately. Diagonal cells are skipped unless
/// config.include_diagonal_in_categories is set.
std::vector<CategoryAggregate> category_aggregate(std::span<const PGFMatrix> pgf_per_seed,
                                                  const TaskSet& task_set, CategoryAxis axis,
                                                  const AnalysisConfig& config);

}  // namespace taskxfer
