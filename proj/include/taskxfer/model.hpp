#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "taskxfer/matrix.hpp"

namespace taskxfer {

enum class PerceptualLevel { Low, Mid, High };
enum class Granularity { Pixel, Crop, Image };

std::string_view to_string(PerceptualLevel level);
std::string_view to_string(Granularity granularity);
std::optional<PerceptualLevel> parse_perceptual_level(std::string_view text);
std::optional<Granularity> parse_granularity(std::string_view text);

struct TaskSpec {
    std::string id;
    std::string abbreviation;
    PerceptualLevel perceptual_level = PerceptualLevel::Low;
    Granularity granularity = Granularity::Pixel;
    std::string name;  // display name, optional

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Ordered, validated task list. The order is the index space of every
/// matrix built against it.
class TaskSet {
public:
    TaskSet() = default;

    std::size_t size() const noexcept { return tasks_.size(); }
    const TaskSpec& operator[](std::size_t i) const { return tasks_[i]; }
    const std::vector<TaskSpec>& tasks() const noexcept { return tasks_; }

    std::optional<std::size_t> find(std::string_view id) const;
    /// Throws UnknownTaskId.
    std::size_t index_of(std::string_view id) const;

    friend bool operator==(const TaskSet& a, const TaskSet& b) { return a.tasks_ == b.tasks_; }

private:
    friend TaskSet validate_task_set(std::vector<TaskSpec> tasks);
    std::vector<TaskSpec> tasks_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Throws EmptyTaskList (fewer than two tasks) or DuplicateTaskId /
/// InvalidTask with every violation listed in Error::details().
TaskSet validate_task_set(std::vector<TaskSpec> tasks);

/// The 13 BLINK perception tasks with their two-axis taxonomy. Ids equal
/// the abbreviations.
TaskSet blink_task_set();

inline constexpr std::string_view kBaselineSource = "BASELINE";

struct EvalRecord {
    std::string model_id;
    std::int64_t seed = 0;
    std::optional<std::string> source;  // nullopt = baseline (not finetuned)
    std::string target;
    double accuracy = 0.0;  // percent
    int num_questions = 0;  // 0 = unknown question count

    bool is_baseline() const noexcept { return !source.has_value(); }
    friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct AccuracyMatrix {
    std::string model_id;
    std::int64_t seed = 0;
    std::vector<double> baseline;  // Acc(M, T_j)
    Matrix finetuned;              // row i = Acc(M(T_i), T_j)
    std::vector<int> questions;    // m_j, 0 = unknown

    std::size_t size() const noexcept { return baseline.size(); }
    friend bool operator==(const AccuracyMatrix&, const AccuracyMatrix&) = default;
};

struct Diagnostic {
    std::string message;
};

/// True when accuracy * m / 100 lies within 1e-6 of an integer. Always true
/// for the m = 0 sentinel.
bool on_accuracy_grid(double accuracy, int num_questions);

struct AssembleResult {
    std::vector<AccuracyMatrix> matrices;  // sorted by (model_id, seed)
    std::vector<Diagnostic> warnings;
};

/// Groups records by (model_id, seed) and fills one AccuracyMatrix per
/// group. Throws UnknownTaskId, DuplicateCell, MissingCell (every absent
/// cell in details(), formatted "source,target") or
/// InconsistentQuestionCount.
AssembleResult assemble_matrices(std::span<const EvalRecord> records, const TaskSet& task_set);

enum class CeilingMode { Fixed, BestObserved };

struct CeilingSpec {
    CeilingMode mode = CeilingMode::Fixed;
    double fixed_value = 100.0;
    std::map<std::string, double> per_task_override;

    /// Throws InvalidConfig when a ceiling falls outside (0, 100].
    void validate() const;
};

enum class SelectionStrategy { AbsoluteThreshold, ColumnPercentile };

struct AnalysisConfig {
    double epsilon = 1e-6;
    bool include_diagonal_in_scores = true;
    bool include_diagonal_in_categories = false;
    double min_gap_warn = 0.5;
    double alpha = 0.05;
    double edge_percentile = 20.0;
    SelectionStrategy selection_strategy = SelectionStrategy::AbsoluteThreshold;
    double selection_threshold = 0.0;   // PGF value, or percentile in (0, 100]
    bool exclude_self_from_average = false;

    /// Throws InvalidConfig.
    void validate() const;
};

}  // namespace taskxfer
