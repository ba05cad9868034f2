#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taskxfer/model.hpp"
#include "taskxfer/pgf.hpp"

namespace taskxfer {

struct WeightedSource {
    std::string task_id;
    double weight = 0.0;
    double mean_pgf = 0.0;
};

struct ExcludedSource {
    std::string task_id;
    double mean_pgf = 0.0;
    std::string reason;
};

/// Training-data mixture for a target task that has no data of its own.
struct MixturePlan {
    std::string target_task;
    std::vector<WeightedSource> selected_sources;  // descending mean PGF
    double threshold_used = 0.0;
    SelectionStrategy strategy = SelectionStrategy::AbsoluteThreshold;
    std::vector<ExcludedSource> excluded;          // TaskSet order
    std::optional<std::string> no_eligible_reason; // set when nothing was selected
};

/// Linear-interpolation percentile (0..100) of `values`; `values` must be non-empty.
double percentile_of(std::vector<double> values, double percentile);

/// Selects every source whose seed-mean PGF towards `target` lies strictly
/// above the threshold and weights the selection uniformly. Under
/// ColumnPercentile the threshold is that percentile of the strictly
/// positive off-diagonal column entries and sources at or above it qualify.
/// Throws UnknownTaskId.
MixturePlan recommend_mixture(const PGFSummary& summary, const TaskSet& task_set, const std::string& target,
                              const AnalysisConfig& config);

enum class MixtureOutcome { BelowBaseline, BetweenBounds, ExceedsDirect };

std::string_view to_string(MixtureOutcome outcome);

struct PlanComparison {
    MixtureOutcome outcome = MixtureOutcome::BetweenBounds;
    double gain_over_baseline = 0.0;
    double gap_to_direct = 0.0;  // direct - mixture
};

/// Places a mixture result between the untuned baseline (lower bound) and
/// direct finetuning on the target (upper bound).
PlanComparison compare_plans(const MixturePlan& plan, double baseline_acc, double direct_ft_acc,
                             double mixture_acc);

}  // namespace taskxfer
