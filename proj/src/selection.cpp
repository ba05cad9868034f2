#include "taskxfer/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "taskxfer/error.hpp"

namespace taskxfer {

double percentile_of(std::vector<double> values, double percentile) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "percentile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(percentile, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

MixturePlan recommend_mixture(const PGFSummary& summary, const TaskSet& task_set, const std::string& target,
                              const AnalysisConfig& config) {
    const std::size_t n = task_set.size();
    if (summary.mean.rows() != n || summary.mean.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "PGF summary does not match the task set");
    const std::size_t t = task_set.index_of(target);

    MixturePlan plan;
    plan.target_task = target;
    plan.strategy = config.selection_strategy;

    std::vector<double> positive;
    for (std::size_t i = 0; i < n; ++i)
        if (i != t && summary.mean(i, t) > 0.0) positive.push_back(summary.mean(i, t));

    if (config.selection_strategy == SelectionStrategy::AbsoluteThreshold) {
        plan.threshold_used = config.selection_threshold;
    } else if (positive.empty()) {
        plan.threshold_used = 0.0;
    } else {
        plan.threshold_used = percentile_of(positive, config.selection_threshold);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (i == t) continue;
        const double value = summary.mean(i, t);
        const bool eligible = config.selection_strategy == SelectionStrategy::AbsoluteThreshold
                                  ? value > plan.threshold_used
                                  : value > 0.0 && value >= plan.threshold_used;
        if (eligible) {
            plan.selected_sources.push_back({task_set[i].id, 0.0, value});
        } else {
            char buf[96];
            const char* relation =
                config.selection_strategy == SelectionStrategy::AbsoluteThreshold ? "not above" : "below";
            std::snprintf(buf, sizeof buf, "mean PGF %.4f %s threshold %.4f", value, relation, plan.threshold_used);
            plan.excluded.push_back({task_set[i].id, value, buf});
        }
    }
    std::stable_sort(plan.selected_sources.begin(), plan.selected_sources.end(),
                     [](const WeightedSource& a, const WeightedSource& b) { return a.mean_pgf > b.mean_pgf; });
    const double weight = plan.selected_sources.empty() ? 0.0 : 1.0 / static_cast<double>(plan.selected_sources.size());
    for (auto& s : plan.selected_sources) s.weight = weight;
    if (plan.selected_sources.empty())
        plan.no_eligible_reason = "NoEligibleSources: no source task has mean PGF towards '" + target +
                                  "' above the threshold";
    return plan;
}

std::string_view to_string(MixtureOutcome outcome) {
    switch (outcome) {
        case MixtureOutcome::BelowBaseline: return "BelowBaseline";
        case MixtureOutcome::BetweenBounds: return "BetweenBounds";
        case MixtureOutcome::ExceedsDirect: return "ExceedsDirect";
    }
    return "BetweenBounds";
}

PlanComparison compare_plans(const MixturePlan& /*plan*/, double baseline_acc, double direct_ft_acc,
                             double mixture_acc) {
    PlanComparison out;
    out.gain_over_baseline = mixture_acc - baseline_acc;
    out.gap_to_direct = direct_ft_acc - mixture_acc;
    if (mixture_acc > direct_ft_acc) {
        out.outcome = MixtureOutcome::ExceedsDirect;
    } else if (mixture_acc < baseline_acc) {
        out.outcome = MixtureOutcome::BelowBaseline;
    } else {
        out.outcome = MixtureOutcome::BetweenBounds;
    }
    return out;
}

}  // namespace taskxfer
