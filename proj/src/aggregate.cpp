#include "taskxfer/aggregate.hpp"

#include <cmath>

#include "taskxfer/error.hpp"

namespace taskxfer {

DirectionalScore breadth_weighted_score(std::span<const double> values, std::size_t task_count) {
    DirectionalScore score;
    double positive_sum = 0.0;
    double negative_sum = 0.0;
    for (double v : values) {
        if (v > 0.0) {
            positive_sum += v;
            ++score.positive_count;
        } else if (v < 0.0) {
            negative_sum += v;
            ++score.negative_count;
        }
    }
    const double n = static_cast<double>(task_count);
    auto weight = [n](int count) {
        // -expm1(-x) == 1 - exp(-x) without cancellation for small x
        return -std::expm1(-static_cast<double>(count) / n) / static_cast<double>(count);
    };
    if (score.positive_count > 0) score.positive = weight(score.positive_count) * positive_sum;
    if (score.negative_count > 0) score.negative = weight(score.negative_count) * negative_sum;
    return score;
}

namespace {

void check_square(const Matrix& pgf, const TaskSet& task_set) {
    if (pgf.rows() != task_set.size() || pgf.cols() != task_set.size())
        throw Error(ErrorCode::DimensionMismatch, "PGF matrix does not match the task set");
}

void check_index(std::size_t index, std::size_t n) {
    if (index >= n)
        throw Error(ErrorCode::IndexOutOfRange,
                    "task index " + std::to_string(index) + " out of range for " + std::to_string(n) + " tasks");
}

std::vector<double> select(std::span<const double> line, std::size_t self, bool include_self) {
    std::vector<double> out;
    out.reserve(line.size());
    for (std::size_t k = 0; k < line.size(); ++k)
        if (include_self || k != self) out.push_back(line[k]);
    return out;
}

}  // namespace

TransferScore transferability(const Matrix& pgf, std::size_t source, const TaskSet& task_set,
                              const AnalysisConfig& config) {
    check_square(pgf, task_set);
    check_index(source, task_set.size());
    const auto values = select(pgf.row(source), source, config.include_diagonal_in_scores);
    TransferScore out{breadth_weighted_score(values, task_set.size())};
    out.task_id = task_set[source].id;
    return out;
}

MalleabilityScore malleability(const Matrix& pgf, std::size_t target, const TaskSet& task_set,
                               const AnalysisConfig& config) {
    check_square(pgf, task_set);
    check_index(target, task_set.size());
    const auto column = pgf.column(target);
    const auto values = select(column, target, config.include_diagonal_in_scores);
    MalleabilityScore out{breadth_weighted_score(values, task_set.size())};
    out.task_id = task_set[target].id;
    return out;
}

TransferScore transferability(const PGFMatrix& pgf, std::size_t source, const TaskSet& task_set,
                              const AnalysisConfig& config) {
    return transferability(pgf.values, source, task_set, config);
}

MalleabilityScore malleability(const PGFMatrix& pgf, std::size_t target, const TaskSet& task_set,
                               const AnalysisConfig& config) {
    return malleability(pgf.values, target, task_set, config);
}

std::vector<TransferScore> all_transferability(const Matrix& pgf, const TaskSet& task_set,
                                               const AnalysisConfig& config) {
    std::vector<TransferScore> out;
    for (std::size_t i = 0; i < task_set.size(); ++i) out.push_back(transferability(pgf, i, task_set, config));
    return out;
}

std::vector<MalleabilityScore> all_malleability(const Matrix& pgf, const TaskSet& task_set,
                                                const AnalysisConfig& config) {
    std::vector<MalleabilityScore> out;
    for (std::size_t j = 0; j < task_set.size(); ++j) out.push_back(malleability(pgf, j, task_set, config));
    return out;
}

namespace {

template <typename Score>
ScoreAverage average_of(std::span<const Score> scores) {
    if (scores.empty()) throw Error(ErrorCode::EmptyInput, "no scores to average");
    ScoreAverage avg;
    for (const auto& s : scores) {
        avg.positive += s.positive;
        avg.negative += s.negative;
    }
    avg.positive /= static_cast<double>(scores.size());
    avg.negative /= static_cast<double>(scores.size());
    return avg;
}

}  // namespace

ScoreAverage model_average(std::span<const DirectionalScore> scores) { return average_of(scores); }
ScoreAverage model_average(std::span<const TransferScore> scores) { return average_of(scores); }
ScoreAverage model_average(std::span<const MalleabilityScore> scores) { return average_of(scores); }

std::string_view to_string(CategoryAxis axis) {
    return axis == CategoryAxis::PerceptualLevel ? "PerceptualLevel" : "Granularity";
}

std::vector<CategoryAggregate> category_aggregate(std::span<const PGFMatrix> pgf_per_seed,
                                                  const TaskSet& task_set, CategoryAxis axis,
                                                  const AnalysisConfig& config) {
    if (pgf_per_seed.empty()) throw Error(ErrorCode::EmptyInput, "no PGF matrices to aggregate");
    for (const auto& m : pgf_per_seed) check_square(m.values, task_set);

    constexpr int kCategories = 3;
    auto category_of = [&](std::size_t task) {
        return axis == CategoryAxis::PerceptualLevel ? static_cast<int>(task_set[task].perceptual_level)
                                                     : static_cast<int>(task_set[task].granularity);
    };
    auto category_name = [&](int c) -> std::string {
        return axis == CategoryAxis::PerceptualLevel ? std::string(to_string(static_cast<PerceptualLevel>(c)))
                                                     : std::string(to_string(static_cast<Granularity>(c)));
    };

    std::vector<std::vector<std::size_t>> members(kCategories);
    for (std::size_t t = 0; t < task_set.size(); ++t) members[category_of(t)].push_back(t);

    std::vector<CategoryAggregate> out;
    for (int sc = 0; sc < kCategories; ++sc) {
        for (int tc = 0; tc < kCategories; ++tc) {
            if (members[sc].empty() || members[tc].empty()) continue;
            CategoryAggregate agg;
            agg.axis = axis;
            agg.source_category = category_name(sc);
            agg.target_category = category_name(tc);
            agg.seed_count = static_cast<int>(pgf_per_seed.size());
            double positive_sum = 0.0;
            double negative_sum = 0.0;
            for (std::size_t i : members[sc]) {
                for (std::size_t j : members[tc]) {
                    if (i == j && !config.include_diagonal_in_categories) continue;
                    ++agg.pair_count;
                    for (const auto& m : pgf_per_seed) {
                        const double v = m.values(i, j);
                        if (v > 0.0) {
                            positive_sum += v;
                            ++agg.positive_samples;
                        } else if (v < 0.0) {
                            negative_sum += v;
                            ++agg.negative_samples;
                        }
                    }
                }
            }
            if (agg.positive_samples > 0) agg.positive_mean = positive_sum / agg.positive_samples;
            if (agg.negative_samples > 0) agg.negative_mean = negative_sum / agg.negative_samples;
            out.push_back(std::move(agg));
        }
    }
    return out;
}

}  // namespace taskxfer
