#include "taskxfer/pgf.hpp"

#include <algorithm>
#include <cmath>

#include "taskxfer/error.hpp"

namespace taskxfer {

double pgf_cell(double baseline, double finetuned, double ceiling, double epsilon) {
    const double gain = finetuned - baseline;
    const double gap = ceiling - baseline + epsilon;
    return gain / gap;
}

PGFMatrix pgf_matrix(const AccuracyMatrix& acc, const TaskSet& task_set, const CeilingSpec& ceiling,
                     const AnalysisConfig& config) {
    const std::size_t n = acc.size();
    if (acc.finetuned.rows() != n || acc.finetuned.cols() != n || task_set.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "accuracy matrix does not match the task set");

    PGFMatrix out;
    out.model_id = acc.model_id;
    out.seed = acc.seed;
    out.values = Matrix(n, n);
    out.ceiling_used.assign(n, ceiling.fixed_value);

    for (std::size_t j = 0; j < n; ++j) {
        double u = ceiling.fixed_value;
        if (ceiling.mode == CeilingMode::BestObserved) {
            u = acc.baseline[j];
            for (std::size_t i = 0; i < n; ++i) u = std::max(u, acc.finetuned(i, j));
        }
        if (auto it = ceiling.per_task_override.find(task_set[j].id); it != ceiling.per_task_override.end())
            u = it->second;
        out.ceiling_used[j] = u;

        const double base = acc.baseline[j];
        const double gap = u - base;
        if (ceiling.mode == CeilingMode::BestObserved && gap == 0.0)
            out.warnings.push_back({PgfWarningKind::ZeroGapUnderBestObserved, std::nullopt, j});
        for (std::size_t i = 0; i < n; ++i) {
            out.values(i, j) = pgf_cell(base, acc.finetuned(i, j), u, config.epsilon);
            if (gap < config.min_gap_warn && !(ceiling.mode == CeilingMode::BestObserved && gap == 0.0))
                out.warnings.push_back({PgfWarningKind::NearCeiling, i, j});
        }
    }
    return out;
}

namespace {

void check_same_model(std::span<const PGFMatrix> matrices) {
    if (matrices.empty()) throw Error(ErrorCode::EmptyInput, "no PGF matrices to summarize");
    const auto& first = matrices.front();
    for (const auto& m : matrices) {
        if (m.model_id != first.model_id)
            throw Error(ErrorCode::MixedModels,
                        "matrices from models '" + first.model_id + "' and '" + m.model_id + "'");
        if (m.values.rows() != first.values.rows() || m.values.cols() != first.values.cols())
            throw Error(ErrorCode::DimensionMismatch, "PGF matrices differ in size");
    }
}

}  // namespace

PGFSummary pgf_summary(std::span<const PGFMatrix> matrices) {
    check_same_model(matrices);
    const std::size_t rows = matrices.front().values.rows();
    const std::size_t cols = matrices.front().values.cols();
    const double count = static_cast<double>(matrices.size());

    PGFSummary out;
    out.model_id = matrices.front().model_id;
    out.seed_count = matrices.size();
    out.mean = Matrix(rows, cols);
    out.std = Matrix(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double first = matrices.front().values(r, c);
            const bool constant = std::all_of(matrices.begin(), matrices.end(),
                                              [&](const PGFMatrix& m) { return m.values(r, c) == first; });
            if (constant) {
                out.mean(r, c) = first;
                continue;
            }
            double sum = 0.0;
            for (const auto& m : matrices) sum += m.values(r, c);
            const double mean = sum / count;
            double ss = 0.0;
            for (const auto& m : matrices) {
                const double d = m.values(r, c) - mean;
                ss += d * d;
            }
            out.mean(r, c) = mean;
            out.std(r, c) = std::sqrt(ss / count);
        }
    }
    return out;
}

Matrix mean_pgf(std::span<const PGFMatrix> matrices) { return pgf_summary(matrices).mean; }

double pgf_min_bound(int num_questions) {
    if (num_questions <= 0)
        throw Error(ErrorCode::InvalidQuestionCount, "question count must be positive");
    return -static_cast<double>(num_questions - 1);
}

}  // namespace taskxfer
