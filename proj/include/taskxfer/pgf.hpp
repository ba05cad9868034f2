#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taskxfer/matrix.hpp"
#include "taskxfer/model.hpp"

namespace taskxfer {

/// Perfection Gap Factor of one (source, target) cell: the accuracy gain
/// divided by the headroom left below the ceiling,
///
///     (finetuned - baseline) / (ceiling - baseline + epsilon)
///
/// evaluated as written. No clamping; near-ceiling baselines produce large
/// negative values on purpose.
double pgf_cell(double baseline, double finetuned, double ceiling, double epsilon = 1e-6);

enum class PgfWarningKind {
    NearCeiling,               // ceiling - baseline < min_gap_warn for one cell
    ZeroGapUnderBestObserved,  // whole column has ceiling == baseline
};

struct PgfWarning {
    PgfWarningKind kind;
    std::optional<std::size_t> source;  // absent for column-level warnings
    std::size_t target;
};

struct PGFMatrix {
    std::string model_id;
    std::int64_t seed = 0;
    Matrix values;                      // values(i, j) = mu_{i->j}
    std::vector<double> ceiling_used;   // effective U_j
    std::vector<PgfWarning> warnings;

    std::size_t size() const noexcept { return values.rows(); }
};

/// Builds the PGF matrix of one (model, seed) accuracy matrix. Under
/// CeilingMode::BestObserved, U_j is the column maximum of this matrix
/// (baseline included). Per-task overrides win in both modes.
PGFMatrix pgf_matrix(const AccuracyMatrix& acc, const TaskSet& task_set, const CeilingSpec& ceiling,
                     const AnalysisConfig& config);

struct PGFSummary {
    std::string model_id;
    Matrix mean;
    Matrix std;  // population standard deviation over seeds
    std::size_t seed_count = 0;

    std::size_t size() const noexcept { return mean.rows(); }
};

/// Elementwise mean and population std over the seed matrices of one model.
/// Throws EmptyInput, MixedModels or DimensionMismatch.
PGFSummary pgf_summary(std::span<const PGFMatrix> matrices);

/// Seed-mean only; shares pgf_summary's validation.
Matrix mean_pgf(std::span<const PGFMatrix> matrices);

/// Analytic lower bound -(m - 1) for a target evaluated on m questions
/// with a ceiling of 100. Throws InvalidQuestionCount for m <= 0.
double pgf_min_bound(int num_questions);

}  // namespace taskxfer
