#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taskxfer/matrix.hpp"

namespace taskxfer {

enum class Sidedness { OneSidedGreater, OneSidedLess, TwoSided };
enum class TestMethod { WilcoxonExact, WilcoxonNormalApprox, WelchT, PooledT };

std::string_view to_string(Sidedness sidedness);
std::string_view to_string(TestMethod method);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Sidedness sidedness = Sidedness::TwoSided;
    TestMethod method = TestMethod::WelchT;
    std::size_t sample_size = 0;
    std::optional<std::size_t> second_sample_size;
    double degrees_of_freedom = 0.0;  // t-tests only
};

struct WilcoxonOptions {
    /// Largest effective n for which the exact null distribution is used.
    std::size_t exact_cutoff = 20;
};

/// One-sample Wilcoxon signed-rank test of `samples` against `mu0`.
/// Zero differences are dropped and |d| is ranked with average ranks; the
/// statistic is W+ (sum of ranks of positive differences). Exact p-values
/// for tie-free inputs up to the cutoff, otherwise a normal approximation
/// with tie and continuity corrections. Throws AllZeroDifferences.
TestResult wilcoxon_signed_rank(std::span<const double> samples, double mu0, Sidedness sidedness,
                                const WilcoxonOptions& options = {});

/// Number of sign assignments of ranks 1..n whose positive-rank sum is w,
/// for every w in [0, n(n+1)/2].
std::vector<double> signed_rank_null_counts(std::size_t n);

enum class TTestVariant { Welch, Pooled };

/// Unpaired two-sample t-test. Throws InsufficientSamples (either side
/// below 2) or ZeroVarianceBoth.
TestResult unpaired_t_test(std::span<const double> a, std::span<const double> b, TTestVariant variant,
                           Sidedness sidedness);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student t cumulative distribution. Throws InvalidDegreesOfFreedom for df <= 0.
double t_cdf(double t, double df);

/// Standard normal cumulative distribution.
double normal_cdf(double z);

struct SimilarityMatrix {
    std::vector<std::string> ids;
    Matrix values;
};

/// Pairwise cosine similarity of equally sized, nonzero vectors. Throws
/// ZeroVector, LengthMismatch or EmptyInput.
SimilarityMatrix cosine_similarity_matrix(std::span<const std::pair<std::string, std::vector<double>>> vectors);

}  // namespace taskxfer
