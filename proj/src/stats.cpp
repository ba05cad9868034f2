#include "taskxfer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "taskxfer/error.hpp"

namespace taskxfer {

std::string_view to_string(Sidedness sidedness) {
    switch (sidedness) {
        case Sidedness::OneSidedGreater: return "OneSidedGreater";
        case Sidedness::OneSidedLess: return "OneSidedLess";
        case Sidedness::TwoSided: return "TwoSided";
    }
    return "TwoSided";
}

std::string_view to_string(TestMethod method) {
    switch (method) {
        case TestMethod::WilcoxonExact: return "WilcoxonExact";
        case TestMethod::WilcoxonNormalApprox: return "WilcoxonNormalApprox";
        case TestMethod::WelchT: return "WelchT";
        case TestMethod::PooledT: return "PooledT";
    }
    return "WelchT";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> signed_rank_null_counts(std::size_t n) {
    const std::size_t max_w = n * (n + 1) / 2;
    std::vector<double> counts(max_w + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t rank = 1; rank <= n; ++rank)
        for (std::size_t w = max_w; w >= rank; --w) counts[w] += counts[w - rank];
    return counts;
}

namespace {

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

TestResult wilcoxon_signed_rank(std::span<const double> samples, double mu0, Sidedness sidedness,
                                const WilcoxonOptions& options) {
    std::vector<double> diffs;
    diffs.reserve(samples.size());
    for (double s : samples)
        if (s - mu0 != 0.0) diffs.push_back(s - mu0);
    if (diffs.empty())
        throw Error(ErrorCode::AllZeroDifferences, "every sample equals mu0; the test is undefined");

    const std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });

    // average ranks over runs of equal |d|
    std::vector<double> ranks(n);
    double tie_term = 0.0;
    bool has_ties = false;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && std::abs(diffs[order[end]]) == std::abs(diffs[order[start]])) ++end;
        const double avg = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t k = start; k < end; ++k) ranks[order[k]] = avg;
        const double t = static_cast<double>(end - start);
        if (end - start > 1) {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        start = end;
    }

    double w_plus = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (diffs[k] > 0.0) w_plus += ranks[k];

    TestResult result;
    result.statistic = w_plus;
    result.sidedness = sidedness;
    result.sample_size = n;

    if (!has_ties && n <= options.exact_cutoff) {
        result.method = TestMethod::WilcoxonExact;
        const auto counts = signed_rank_null_counts(n);
        const double total = std::ldexp(1.0, static_cast<int>(n));
        const auto w = static_cast<std::size_t>(std::llround(w_plus));
        double upper = 0.0;  // P(W+ >= w)
        double lower = 0.0;  // P(W+ <= w)
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (k >= w) upper += counts[k];
            if (k <= w) lower += counts[k];
        }
        upper /= total;
        lower /= total;
        switch (sidedness) {
            case Sidedness::OneSidedGreater: result.p_value = upper; break;
            case Sidedness::OneSidedLess: result.p_value = lower; break;
            case Sidedness::TwoSided: result.p_value = clamp_probability(2.0 * std::min(upper, lower)); break;
        }
        return result;
    }

    result.method = TestMethod::WilcoxonNormalApprox;
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double sd = std::sqrt(var);
    const double upper = normal_cdf(-(w_plus - mean - 0.5) / sd);
    const double lower = normal_cdf((w_plus - mean + 0.5) / sd);
    switch (sidedness) {
        case Sidedness::OneSidedGreater: result.p_value = clamp_probability(upper); break;
        case Sidedness::OneSidedLess: result.p_value = clamp_probability(lower); break;
        case Sidedness::TwoSided: result.p_value = clamp_probability(2.0 * std::min(upper, lower)); break;
    }
    return result;
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> xs) {
    Moments m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.var = ss / static_cast<double>(xs.size() - 1);
    return m;
}

double t_p_value(double t, double df, Sidedness sidedness) {
    switch (sidedness) {
        case Sidedness::OneSidedGreater: return clamp_probability(t_cdf(-t, df));
        case Sidedness::OneSidedLess: return clamp_probability(t_cdf(t, df));
        case Sidedness::TwoSided: return clamp_probability(2.0 * t_cdf(-std::abs(t), df));
    }
    return 1.0;
}

}  // namespace

TestResult unpaired_t_test(std::span<const double> a, std::span<const double> b, TTestVariant variant,
                           Sidedness sidedness) {
    if (a.size() < 2 || b.size() < 2)
        throw Error(ErrorCode::InsufficientSamples, "each sample needs at least two values");
    const Moments ma = moments(a);
    const Moments mb = moments(b);
    if (ma.var == 0.0 && mb.var == 0.0)
        throw Error(ErrorCode::ZeroVarianceBoth, "both samples have zero variance");

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    TestResult result;
    result.sidedness = sidedness;
    result.sample_size = a.size();
    result.second_sample_size = b.size();

    if (variant == TTestVariant::Welch) {
        const double va = ma.var / na;
        const double vb = mb.var / nb;
        result.method = TestMethod::WelchT;
        result.statistic = (ma.mean - mb.mean) / std::sqrt(va + vb);
        result.degrees_of_freedom = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    } else {
        const double pooled = ((na - 1.0) * ma.var + (nb - 1.0) * mb.var) / (na + nb - 2.0);
        result.method = TestMethod::PooledT;
        result.statistic = (ma.mean - mb.mean) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        result.degrees_of_freedom = na + nb - 2.0;
    }
    result.p_value = t_p_value(result.statistic, result.degrees_of_freedom, sidedness);
    return result;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double md = m;
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidDegreesOfFreedom, "degrees of freedom must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (t == std::numeric_limits<double>::infinity()) return 1.0;
    if (t == -std::numeric_limits<double>::infinity()) return 0.0;
    if (t == 0.0) return 0.5;

    const double t2 = t * t;
    double tail;  // P(T > |t|)
    if (t2 < df) {
        // central mass P(|T| < |t|) is the well-conditioned quantity here
        const double central = incomplete_beta(0.5, df / 2.0, t2 / (df + t2));
        tail = 0.5 * (1.0 - central);
    } else {
        tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t2));
    }
    return t > 0.0 ? 1.0 - tail : tail;
}

SimilarityMatrix cosine_similarity_matrix(
    std::span<const std::pair<std::string, std::vector<double>>> vectors) {
    if (vectors.empty()) throw Error(ErrorCode::EmptyInput, "no vectors given");
    const std::size_t dim = vectors.front().second.size();
    if (dim == 0) throw Error(ErrorCode::LengthMismatch, "vectors must be non-empty");

    const std::size_t n = vectors.size();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = vectors[i].second;
        if (v.size() != dim)
            throw Error(ErrorCode::LengthMismatch, "vector '" + vectors[i].first + "' has length " +
                                                       std::to_string(v.size()) + ", expected " +
                                                       std::to_string(dim));
        norms[i] = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norms[i] == 0.0) throw Error(ErrorCode::ZeroVector, "vector '" + vectors[i].first + "' is zero");
    }

    SimilarityMatrix out;
    out.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.ids.push_back(vectors[i].first);
        out.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& a = vectors[i].second;
            const auto& b = vectors[j].second;
            const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
            const double s = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
            out.values(i, j) = s;
            out.values(j, i) = s;
        }
    }
    return out;
}

}  // namespace taskxfer
