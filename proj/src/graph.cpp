#include "taskxfer/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <tuple>

#include "taskxfer/error.hpp"

namespace taskxfer {

std::string_view to_string(EdgeSign sign) { return sign == EdgeSign::Positive ? "Positive" : "Negative"; }

std::size_t TransferGraph::count(EdgeSign sign) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [sign](const TransferEdge& e) { return e.sign == sign; }));
}

std::size_t kept_edge_count(double percentile, std::size_t class_size) {
    // percentile * size is exact for integral percentiles, so the slack only
    // absorbs representation error of fractional ones
    const double exact = percentile * static_cast<double>(class_size) / 100.0;
    const auto kept = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    return std::min(kept, class_size);
}

TransferGraph build_graph(const PGFSummary& summary, const TaskSet& task_set, const AnalysisConfig& config) {
    const std::size_t n = task_set.size();
    if (summary.mean.rows() != n || summary.mean.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "PGF summary does not match the task set");

    std::vector<TransferEdge> positive;
    std::vector<TransferEdge> negative;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = summary.mean(i, j);
            if (w > 0.0) positive.push_back({i, j, w, EdgeSign::Positive});
            if (w < 0.0) negative.push_back({i, j, w, EdgeSign::Negative});
        }
    }
    // ties break on task ids so the kept set does not depend on task order
    auto by_strength = [&task_set](const TransferEdge& a, const TransferEdge& b) {
        const double sa = std::abs(a.weight);
        const double sb = std::abs(b.weight);
        if (sa != sb) return sa > sb;
        return std::tie(task_set[a.source].id, task_set[a.target].id) <
               std::tie(task_set[b.source].id, task_set[b.target].id);
    };

    TransferGraph graph;
    graph.task_set = task_set;
    graph.percentile = config.edge_percentile;
    graph.provenance = "model=" + summary.model_id + " seeds=" + std::to_string(summary.seed_count) + " (mean)";
    for (auto* cls : {&positive, &negative}) {
        std::sort(cls->begin(), cls->end(), by_strength);
        const std::size_t keep = kept_edge_count(config.edge_percentile, cls->size());
        graph.edges.insert(graph.edges.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(graph.edges.begin(), graph.edges.end(), [](const TransferEdge& a, const TransferEdge& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    return graph;
}

namespace {

bool has_sign(double v, EdgeSign sign) { return sign == EdgeSign::Positive ? v > 0.0 : v < 0.0; }

using Adjacency = std::vector<std::vector<bool>>;

void expand(const Adjacency& adj, std::vector<std::size_t>& current, std::vector<std::size_t> candidates,
            std::vector<std::size_t> excluded, std::vector<std::vector<std::size_t>>& out) {
    if (candidates.empty() && excluded.empty()) {
        if (current.size() >= 2) {
            auto clique = current;
            std::sort(clique.begin(), clique.end());
            out.push_back(std::move(clique));
        }
        return;
    }
    // pivot: vertex of candidates ∪ excluded with the most neighbours in candidates
    std::size_t pivot = 0;
    std::size_t best = 0;
    bool have_pivot = false;
    for (const auto* pool : {&candidates, &excluded}) {
        for (std::size_t u : *pool) {
            std::size_t deg = 0;
            for (std::size_t v : candidates) deg += adj[u][v] ? 1 : 0;
            if (!have_pivot || deg > best) {
                pivot = u;
                best = deg;
                have_pivot = true;
            }
        }
    }
    std::vector<std::size_t> branch;
    for (std::size_t v : candidates)
        if (!adj[pivot][v]) branch.push_back(v);

    for (std::size_t v : branch) {
        std::vector<std::size_t> next_candidates;
        std::vector<std::size_t> next_excluded;
        for (std::size_t u : candidates)
            if (adj[v][u]) next_candidates.push_back(u);
        for (std::size_t u : excluded)
            if (adj[v][u]) next_excluded.push_back(u);
        current.push_back(v);
        expand(adj, current, std::move(next_candidates), std::move(next_excluded), out);
        current.pop_back();
        candidates.erase(std::find(candidates.begin(), candidates.end(), v));
        excluded.push_back(v);
    }
}

void all_cliques_from(const Adjacency& adj, std::vector<std::size_t>& current, std::size_t start,
                      std::vector<std::vector<std::size_t>>& out) {
    for (std::size_t v = start; v < adj.size(); ++v) {
        const bool fits =
            std::all_of(current.begin(), current.end(), [&](std::size_t u) { return adj[u][v]; });
        if (!fits) continue;
        current.push_back(v);
        if (current.size() >= 2) out.push_back(current);
        all_cliques_from(adj, current, v + 1, out);
        current.pop_back();
    }
}

}  // namespace

Adjacency consistency_graph(const Matrix& mean_pgf, EdgeSign sign) {
    const std::size_t n = mean_pgf.rows();
    Adjacency adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (has_sign(mean_pgf(i, j), sign) && has_sign(mean_pgf(j, i), sign)) adj[i][j] = adj[j][i] = true;
    return adj;
}

std::vector<std::vector<std::size_t>> maximal_cliques(const Adjacency& adjacency) {
    std::vector<std::size_t> candidates(adjacency.size());
    for (std::size_t v = 0; v < adjacency.size(); ++v) candidates[v] = v;
    std::vector<std::size_t> current;
    std::vector<std::vector<std::size_t>> out;
    expand(adjacency, current, std::move(candidates), {}, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Clique> find_cliques(std::span<const PGFMatrix> pgf_per_seed, const TaskSet& task_set, EdgeSign sign,
                                 const AnalysisConfig& config, const CliqueOptions& options) {
    const PGFSummary summary = pgf_summary(pgf_per_seed);
    if (summary.size() != task_set.size())
        throw Error(ErrorCode::DimensionMismatch, "PGF matrices do not match the task set");
    const Adjacency adj = consistency_graph(summary.mean, sign);

    std::vector<std::vector<std::size_t>> member_sets;
    if (options.maximal_only) {
        member_sets = maximal_cliques(adj);
    } else {
        std::vector<std::size_t> current;
        all_cliques_from(adj, current, 0, member_sets);
    }
    const auto maximal = maximal_cliques(adj);

    std::vector<Clique> out;
    for (auto& indices : member_sets) {
        Clique clique;
        clique.sign = sign;
        clique.maximal = std::binary_search(maximal.begin(), maximal.end(), indices);
        std::vector<double> samples;
        for (std::size_t i : indices) {
            clique.members.push_back(task_set[i].id);
            for (std::size_t j : indices) {
                if (i == j) continue;
                clique.per_pair_stats.push_back({i, j, summary.mean(i, j)});
                for (const auto& m : pgf_per_seed) samples.push_back(m.values(i, j));
            }
        }
        clique.indices = std::move(indices);
        const Sidedness side = sign == EdgeSign::Positive ? Sidedness::OneSidedGreater : Sidedness::OneSidedLess;
        try {
            clique.stability = wilcoxon_signed_rank(samples, 0.0, side, options.wilcoxon);
            clique.p_value = clique.stability->p_value;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::AllZeroDifferences) throw;
            clique.p_value = std::numeric_limits<double>::quiet_NaN();
        }
        clique.significant = clique.p_value < config.alpha;
        out.push_back(std::move(clique));
    }
    std::sort(out.begin(), out.end(), [](const Clique& a, const Clique& b) {
        if (a.indices.size() != b.indices.size()) return a.indices.size() > b.indices.size();
        // NaN p-values sort last
        const bool an = std::isnan(a.p_value);
        const bool bn = std::isnan(b.p_value);
        if (an != bn) return bn;
        if (!an && a.p_value != b.p_value) return a.p_value < b.p_value;
        return a.indices < b.indices;
    });
    return out;
}

std::vector<std::vector<std::size_t>> brute_force_cliques(const Matrix& mean_pgf, EdgeSign sign) {
    const std::size_t n = mean_pgf.rows();
    if (n > 16) throw Error(ErrorCode::TooLarge, "brute-force clique search supports at most 16 tasks");

    auto consistent = [&](std::uint32_t mask) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1u)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || !(mask >> j & 1u)) continue;
                if (!has_sign(mean_pgf(i, j), sign)) return false;
            }
        }
        return true;
    };
    const std::uint32_t full = n == 0 ? 0u : (1u << n);
    std::vector<bool> ok(full, false);
    for (std::uint32_t mask = 0; mask < full; ++mask)
        ok[mask] = std::popcount(mask) >= 2 && consistent(mask);

    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        if (!ok[mask]) continue;
        bool maximal = true;
        for (std::size_t v = 0; v < n && maximal; ++v)
            if (!(mask >> v & 1u) && ok[mask | (1u << v)]) maximal = false;
        if (!maximal) continue;
        std::vector<std::size_t> members;
        for (std::size_t v = 0; v < n; ++v)
            if (mask >> v & 1u) members.push_back(v);
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace taskxfer
