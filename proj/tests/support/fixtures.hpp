#pragma once

#include <string>
#include <vector>

#include "taskxfer/matrix.hpp"
#include "taskxfer/model.hpp"
#include "taskxfer/pgf.hpp"

namespace fixtures {

inline taskxfer::TaskSet generic_tasks(std::size_t n) {
    std::vector<taskxfer::TaskSpec> specs;
    for (std::size_t i = 0; i < n; ++i) {
        taskxfer::TaskSpec t;
        t.id = "T" + std::to_string(i);
        t.abbreviation = t.id;
        t.perceptual_level = static_cast<taskxfer::PerceptualLevel>(i % 3);
        t.granularity = static_cast<taskxfer::Granularity>((i / 3) % 3);
        specs.push_back(t);
    }
    return taskxfer::validate_task_set(std::move(specs));
}

inline taskxfer::Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    taskxfer::Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

inline taskxfer::PGFMatrix pgf(const std::vector<std::vector<double>>& rows, std::int64_t seed = 0,
                               const std::string& model = "m") {
    taskxfer::PGFMatrix out;
    out.model_id = model;
    out.seed = seed;
    out.values = to_matrix(rows);
    out.ceiling_used.assign(rows.size(), 100.0);
    return out;
}

inline taskxfer::PGFSummary summary(const std::vector<std::vector<double>>& rows, const std::string& model = "m") {
    taskxfer::PGFSummary s;
    s.model_id = model;
    s.mean = to_matrix(rows);
    s.std = taskxfer::Matrix(rows.size(), rows.size(), 0.0);
    s.seed_count = 1;
    return s;
}

/// Complete record set for one (model, seed): baseline row plus every
/// finetuned cell, accuracy derived from the indices so lookups are checkable.
inline std::vector<taskxfer::EvalRecord> complete_records(const taskxfer::TaskSet& tasks, const std::string& model,
                                                          std::int64_t seed) {
    std::vector<taskxfer::EvalRecord> out;
    const std::size_t n = tasks.size();
    for (std::size_t j = 0; j < n; ++j)
        out.push_back({model, seed, std::nullopt, tasks[j].id, 30.0 + static_cast<double>(j), 0});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.push_back({model, seed, tasks[i].id, tasks[j].id,
                           40.0 + static_cast<double>(i) + 0.25 * static_cast<double>(j) + static_cast<double>(seed),
                           0});
    return out;
}

}  // namespace fixtures
