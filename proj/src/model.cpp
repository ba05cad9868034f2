#include "taskxfer/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "taskxfer/error.hpp"

namespace taskxfer {

std::string_view to_string(PerceptualLevel level) {
    switch (level) {
        case PerceptualLevel::Low: return "Low";
        case PerceptualLevel::Mid: return "Mid";
        case PerceptualLevel::High: return "High";
    }
    return "Low";
}

std::string_view to_string(Granularity granularity) {
    switch (granularity) {
        case Granularity::Pixel: return "Pixel";
        case Granularity::Crop: return "Crop";
        case Granularity::Image: return "Image";
    }
    return "Pixel";
}

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Accepts "Low", "low", "Low-level", "low_level".
std::string strip_level_suffix(std::string_view text) {
    std::string s = lower(text);
    for (std::string_view suffix : {"-level", "_level", " level"}) {
        if (s.size() > suffix.size() && s.ends_with(suffix)) {
            s.resize(s.size() - suffix.size());
            break;
        }
    }
    return s;
}

}  // namespace

std::optional<PerceptualLevel> parse_perceptual_level(std::string_view text) {
    const std::string s = strip_level_suffix(text);
    if (s == "low") return PerceptualLevel::Low;
    if (s == "mid") return PerceptualLevel::Mid;
    if (s == "high") return PerceptualLevel::High;
    return std::nullopt;
}

std::optional<Granularity> parse_granularity(std::string_view text) {
    const std::string s = strip_level_suffix(text);
    if (s == "pixel") return Granularity::Pixel;
    if (s == "crop") return Granularity::Crop;
    if (s == "image") return Granularity::Image;
    return std::nullopt;
}

std::optional<std::size_t> TaskSet::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t TaskSet::index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw Error(ErrorCode::UnknownTaskId, "unknown task id '" + std::string(id) + "'");
}

TaskSet validate_task_set(std::vector<TaskSpec> tasks) {
    if (tasks.empty()) throw Error(ErrorCode::EmptyTaskList, "task list is empty");
    if (tasks.size() < 2)
        throw Error(ErrorCode::EmptyTaskList, "at least two tasks are required, got 1");

    std::vector<std::string> duplicates;
    std::vector<std::string> invalid;
    std::set<std::string> ids;
    std::set<std::string> abbreviations;
    for (const auto& task : tasks) {
        if (task.id.empty()) invalid.push_back("empty task id");
        if (task.abbreviation.empty()) invalid.push_back("empty abbreviation for task '" + task.id + "'");
        if (!ids.insert(task.id).second) duplicates.push_back(task.id);
        if (!task.abbreviation.empty() && !abbreviations.insert(task.abbreviation).second)
            duplicates.push_back(task.abbreviation);
    }
    if (!duplicates.empty()) {
        std::string message = "duplicate task id or abbreviation:";
        for (const auto& d : duplicates) message += " " + d;
        auto details = duplicates;
        details.insert(details.end(), invalid.begin(), invalid.end());
        throw Error(ErrorCode::DuplicateTaskId, message, std::move(details));
    }
    if (!invalid.empty()) throw Error(ErrorCode::InvalidTask, invalid.front(), invalid);

    TaskSet set;
    set.tasks_ = std::move(tasks);
    for (std::size_t i = 0; i < set.tasks_.size(); ++i) set.index_.emplace(set.tasks_[i].id, i);
    return set;
}

TaskSet blink_task_set() {
    using P = PerceptualLevel;
    using G = Granularity;
    auto task = [](const char* abbr, const char* name, P level, G granularity) {
        return TaskSpec{abbr, abbr, level, granularity, name};
    };
    return validate_task_set({
        task("AS", "Art style", P::Mid, G::Image),
        task("CN", "Counting", P::High, G::Image),
        task("FD", "Forensics detection", P::High, G::Image),
        task("FC", "Functional correspondence", P::High, G::Pixel),
        task("JG", "Jigsaw", P::Mid, G::Crop),
        task("MR", "Multi-view reasoning", P::Mid, G::Image),
        task("OL", "Object localization", P::High, G::Crop),
        task("RD", "Relative depth", P::Low, G::Pixel),
        task("RR", "Relative reflectance", P::Low, G::Pixel),
        task("SC", "Semantic correspondence", P::High, G::Pixel),
        task("SR", "Spatial reasoning", P::Mid, G::Image),
        task("VC", "Visual correspondence", P::Low, G::Pixel),
        task("VS", "Visual similarity", P::High, G::Image),
    });
}

bool on_accuracy_grid(double accuracy, int num_questions) {
    if (num_questions <= 0) return true;
    const double correct = accuracy * num_questions / 100.0;
    return std::abs(correct - std::round(correct)) <= 1e-6;
}

namespace {

std::string describe(const EvalRecord& r) {
    std::ostringstream os;
    os << r.model_id << "/seed " << r.seed << " " << (r.source ? *r.source : std::string(kBaselineSource))
       << "->" << r.target;
    return os.str();
}

}  // namespace

AssembleResult assemble_matrices(std::span<const EvalRecord> records, const TaskSet& task_set) {
    const std::size_t n = task_set.size();
    const std::size_t baseline_row = n;

    struct Group {
        std::map<std::pair<std::size_t, std::size_t>, const EvalRecord*> cells;
    };
    std::map<std::pair<std::string, std::int64_t>, Group> groups;

    std::set<std::string> unknown;
    std::set<std::string> duplicates;
    AssembleResult result;

    for (const auto& record : records) {
        if (!(record.accuracy >= 0.0 && record.accuracy <= 100.0))
            throw Error(ErrorCode::AccuracyOutOfRange, describe(record) + " accuracy outside [0, 100]");
        if (record.num_questions < 0)
            throw Error(ErrorCode::InvalidQuestionCount, describe(record) + " negative question count");

        auto target = task_set.find(record.target);
        std::optional<std::size_t> source = baseline_row;
        if (record.source) source = task_set.find(*record.source);
        if (!target) unknown.insert(record.target);
        if (!source) unknown.insert(*record.source);
        if (!target || !source) continue;

        auto& group = groups[{record.model_id, record.seed}];
        auto [it, inserted] = group.cells.emplace(std::pair{*source, *target}, &record);
        if (!inserted) duplicates.insert(describe(record));
    }
    if (!unknown.empty()) {
        std::vector<std::string> details(unknown.begin(), unknown.end());
        std::string message = "records reference unknown task ids:";
        for (const auto& id : details) message += " " + id;
        throw Error(ErrorCode::UnknownTaskId, message, std::move(details));
    }
    if (!duplicates.empty()) {
        std::vector<std::string> details(duplicates.begin(), duplicates.end());
        std::string message = "duplicate records for cell " + details.front();
        throw Error(ErrorCode::DuplicateCell, std::move(message), std::move(details));
    }

    std::vector<std::string> missing;
    std::vector<std::string> question_conflicts;
    for (const auto& [key, group] : groups) {
        AccuracyMatrix m;
        m.model_id = key.first;
        m.seed = key.second;
        m.baseline.assign(n, 0.0);
        m.finetuned = Matrix(n, n);
        m.questions.assign(n, -1);

        for (std::size_t row = 0; row <= n; ++row) {
            for (std::size_t col = 0; col < n; ++col) {
                auto it = group.cells.find({row, col});
                if (it == group.cells.end()) {
                    const std::string source =
                        row == baseline_row ? std::string(kBaselineSource) : task_set[row].id;
                    std::ostringstream os;
                    os << key.first << "/seed " << key.second << ": (" << source << "," << task_set[col].id
                       << ")";
                    missing.push_back(os.str());
                    continue;
                }
                const EvalRecord& rec = *it->second;
                if (row == baseline_row) {
                    m.baseline[col] = rec.accuracy;
                } else {
                    m.finetuned(row, col) = rec.accuracy;
                }
                int& q = m.questions[col];
                if (q < 0) {
                    q = rec.num_questions;
                } else if (q != rec.num_questions) {
                    question_conflicts.push_back(key.first + "/seed " + std::to_string(key.second) +
                                                 " target " + task_set[col].id);
                }
                if (!on_accuracy_grid(rec.accuracy, rec.num_questions)) {
                    std::ostringstream os;
                    os.precision(17);
                    os << describe(rec) << ": accuracy " << rec.accuracy << " is not a multiple of 100/"
                       << rec.num_questions;
                    result.warnings.push_back({os.str()});
                }
            }
        }
        for (int& q : m.questions) q = std::max(q, 0);
        result.matrices.push_back(std::move(m));
    }
    if (!missing.empty()) {
        std::string message = std::to_string(missing.size()) + " missing cell(s), first " + missing.front();
        throw Error(ErrorCode::MissingCell, message, std::move(missing));
    }
    if (!question_conflicts.empty()) {
        std::string message = "records disagree on num_questions for " + question_conflicts.front();
        throw Error(ErrorCode::InconsistentQuestionCount, std::move(message), std::move(question_conflicts));
    }
    return result;
}

void CeilingSpec::validate() const {
    auto check = [](double value, const std::string& what) {
        if (!(value > 0.0 && value <= 100.0))
            throw Error(ErrorCode::InvalidConfig, what + " must lie in (0, 100]");
    };
    if (mode == CeilingMode::Fixed) check(fixed_value, "fixed ceiling");
    for (const auto& [id, value] : per_task_override) check(value, "ceiling override for '" + id + "'");
}

void AnalysisConfig::validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
    if (!(edge_percentile > 0.0 && edge_percentile <= 100.0))
        throw Error(ErrorCode::InvalidConfig, "edge percentile must lie in (0, 100]");
    if (!(min_gap_warn >= 0.0)) throw Error(ErrorCode::InvalidConfig, "min_gap_warn must be non-negative");
    if (selection_strategy == SelectionStrategy::ColumnPercentile &&
        !(selection_threshold >= 0.0 && selection_threshold <= 100.0))
        throw Error(ErrorCode::InvalidConfig, "selection percentile must lie in [0, 100]");
    if (!std::isfinite(selection_threshold))
        throw Error(ErrorCode::InvalidConfig, "selection threshold must be finite");
}

}  // namespace taskxfer
