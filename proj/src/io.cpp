#include "taskxfer/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "taskxfer/error.hpp"

namespace taskxfer::io {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kColumns = {"model_id", "seed",     "source",
                                                      "target",   "accuracy", "num_questions"};

struct Line {
    std::size_t number;
    std::string text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        ++number;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (!line.empty()) lines.push_back({number, std::string(line)});
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return lines;
}

// RFC 4180 style: fields may be double-quoted, "" escapes a quote.
std::optional<std::vector<std::string>> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t");
    return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
    return value;
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

EvalRecord make_record(std::string model_id, std::string_view seed_text, std::string source, std::string target,
                       std::string_view accuracy_text, std::string_view questions_text, const std::string& where) {
    EvalRecord r;
    r.model_id = std::move(model_id);
    const auto seed = parse_number<std::int64_t>(seed_text);
    if (!seed) throw Error(ErrorCode::MalformedRow, where + "seed '" + std::string(seed_text) + "' is not an integer");
    r.seed = *seed;
    if (r.model_id.empty()) throw Error(ErrorCode::MalformedRow, where + "empty model_id");
    if (target.empty()) throw Error(ErrorCode::MalformedRow, where + "empty target");
    if (source.empty()) throw Error(ErrorCode::MalformedRow, where + "empty source");
    if (source != kBaselineSource) r.source = std::move(source);
    r.target = std::move(target);

    const auto accuracy = parse_number<double>(accuracy_text);
    if (!accuracy || !std::isfinite(*accuracy))
        throw Error(ErrorCode::NonNumericAccuracy, where + "accuracy '" + std::string(accuracy_text) + "' is not numeric");
    if (*accuracy < 0.0 || *accuracy > 100.0)
        throw Error(ErrorCode::AccuracyOutOfRange, where + "accuracy " + std::string(accuracy_text) + " outside [0, 100]");
    r.accuracy = *accuracy;

    const auto questions = parse_number<int>(questions_text);
    if (!questions || *questions < 0)
        throw Error(ErrorCode::MalformedRow,
                    where + "num_questions '" + std::string(questions_text) + "' is not a non-negative integer");
    r.num_questions = *questions;
    return r;
}

std::string shortest(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<EvalRecord> parse_records_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw Error(ErrorCode::MissingColumn, "record file has no header row");

    const auto header = split_fields(lines.front().text);
    if (!header) throw Error(ErrorCode::MalformedRow, line_prefix(lines.front().number) + "unterminated quote");
    std::array<std::size_t, kColumns.size()> position{};
    std::array<bool, kColumns.size()> seen{};
    for (std::size_t k = 0; k < header->size(); ++k) {
        const std::string name = trim((*header)[k]);
        auto it = std::find(kColumns.begin(), kColumns.end(), name);
        if (it == kColumns.end())
            throw Error(ErrorCode::UnknownColumn, line_prefix(lines.front().number) + "unknown column '" + name + "'");
        const auto c = static_cast<std::size_t>(it - kColumns.begin());
        if (seen[c])
            throw Error(ErrorCode::MalformedRow, line_prefix(lines.front().number) + "column '" + name + "' repeated");
        seen[c] = true;
        position[c] = k;
    }
    for (std::size_t c = 0; c < kColumns.size(); ++c)
        if (!seen[c]) throw Error(ErrorCode::MissingColumn, "header lacks column '" + std::string(kColumns[c]) + "'");

    std::vector<EvalRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& line = lines[k];
        const std::string where = line_prefix(line.number);
        const auto fields = split_fields(line.text);
        if (!fields) throw Error(ErrorCode::MalformedRow, where + "unterminated quote");
        if (fields->size() != header->size())
            throw Error(ErrorCode::MalformedRow, where + "expected " + std::to_string(header->size()) + " fields, got " +
                                                     std::to_string(fields->size()));
        auto field = [&](std::size_t c) { return trim((*fields)[position[c]]); };
        records.push_back(make_record(field(0), field(1), field(2), field(3), field(4), field(5), where));
    }
    return records;
}

std::vector<EvalRecord> parse_records_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedRow, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
        throw Error(ErrorCode::MalformedRow, "structured record document needs a 'records' array");
    if (doc.contains("schema_version") && doc["schema_version"] != kSchemaVersion)
        throw Error(ErrorCode::MalformedRow, "unsupported schema_version " + doc["schema_version"].dump());

    std::vector<EvalRecord> records;
    std::size_t index = 0;
    for (const auto& item : doc["records"]) {
        const std::string where = "record " + std::to_string(index++) + ": ";
        if (!item.is_object()) throw Error(ErrorCode::MalformedRow, where + "not an object");
        for (const auto& [key, value] : item.items())
            if (std::find(kColumns.begin(), kColumns.end(), key) == kColumns.end())
                throw Error(ErrorCode::UnknownColumn, where + "unknown field '" + key + "'");
        for (auto c : kColumns)
            if (!item.contains(std::string(c)))
                throw Error(ErrorCode::MissingColumn, where + "missing field '" + std::string(c) + "'");
        auto text_of = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (!item["accuracy"].is_number())
            throw Error(ErrorCode::NonNumericAccuracy, where + "accuracy is not a number");
        EvalRecord r = make_record(text_of(item["model_id"]), text_of(item["seed"]), text_of(item["source"]),
                                   text_of(item["target"]), "0", text_of(item["num_questions"]), where);
        const double accuracy = item["accuracy"].get<double>();
        if (accuracy < 0.0 || accuracy > 100.0)
            throw Error(ErrorCode::AccuracyOutOfRange, where + "accuracy outside [0, 100]");
        r.accuracy = accuracy;
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<EvalRecord> parse_records(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') return parse_records_json(text);
    return parse_records_csv(text);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<EvalRecord> read_records(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return parse_records(text);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + std::string(e.what()), e.details());
    }
}

std::string write_records_csv(const std::vector<EvalRecord>& records) {
    std::string out;
    for (std::size_t c = 0; c < kColumns.size(); ++c) out += (c ? "," : "") + std::string(kColumns[c]);
    out += '\n';
    for (const auto& r : records) {
        out += csv_field(r.model_id) + ',' + std::to_string(r.seed) + ',' +
               csv_field(r.source ? *r.source : std::string(kBaselineSource)) + ',' + csv_field(r.target) + ',' +
               shortest(r.accuracy) + ',' + std::to_string(r.num_questions) + '\n';
    }
    return out;
}

std::string write_records_json(const std::vector<EvalRecord>& records) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["records"] = json::array();
    for (const auto& r : records) {
        doc["records"].push_back({
            {"model_id", r.model_id},
            {"seed", r.seed},
            {"source", r.source ? *r.source : std::string(kBaselineSource)},
            {"target", r.target},
            {"accuracy", r.accuracy},
            {"num_questions", r.num_questions},
        });
    }
    return doc.dump(2) + "\n";
}

TaskSet parse_task_set_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw Error(ErrorCode::MissingColumn, "task file has no header row");
    const auto header = split_fields(lines.front().text);
    if (!header) throw Error(ErrorCode::MalformedRow, line_prefix(lines.front().number) + "unterminated quote");
    std::map<std::string, std::size_t> position;
    for (std::size_t k = 0; k < header->size(); ++k) {
        const std::string name = trim((*header)[k]);
        if (name != "id" && name != "abbreviation" && name != "perceptual_level" && name != "granularity" &&
            name != "name")
            throw Error(ErrorCode::UnknownColumn, "task file: unknown column '" + name + "'");
        position[name] = k;
    }
    for (const char* required : {"id", "abbreviation", "perceptual_level", "granularity"})
        if (!position.count(required))
            throw Error(ErrorCode::MissingColumn, std::string("task file lacks column '") + required + "'");

    std::vector<TaskSpec> tasks;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::string where = line_prefix(lines[k].number);
        const auto fields = split_fields(lines[k].text);
        if (!fields || fields->size() != header->size())
            throw Error(ErrorCode::MalformedRow, where + "wrong number of fields");
        TaskSpec task;
        task.id = trim((*fields)[position["id"]]);
        task.abbreviation = trim((*fields)[position["abbreviation"]]);
        if (position.count("name")) task.name = trim((*fields)[position["name"]]);
        const auto level = parse_perceptual_level(trim((*fields)[position["perceptual_level"]]));
        const auto gran = parse_granularity(trim((*fields)[position["granularity"]]));
        if (!level) throw Error(ErrorCode::MalformedRow, where + "unknown perceptual level");
        if (!gran) throw Error(ErrorCode::MalformedRow, where + "unknown granularity");
        task.perceptual_level = *level;
        task.granularity = *gran;
        tasks.push_back(std::move(task));
    }
    return validate_task_set(std::move(tasks));
}

std::string write_task_set_csv(const TaskSet& task_set) {
    std::string out = "id,abbreviation,perceptual_level,granularity,name\n";
    for (const auto& t : task_set.tasks())
        out += csv_field(t.id) + ',' + csv_field(t.abbreviation) + ',' + std::string(to_string(t.perceptual_level)) +
               ',' + std::string(to_string(t.granularity)) + ',' + csv_field(t.name) + '\n';
    return out;
}

std::string format_fixed(double value, int decimals) {
    if (std::isnan(value)) return "nan";
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
    std::string s(buf.data());
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string export_heatmap_csv(const PGFSummary& summary, const TaskSet& task_set, bool with_std) {
    const std::size_t n = task_set.size();
    if (summary.mean.rows() != n || summary.mean.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "PGF summary does not match the task set");
    std::string out = "source/target";
    for (std::size_t j = 0; j < n; ++j) out += "," + csv_field(task_set[j].abbreviation);
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out += csv_field(task_set[i].abbreviation);
        for (std::size_t j = 0; j < n; ++j) {
            out += "," + format_fixed(summary.mean(i, j), 4);
            if (with_std) out += "±" + format_fixed(summary.std(i, j), 4);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string export_dot(const TransferGraph& graph) {
    const TaskSet& tasks = graph.task_set;
    std::vector<std::size_t> nodes(tasks.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k] = k;
    std::sort(nodes.begin(), nodes.end(),
              [&](std::size_t a, std::size_t b) { return tasks[a].abbreviation < tasks[b].abbreviation; });
    auto edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [&](const TransferEdge& a, const TransferEdge& b) {
        const auto& as = tasks[a.source].abbreviation;
        const auto& bs = tasks[b.source].abbreviation;
        if (as != bs) return as < bs;
        return tasks[a.target].abbreviation < tasks[b.target].abbreviation;
    });

    std::string out = "digraph transfer {\n";
    out += "  graph [label=" + dot_quote(graph.provenance + " percentile=" + format_fixed(graph.percentile, 2)) +
           "];\n";
    out += "  node [shape=box];\n";
    for (std::size_t k : nodes) out += "  " + dot_quote(tasks[k].abbreviation) + ";\n";
    for (const auto& e : edges) {
        const bool positive = e.sign == EdgeSign::Positive;
        out += "  " + dot_quote(tasks[e.source].abbreviation) + " -> " + dot_quote(tasks[e.target].abbreviation) +
               " [style=" + (positive ? "solid" : "dashed") + ", color=" +
               dot_quote(positive ? "#2166ac" : "#b2182b") + ", label=" + dot_quote(format_fixed(e.weight, 3)) +
               "];\n";
    }
    out += "}\n";
    return out;
}

namespace {

std::array<int, 3> parse_hex_color(const std::string& hex) {
    if (hex.size() != 7 || hex[0] != '#') throw Error(ErrorCode::InvalidConfig, "color must look like #rrggbb");
    std::array<int, 3> rgb{};
    for (int k = 0; k < 3; ++k) {
        const auto part = std::string_view(hex).substr(1 + 2 * k, 2);
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + 2, rgb[k], 16);
        if (ec != std::errc() || ptr != part.data() + 2)
            throw Error(ErrorCode::InvalidConfig, "color must look like #rrggbb");
    }
    return rgb;
}

}  // namespace

std::string diverging_color(double value, double range, const ColorScale& scale) {
    double t = range > 0.0 ? std::clamp(value / range, -1.0, 1.0) : 0.0;
    if (std::isnan(t)) t = 0.0;
    const auto end = parse_hex_color(t < 0.0 ? scale.negative_color : scale.positive_color);
    const double w = std::abs(t);
    std::array<char, 8> buf{};
    int rgb[3];
    for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(255.0 + w * (end[k] - 255.0)));
    std::snprintf(buf.data(), buf.size(), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf.data();
}

std::string export_svg_heatmap(const PGFSummary& summary, const TaskSet& task_set, const ColorScale& scale) {
    const std::size_t n = task_set.size();
    if (summary.mean.rows() != n || summary.mean.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "PGF summary does not match the task set");

    double range = 0.0;
    for (double v : summary.mean.data())
        if (std::isfinite(v)) range = std::max(range, std::abs(v));

    const int cell = scale.cell_size;
    const int left = 70;
    const int top = 70;
    const int grid = cell * static_cast<int>(n);
    const int bar_x = left + grid + 30;
    const int bar_w = 20;
    const int width = bar_x + bar_w + 80;
    const int height = top + grid + 40;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "  <title>" << xml_escape("PGF mean " + summary.model_id) << "</title>\n";
    os << "  <defs>\n    <linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
    os << "      <stop offset=\"0\" stop-color=\"" << diverging_color(-1.0, 1.0, scale) << "\"/>\n";
    os << "      <stop offset=\"0.5\" stop-color=\"#ffffff\"/>\n";
    os << "      <stop offset=\"1\" stop-color=\"" << diverging_color(1.0, 1.0, scale) << "\"/>\n";
    os << "    </linearGradient>\n  </defs>\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";

    for (std::size_t j = 0; j < n; ++j) {
        const int x = left + static_cast<int>(j) * cell + cell / 2;
        os << "  <text x=\"" << x << "\" y=\"" << top - 8 << "\" text-anchor=\"middle\">"
           << xml_escape(task_set[j].abbreviation) << "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int y = top + static_cast<int>(i) * cell + cell / 2 + 4;
        os << "  <text x=\"" << left - 8 << "\" y=\"" << y << "\" text-anchor=\"end\">"
           << xml_escape(task_set[i].abbreviation) << "</text>\n";
    }
    os << "  <text x=\"" << left + grid / 2 << "\" y=\"" << 20 << "\" text-anchor=\"middle\">target</text>\n";
    os << "  <text x=\"" << 14 << "\" y=\"" << top + grid / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << top + grid / 2 << ")\">source</text>\n";

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = summary.mean(i, j);
            const int x = left + static_cast<int>(j) * cell;
            const int y = top + static_cast<int>(i) * cell;
            os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
               << "\" fill=\"" << diverging_color(v, range, scale) << "\" stroke=\"#dddddd\"/>\n";
            os << "  <text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
               << "\" text-anchor=\"middle\" font-size=\"9\">" << format_fixed(v, 2) << "</text>\n";
        }
    }

    os << "  <rect x=\"" << bar_x << "\" y=\"" << top << "\" width=\"" << bar_w << "\" height=\"" << grid
       << "\" fill=\"url(#scale)\" stroke=\"#999999\"/>\n";
    os << "  <text x=\"" << bar_x + bar_w + 4 << "\" y=\"" << top + 4 << "\">" << format_fixed(range, 3) << "</text>\n";
    os << "  <text x=\"" << bar_x + bar_w + 4 << "\" y=\"" << top + grid / 2 + 4 << "\">0.000</text>\n";
    os << "  <text x=\"" << bar_x + bar_w + 4 << "\" y=\"" << top + grid + 4 << "\">" << format_fixed(-range, 3)
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (double v : m.row(r)) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

json score_json(const DirectionalScore& s) {
    return {{"task_id", s.task_id},
            {"positive", s.positive},
            {"negative", s.negative},
            {"positive_count", s.positive_count},
            {"negative_count", s.negative_count}};
}

template <typename Score>
json scores_json(const std::vector<Score>& scores) {
    json out = json::array();
    for (const auto& s : scores) out.push_back(score_json(s));
    return out;
}

json p_json(double p) { return std::isnan(p) ? json(nullptr) : json(p); }

json model_json(const ModelAnalysis& m, const TaskSet& tasks) {
    json out;
    out["model_id"] = m.model_id;
    out["seed_count"] = m.summary.seed_count;
    json seeds = json::array();
    for (const auto& s : m.per_seed) seeds.push_back(s.seed);
    out["seeds"] = seeds;
    out["pgf_mean"] = matrix_json(m.summary.mean);
    out["pgf_std"] = matrix_json(m.summary.std);
    json ceilings = json::array();
    for (const auto& s : m.per_seed) ceilings.push_back({{"seed", s.seed}, {"ceiling_used", s.ceiling_used}});
    out["ceilings"] = ceilings;
    out["transferability"] = scores_json(m.transfer);
    out["malleability"] = scores_json(m.malleability);
    out["average_transferability"] = {{"positive", m.transfer_average.positive},
                                      {"negative", m.transfer_average.negative}};
    out["average_malleability"] = {{"positive", m.malleability_average.positive},
                                   {"negative", m.malleability_average.negative}};
    json per_seed = json::array();
    for (const auto& s : m.seed_scores)
        per_seed.push_back(
            {{"seed", s.seed}, {"transferability", scores_json(s.transfer)}, {"malleability", scores_json(s.malleability)}});
    out["per_seed_scores"] = per_seed;

    json cats = json::array();
    for (const auto& c : m.categories)
        cats.push_back({{"axis", std::string(to_string(c.axis))},
                        {"source_category", c.source_category},
                        {"target_category", c.target_category},
                        {"positive_mean", c.positive_mean},
                        {"negative_mean", c.negative_mean},
                        {"positive_samples", c.positive_samples},
                        {"negative_samples", c.negative_samples},
                        {"pair_count", c.pair_count},
                        {"seed_count", c.seed_count}});
    out["category_aggregates"] = cats;

    json edges = json::array();
    for (const auto& e : m.graph.edges)
        edges.push_back({{"source", tasks[e.source].id},
                         {"target", tasks[e.target].id},
                         {"weight", e.weight},
                         {"sign", std::string(to_string(e.sign))}});
    out["graph"] = {{"percentile", m.graph.percentile}, {"provenance", m.graph.provenance}, {"edges", edges}};

    json cliques = json::array();
    for (const auto& c : m.cliques) {
        json pairs = json::array();
        for (const auto& p : c.per_pair_stats)
            pairs.push_back({{"source", tasks[p.source].id}, {"target", tasks[p.target].id}, {"mean_pgf", p.mean_pgf}});
        json entry = {{"members", c.members},
                      {"sign", std::string(to_string(c.sign))},
                      {"maximal", c.maximal},
                      {"p_value", p_json(c.p_value)},
                      {"significant", c.significant},
                      {"per_pair", pairs}};
        if (c.stability) {
            entry["test"] = {{"method", std::string(to_string(c.stability->method))},
                             {"statistic", c.stability->statistic},
                             {"sample_size", c.stability->sample_size},
                             {"sidedness", std::string(to_string(c.stability->sidedness))}};
        } else {
            entry["test"] = nullptr;
        }
        cliques.push_back(std::move(entry));
    }
    out["cliques"] = cliques;

    json plans = json::array();
    for (const auto& p : m.plans) {
        json selected = json::array();
        for (const auto& s : p.selected_sources)
            selected.push_back({{"task_id", s.task_id}, {"weight", s.weight}, {"mean_pgf", s.mean_pgf}});
        json excluded = json::array();
        for (const auto& e : p.excluded)
            excluded.push_back({{"task_id", e.task_id}, {"mean_pgf", e.mean_pgf}, {"reason", e.reason}});
        plans.push_back({{"target_task", p.target_task},
                         {"strategy", p.strategy == SelectionStrategy::AbsoluteThreshold ? "AbsoluteThreshold"
                                                                                         : "ColumnPercentile"},
                         {"threshold_used", p.threshold_used},
                         {"selected_sources", selected},
                         {"excluded", excluded},
                         {"no_eligible_reason", p.no_eligible_reason ? json(*p.no_eligible_reason) : json(nullptr)}});
    }
    out["mixture_plans"] = plans;
    return out;
}

}  // namespace

std::string export_report_json(const AnalysisReport& report) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["manifest"] = {{"subcommand", report.manifest.subcommand},
                       {"inputs", report.manifest.inputs},
                       {"ceiling", report.manifest.ceiling},
                       {"config", report.manifest.config},
                       {"timestamp", report.manifest.timestamp ? json(*report.manifest.timestamp) : json(nullptr)},
                       {"tool_version", report.manifest.tool_version}};
    json tasks = json::array();
    for (const auto& t : report.task_set.tasks())
        tasks.push_back({{"id", t.id},
                         {"abbreviation", t.abbreviation},
                         {"name", t.name},
                         {"perceptual_level", std::string(to_string(t.perceptual_level))},
                         {"granularity", std::string(to_string(t.granularity))}});
    doc["tasks"] = tasks;
    json models = json::array();
    for (const auto& m : report.models) models.push_back(model_json(m, report.task_set));
    doc["models"] = models;
    json personas = json::array();
    for (const auto& p : report.personas.reports) {
        json pv = json::object();
        for (const auto& [model, value] : p.p_values) pv[model] = p_json(value);
        personas.push_back({{"task_id", p.task_id},
                            {"persona", std::string(to_string(p.persona))},
                            {"models_satisfied", p.models_satisfied},
                            {"consistent", p.consistent},
                            {"significant", p.significant},
                            {"single_model", p.single_model},
                            {"p_values", pv}});
    }
    doc["personas"] = personas;
    json warnings = json::array();
    for (const auto& w : report.warnings) warnings.push_back(w.message);
    for (const auto& w : report.personas.warnings) warnings.push_back(w.message);
    doc["warnings"] = warnings;
    return doc.dump(2) + "\n";
}

}  // namespace taskxfer::io

namespace taskxfer::io {

namespace {

EdgeSign parse_sign(const json& v) {
    const std::string s = v.get<std::string>();
    if (s == "Positive" || s == "positive" || s == "+") return EdgeSign::Positive;
    if (s == "Negative" || s == "negative" || s == "-") return EdgeSign::Negative;
    throw Error(ErrorCode::InconsistentStructure, "unknown clique sign '" + s + "'");
}

Persona parse_persona(const std::string& s) {
    for (Persona p : {Persona::Donor, Persona::Pirate, Persona::Sponge, Persona::Sieve})
        if (to_string(p) == s) return p;
    throw Error(ErrorCode::InconsistentStructure, "unknown persona '" + s + "'");
}

TaskSet tasks_from_json(const json& arr) {
    std::vector<TaskSpec> tasks;
    for (const auto& t : arr) {
        TaskSpec spec;
        spec.id = t.at("id").get<std::string>();
        spec.abbreviation = t.value("abbreviation", spec.id);
        spec.name = t.value("name", std::string{});
        const auto level = parse_perceptual_level(t.at("perceptual_level").get<std::string>());
        const auto gran = parse_granularity(t.at("granularity").get<std::string>());
        if (!level || !gran) throw Error(ErrorCode::InvalidTask, "task '" + spec.id + "' has an unknown category");
        spec.perceptual_level = *level;
        spec.granularity = *gran;
        tasks.push_back(std::move(spec));
    }
    return validate_task_set(std::move(tasks));
}

}  // namespace

PlantedStructure parse_structure_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        if (!doc.is_object()) throw Error(ErrorCode::InconsistentStructure, "structure document must be an object");

        if (doc.contains("preset")) {
            if (doc["preset"] != "default")
                throw Error(ErrorCode::InconsistentStructure, "unknown preset " + doc["preset"].dump());
            PlantedDesign design;
            if (doc.contains("model_ids")) design.model_ids = doc["model_ids"].get<std::vector<std::string>>();
            if (doc.contains("seeds")) design.seeds = doc["seeds"].get<std::vector<std::int64_t>>();
            design.noise_std = doc.value("noise_std", design.noise_std);
            design.questions = doc.value("questions", design.questions);
            design.rng_seed = doc.value("rng_seed", design.rng_seed);
            design.background = doc.value("background", design.background);
            return default_planted_structure(design);
        }

        PlantedStructure s;
        s.task_set = doc.contains("tasks") ? tasks_from_json(doc["tasks"]) : blink_task_set();
        const std::size_t n = s.task_set.size();
        s.baseline = doc.at("baseline").get<std::vector<double>>();
        s.ceiling = doc.contains("ceiling") ? doc["ceiling"].get<std::vector<double>>() : std::vector<double>(n, 100.0);
        const auto effects = doc.at("effects").get<std::vector<std::vector<double>>>();
        s.effects = Matrix(effects.size(), effects.empty() ? 0 : effects.front().size());
        for (std::size_t i = 0; i < effects.size(); ++i) {
            if (effects[i].size() != s.effects.cols())
                throw Error(ErrorCode::InconsistentStructure, "effects rows differ in length");
            for (std::size_t j = 0; j < effects[i].size(); ++j) s.effects(i, j) = effects[i][j];
        }
        for (const auto& c : doc.value("planted_cliques", json::array()))
            s.planted_cliques.push_back({c.at("members").get<std::vector<std::string>>(), parse_sign(c.at("sign"))});
        for (const auto& p : doc.value("planted_personas", json::array()))
            s.planted_personas.push_back(
                {p.at("task_id").get<std::string>(), parse_persona(p.at("persona").get<std::string>())});
        s.noise_std = doc.value("noise_std", 0.0);
        if (doc.contains("questions")) {
            if (doc["questions"].is_array()) {
                s.questions = doc["questions"].get<std::vector<int>>();
            } else {
                s.questions.assign(n, doc["questions"].get<int>());
            }
        } else {
            s.questions.assign(n, 0);
        }
        if (doc.contains("seeds")) s.seeds = doc["seeds"].get<std::vector<std::int64_t>>();
        if (doc.contains("model_ids")) s.model_ids = doc["model_ids"].get<std::vector<std::string>>();
        s.rng_seed = doc.value("rng_seed", std::uint64_t{0});
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InconsistentStructure, std::string("invalid structure document: ") + e.what());
    }
}

std::string write_structure_json(const PlantedStructure& s) {
    json doc;
    json tasks = json::array();
    for (const auto& t : s.task_set.tasks())
        tasks.push_back({{"id", t.id},
                         {"abbreviation", t.abbreviation},
                         {"name", t.name},
                         {"perceptual_level", std::string(to_string(t.perceptual_level))},
                         {"granularity", std::string(to_string(t.granularity))}});
    doc["tasks"] = tasks;
    doc["baseline"] = s.baseline;
    doc["ceiling"] = s.ceiling;
    doc["effects"] = matrix_json(s.effects);
    json cliques = json::array();
    for (const auto& c : s.planted_cliques)
        cliques.push_back({{"members", c.members}, {"sign", std::string(to_string(c.sign))}});
    doc["planted_cliques"] = cliques;
    json personas = json::array();
    for (const auto& p : s.planted_personas)
        personas.push_back({{"task_id", p.task_id}, {"persona", std::string(to_string(p.persona))}});
    doc["planted_personas"] = personas;
    doc["noise_std"] = s.noise_std;
    doc["questions"] = s.questions;
    doc["seeds"] = s.seeds;
    doc["model_ids"] = s.model_ids;
    doc["rng_seed"] = s.rng_seed;
    return doc.dump(2) + "\n";
}

ReportFindings parse_report_findings(std::string_view report_json) {
    ReportFindings out;
    try {
        const json doc = json::parse(report_json);
        for (const auto& m : doc.at("models")) {
            out.model_ids.push_back(m.at("model_id").get<std::string>());
            std::vector<Clique> cliques;
            for (const auto& c : m.at("cliques")) {
                Clique clique;
                clique.members = c.at("members").get<std::vector<std::string>>();
                clique.sign = parse_sign(c.at("sign"));
                clique.maximal = c.at("maximal").get<bool>();
                clique.significant = c.at("significant").get<bool>();
                clique.p_value = c.at("p_value").is_null() ? std::nan("") : c.at("p_value").get<double>();
                cliques.push_back(std::move(clique));
            }
            out.cliques.push_back(std::move(cliques));
        }
        for (const auto& p : doc.at("personas")) {
            PersonaReport report;
            report.task_id = p.at("task_id").get<std::string>();
            report.persona = parse_persona(p.at("persona").get<std::string>());
            report.models_satisfied = p.at("models_satisfied").get<std::vector<std::string>>();
            report.consistent = p.at("consistent").get<bool>();
            report.significant = p.at("significant").get<bool>();
            report.single_model = p.at("single_model").get<bool>();
            for (const auto& [model, value] : p.at("p_values").items())
                report.p_values[model] = value.is_null() ? std::nan("") : value.get<double>();
            out.personas.push_back(std::move(report));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRow, std::string("invalid report document: ") + e.what());
    }
    return out;
}

}  // namespace taskxfer::io
