#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "support/fixtures.hpp"
#include "taskxfer/error.hpp"
#include "taskxfer/io.hpp"
#include "taskxfer/pipeline.hpp"

using namespace taskxfer;

namespace {

std::string golden_path(const std::string& name) { return std::string(TASKXFER_TEST_DATA) + "/golden/" + name; }

// Set TASKXFER_UPDATE_GOLDENS=1 to rewrite the files after an intended change.
void check_golden(const std::string& name, const std::string& actual) {
    const std::string path = golden_path(name);
    if (std::getenv("TASKXFER_UPDATE_GOLDENS")) {
        std::ofstream(path, std::ios::binary) << actual;
        return;
    }
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == actual);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

std::string error_text(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

TaskSet two_tasks() {
    return validate_task_set({{"RD", "RD", PerceptualLevel::Low, Granularity::Pixel, "Relative depth"},
                              {"VS", "VS", PerceptualLevel::High, Granularity::Image, "Visual similarity"}});
}

TransferGraph graph_with(std::vector<TransferEdge> edges) {
    TransferGraph g;
    g.task_set = two_tasks();
    g.edges = std::move(edges);
    g.provenance = "model=m seeds=4 (mean)";
    return g;
}

/// Minimal structural check of the DOT subset we emit: a digraph block of
/// attribute statements, node statements and edge statements.
bool dot_is_well_formed(const std::string& text, std::set<std::string>& nodes, std::size_t& edge_count) {
    static const std::regex attr(R"re(^  (graph|node|edge) \[[a-z]+=("([^"\\]|\\.)*"|[a-z]+)(, [a-z]+=("([^"\\]|\\.)*"|[a-z]+))*\];$)re");
    static const std::regex node(R"re(^  "([^"\\]|\\.)+";$)re");
    static const std::regex edge(
        R"re(^  "(([^"\\]|\\.)+)" -> "(([^"\\]|\\.)+)" \[style=(solid|dashed), color="#[0-9a-f]{6}", label="-?[0-9]+\.[0-9]{3}"\];$)re");
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "digraph transfer {") return false;
    bool closed = false;
    while (std::getline(in, line)) {
        if (closed) return false;
        std::smatch m;
        if (line == "}") {
            closed = true;
        } else if (std::regex_match(line, m, edge)) {
            if (!nodes.count(m[1]) || !nodes.count(m[3])) return false;
            ++edge_count;
        } else if (std::regex_match(line, node)) {
            nodes.insert(line.substr(3, line.size() - 5));
        } else if (!std::regex_match(line, attr)) {
            return false;
        }
    }
    return closed;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("three-row file with one baseline row") {
    const std::string text =
        "model_id,seed,source,target,accuracy,num_questions\n"
        "m,0,BASELINE,RD,50,4\n"
        "m,0,RD,RD,75,4\n"
        "m,0,VS,RD,25,4\n";
    const auto records = io::parse_records(text);
    REQUIRE(records.size() == 3);
    CHECK(records[0].is_baseline());
    CHECK_FALSE(records[1].is_baseline());
    CHECK(*records[2].source == "VS");
    CHECK(records[2].accuracy == 25.0);
    CHECK(records[2].num_questions == 4);
}

TEST_CASE("columns in any order, quoting, BOM and CRLF") {
    const std::string text =
        "\xEF\xBB\xBF" "target,accuracy,model_id,seed,num_questions,source\r\n"
        "RD,12.5,\"model, \"\"quoted\"\"\",3,8,BASELINE\r\n"
        "\r\n"
        "RD,100,plain,-1,0,VS\r\n";
    const auto records = io::parse_records_csv(text);
    REQUIRE(records.size() == 2);
    CHECK(records[0].model_id == "model, \"quoted\"");
    CHECK(records[0].seed == 3);
    CHECK(records[1].seed == -1);
    CHECK(records[1].accuracy == 100.0);
}

TEST_CASE("record parse errors carry line numbers") {
    const std::string header = "model_id,seed,source,target,accuracy,num_questions\n";
    CHECK(code_of([&] { io::parse_records_csv(header + "m,0,BASELINE,RD,101,4\n"); }) == ErrorCode::AccuracyOutOfRange);
    CHECK(error_text([&] { io::parse_records_csv(header + "m,0,RD,RD,50,4\nm,0,BASELINE,RD,101,4\n"); })
              .find("line 3") != std::string::npos);
    CHECK(code_of([&] { io::parse_records_csv(header + "m,0,BASELINE,RD,abc,4\n"); }) == ErrorCode::NonNumericAccuracy);
    CHECK(code_of([&] { io::parse_records_csv(header + "m,0,BASELINE,RD,50\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { io::parse_records_csv(header + "m,x,BASELINE,RD,50,4\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { io::parse_records_csv(header + "m,0,BASELINE,RD,50,-1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { io::parse_records_csv("model_id,seed,source,target,accuracy\n"); }) == ErrorCode::MissingColumn);
    CHECK(code_of([&] { io::parse_records_csv("model_id,seed,source,target,accuracy,num_questions,x\n"); }) ==
          ErrorCode::UnknownColumn);
    CHECK(code_of([&] { io::parse_records_csv(header + "\"m,0,BASELINE,RD,50,4\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { io::parse_records_csv(""); }) == ErrorCode::MissingColumn);
}

TEST_CASE("records round trip through both formats") {
    PlantedDesign design;
    design.noise_std = 3.3;
    design.model_ids = {"a", "b,c"};
    const auto records = generate(default_planted_structure(design)).records;

    const std::string csv = io::write_records_csv(records);
    CHECK(io::parse_records(csv) == records);
    CHECK(io::write_records_csv(io::parse_records(csv)) == csv);

    const std::string json = io::write_records_json(records);
    CHECK(io::parse_records(json) == records);
    CHECK(io::write_records_json(io::parse_records(json)) == json);

    // reordered columns normalize to the canonical order
    const std::string shuffled = "accuracy,target,source,seed,model_id,num_questions\n0.1,RD,VS,2,m,0\n";
    CHECK(io::write_records_csv(io::parse_records(shuffled)) ==
          "model_id,seed,source,target,accuracy,num_questions\nm,2,VS,RD,0.1,0\n");
}

TEST_CASE("structured records validation") {
    CHECK(code_of([] { io::parse_records_json(R"({"schema_version": 2, "records": []})"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { io::parse_records_json(R"({"records": [{"model_id": "m"}]})"); }) == ErrorCode::MissingColumn);
    CHECK(code_of([] {
              io::parse_records_json(
                  R"({"records": [{"model_id": "m", "seed": 0, "source": "BASELINE", "target": "RD", "accuracy": "x", "num_questions": 0}]})");
          }) == ErrorCode::NonNumericAccuracy);
    CHECK(code_of([] { io::parse_records_json("{not json"); }) == ErrorCode::MalformedRow);
}

TEST_CASE("task set file round trip") {
    const TaskSet tasks = blink_task_set();
    const std::string text = io::write_task_set_csv(tasks);
    CHECK(io::parse_task_set_csv(text) == tasks);
    CHECK(code_of([] { io::parse_task_set_csv("id,abbreviation,perceptual_level\nA,A,Low\n"); }) == ErrorCode::MissingColumn);
    CHECK(code_of([] { io::parse_task_set_csv("id,abbreviation,perceptual_level,granularity\nA,A,Low,Pixel\nA,B,Low,Pixel\n"); }) ==
          ErrorCode::DuplicateTaskId);
}

TEST_CASE("fixed formatting rounds half to even and drops negative zero") {
    CHECK(io::format_fixed(0.125, 2) == "0.12");
    CHECK(io::format_fixed(0.375, 2) == "0.38");
    CHECK(io::format_fixed(2.5, 0) == "2");
    CHECK(io::format_fixed(-0.00001, 4) == "0.0000");
    CHECK(io::format_fixed(-0.0, 3) == "0.000");
    CHECK(io::format_fixed(-1.23456, 4) == "-1.2346");
}

TEST_CASE("heatmap csv") {
    const TaskSet tasks = two_tasks();
    auto s = fixtures::summary({{0.6, 0.18}, {-1.0, 0.0}});
    CHECK(io::export_heatmap_csv(s, tasks) ==
          "source/target,RD,VS\n"
          "RD,0.6000,0.1800\n"
          "VS,-1.0000,0.0000\n");
    CHECK(io::export_heatmap_csv(fixtures::summary({{0, 0}, {0, 0}}), tasks) ==
          "source/target,RD,VS\nRD,0.0000,0.0000\nVS,0.0000,0.0000\n");
    CHECK(io::export_heatmap_csv(s, tasks, true) ==
          "source/target,RD,VS\n"
          "RD,0.6000±0.0000,0.1800±0.0000\n"
          "VS,-1.0000±0.0000,0.0000±0.0000\n");
    check_golden("heatmap_2task.csv", io::export_heatmap_csv(s, tasks));
}

TEST_CASE("dot export") {
    SUBCASE("empty graph lists nodes only") {
        const std::string dot = io::export_dot(graph_with({}));
        CHECK(dot ==
              "digraph transfer {\n"
              "  graph [label=\"model=m seeds=4 (mean) percentile=20.00\"];\n"
              "  node [shape=box];\n"
              "  \"RD\";\n"
              "  \"VS\";\n"
              "}\n");
    }
    SUBCASE("one positive edge") {
        const std::string dot = io::export_dot(graph_with({{0, 1, 0.25, EdgeSign::Positive}}));
        const std::string edge = "  \"RD\" -> \"VS\" [style=solid, color=\"#2166ac\", label=\"0.250\"];\n";
        CHECK(dot.find(edge) != std::string::npos);
        CHECK(std::count(dot.begin(), dot.end(), '>') == 1);
        check_golden("graph_single_edge.dot", dot);
    }
    SUBCASE("negative edges are dashed") {
        const std::string dot =
            io::export_dot(graph_with({{0, 1, 0.25, EdgeSign::Positive}, {1, 0, -0.5, EdgeSign::Negative}}));
        CHECK(dot.find("  \"VS\" -> \"RD\" [style=dashed, color=\"#b2182b\", label=\"-0.500\"];\n") != std::string::npos);
    }
}

TEST_CASE("dot output is well formed for analysis graphs") {
    PlantedDesign design;
    design.noise_std = 2.0;
    const auto s = default_planted_structure(design);
    PipelineOptions options;
    options.config.edge_percentile = 100;
    const auto report = run_analysis(generate(s).records, s.task_set, options);
    for (const auto& m : report.models) {
        std::set<std::string> nodes;
        std::size_t edges = 0;
        const std::string dot = io::export_dot(m.graph);
        CHECK(dot_is_well_formed(dot, nodes, edges));
        CHECK(nodes.size() == 13);
        CHECK(edges == m.graph.edges.size());
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < 13; ++i)
            for (std::size_t j = 0; j < 13; ++j) nonzero += (i != j && m.summary.mean(i, j) != 0.0) ? 1 : 0;
        CHECK(edges == nonzero);
    }
}

TEST_CASE("diverging colors") {
    const io::ColorScale scale;
    CHECK(io::diverging_color(0.0, 1.0, scale) == "#ffffff");
    CHECK(io::diverging_color(2.0, 2.0, scale) == "#2166ac");
    CHECK(io::diverging_color(-2.0, 2.0, scale) == "#b2182b");
    CHECK(io::diverging_color(-5.0, 2.0, scale) == "#b2182b");
    CHECK(io::diverging_color(0.3, 0.0, scale) == "#ffffff");
}

TEST_CASE("svg heatmap") {
    SUBCASE("single zero cell is white") {
        const auto tasks = two_tasks();
        const std::string svg = io::export_svg_heatmap(fixtures::summary({{0, 0}, {0, 0}}), tasks);
        CHECK(svg.find("fill=\"#ffffff\" stroke=\"#dddddd\"") != std::string::npos);
        CHECK(svg.find("#2166ac\" stroke") == std::string::npos);
    }
    SUBCASE("the extreme cell takes the end color") {
        const std::string svg = io::export_svg_heatmap(fixtures::summary({{0.8, -0.2}, {0.1, 0}}), two_tasks());
        CHECK(svg.find("fill=\"#2166ac\" stroke=\"#dddddd\"") != std::string::npos);
    }
    SUBCASE("3x3 golden") {
        const TaskSet tasks = validate_task_set({{"A&B", "A&B", PerceptualLevel::Low, Granularity::Pixel, ""},
                                                 {"C", "C", PerceptualLevel::Mid, Granularity::Crop, ""},
                                                 {"D", "D", PerceptualLevel::High, Granularity::Image, ""}});
        const std::string svg =
            io::export_svg_heatmap(fixtures::summary({{1.0, 0.25, -0.5}, {-2.0, 0.9, 0.0}, {0.1, -0.05, 0.6}}), tasks);
        CHECK(svg.find("A&amp;B") != std::string::npos);
        check_golden("heatmap_3x3.svg", svg);
    }
}

TEST_CASE("report json") {
    SUBCASE("empty analysis") {
        io::AnalysisReport report;
        report.task_set = two_tasks();
        const std::string text = io::export_report_json(report);
        const auto doc = nlohmann::json::parse(text);
        CHECK(doc["schema_version"] == 1);
        CHECK(doc["models"].empty());
        CHECK(doc["personas"].empty());
        CHECK(doc["warnings"].empty());
        CHECK(doc["tasks"].size() == 2);
        CHECK(doc["manifest"]["timestamp"].is_null());
    }
    SUBCASE("full run is deterministic and reads back") {
        const auto s = default_planted_structure();
        PipelineOptions options;
        options.ceiling = planted_ceiling(s);
        const auto records = generate(s).records;
        const auto a = io::export_report_json(run_analysis(records, s.task_set, options));
        options.threads = 4;
        const auto b = io::export_report_json(run_analysis(records, s.task_set, options));
        CHECK(a == b);

        const auto findings = io::parse_report_findings(a);
        CHECK(findings.model_ids == std::vector<std::string>{"synthetic-base", "synthetic-large", "synthetic-small"});
        CHECK(findings.personas.size() == 13 * 4);
        for (const auto& cliques : findings.cliques) CHECK(recovery_report(s, cliques, findings.personas).recall == 1.0);
    }
}

TEST_CASE("structure documents") {
    const auto s = default_planted_structure();
    const auto again = io::parse_structure_json(io::write_structure_json(s));
    CHECK(again.effects == s.effects);
    CHECK(again.baseline == s.baseline);
    CHECK(again.task_set == s.task_set);
    CHECK(again.model_ids == s.model_ids);
    CHECK(again.planted_personas.size() == 4);
    CHECK(io::write_structure_json(again) == io::write_structure_json(s));

    const auto preset = io::parse_structure_json(R"({"preset": "default", "noise_std": 2.5, "seeds": [7, 8]})");
    CHECK(preset.noise_std == 2.5);
    CHECK(preset.seeds == std::vector<std::int64_t>{7, 8});

    CHECK(code_of([] { io::parse_structure_json(R"({"preset": "other"})"); }) == ErrorCode::InconsistentStructure);
    CHECK(code_of([] { io::parse_structure_json(R"({"baseline": [1]})"); }) == ErrorCode::InconsistentStructure);
}

}  // TEST_SUITE
