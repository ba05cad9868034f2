#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "taskxfer/cli.hpp"
#include "taskxfer/io.hpp"

namespace fs = std::filesystem;
using taskxfer::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("taskxfer-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string synth_records(const TempDir& dir, const std::string& noise = "2") {
    const std::string path = dir / "records.csv";
    REQUIRE(invoke({"synth", "--noise", noise, "--rng-seed", "11", "-o", path}).code == 0);
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and version succeed, unknown options are usage errors") {
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({"--version"}).code == 0);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"analyze", "--no-such-flag"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
}

TEST_CASE("validate reports ok and errors") {
    TempDir dir;
    const auto records = synth_records(dir);
    auto ok = invoke({"validate", records, "--json-errors"});
    CHECK(ok.code == 0);
    const auto doc = nlohmann::json::parse(ok.out);
    CHECK(doc["ok"] == true);
    CHECK(doc["errors"].empty());

    std::string text = slurp(records);
    text.erase(text.find_last_of('\n', text.size() - 2) + 1);  // drop the last row
    write_file(dir / "short.csv", text);
    auto bad = invoke({"validate", dir / "short.csv", "--json-errors"});
    CHECK(bad.code == 1);
    const auto bad_doc = nlohmann::json::parse(bad.out);
    CHECK(bad_doc["ok"] == false);
    CHECK(bad_doc["errors"][0]["code"] == "MissingCell");

    write_file(dir / "range.csv", "model_id,seed,source,target,accuracy,num_questions\nm,0,BASELINE,RD,101,4\n");
    auto range = invoke({"validate", dir / "range.csv", "--json-errors"});
    CHECK(range.code == 1);
    CHECK(nlohmann::json::parse(range.out)["errors"][0]["code"] == "AccuracyOutOfRange");

    CHECK(invoke({"validate", dir / "missing.csv"}).code == 2);
}

TEST_CASE("analyze writes the report set") {
    TempDir dir;
    const auto records = synth_records(dir);
    const std::string out_dir = dir / "out";
    auto r = invoke({"analyze", records, "-o", out_dir, "--timestamp", "2024-01-01T00:00:00Z"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out_dir + "/report.json"));
    for (const char* model : {"synthetic-base", "synthetic-large", "synthetic-small"}) {
        CHECK(fs::exists(out_dir + "/pgf_" + std::string(model) + ".csv"));
        CHECK(fs::exists(out_dir + "/pgf_" + std::string(model) + ".svg"));
        CHECK(fs::exists(out_dir + "/graph_" + std::string(model) + ".dot"));
    }
    const auto doc = nlohmann::json::parse(slurp(out_dir + "/report.json"));
    CHECK(doc["manifest"]["timestamp"] == "2024-01-01T00:00:00Z");
    CHECK(doc["models"].size() == 3);
    CHECK(doc["models"][0]["mixture_plans"].size() == 13);
}

TEST_CASE("analyze is byte-for-byte deterministic") {
    TempDir dir;
    const auto records = synth_records(dir);
    REQUIRE(invoke({"analyze", records, "-o", dir / "a", "--timestamp", "t"}).code == 0);
    REQUIRE(invoke({"analyze", records, "-o", dir / "b", "--timestamp", "t", "--threads", "3"}).code == 0);
    for (const auto& entry : fs::directory_iterator(dir.path / "a")) {
        const auto name = entry.path().filename().string();
        CAPTURE(name);
        CHECK(slurp(entry.path().string()) == slurp(dir / ("b/" + name)));
    }
}

TEST_CASE("percentile 100 keeps every nonzero edge") {
    TempDir dir;
    const auto records = synth_records(dir);
    REQUIRE(invoke({"analyze", records, "-o", dir / "out", "--percentile", "100"}).code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "out/report.json"));
    const auto& model = doc["models"][0];
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < 13; ++i)
        for (std::size_t j = 0; j < 13; ++j) nonzero += (i != j && model["pgf_mean"][i][j] != 0.0) ? 1 : 0;
    CHECK(model["graph"]["edges"].size() == nonzero);
    const std::string dot = slurp(dir / ("out/graph_" + model["model_id"].get<std::string>() + ".dot"));
    std::size_t arrows = 0;
    for (std::size_t p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 1)) ++arrows;
    CHECK(arrows == nonzero);
}

TEST_CASE("best-observed ceiling puts the best cell of each column at one") {
    TempDir dir;
    const auto records = synth_records(dir, "0");
    REQUIRE(invoke({"analyze", records, "-o", dir / "out", "--ceiling", "best"}).code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "out/report.json"));
    for (const auto& model : doc["models"]) {
        for (std::size_t j = 0; j < 13; ++j) {
            double best = -1e9;
            for (std::size_t i = 0; i < 13; ++i) best = std::max(best, model["pgf_mean"][i][j].get<double>());
            CHECK(best == doctest::Approx(1.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("configuration errors are usage errors") {
    TempDir dir;
    const auto records = synth_records(dir);
    CHECK(invoke({"analyze", records, "-o", dir / "o", "--ceiling", "weird"}).code == 2);
    CHECK(invoke({"analyze", records, "-o", dir / "o", "--ceiling", "fixed:0"}).code == 2);
    CHECK(invoke({"analyze", records, "-o", dir / "o", "--percentile", "0"}).code == 2);
    CHECK(invoke({"analyze", records, "-o", dir / "o", "--alpha", "1.5"}).code == 2);
    CHECK(invoke({"analyze", records, "-o", dir / "o", "--threshold", "pct:150"}).code == 2);
    CHECK(invoke({"analyze", records, "-o", dir / "o", "--target", "ZZ"}).code == 1);
}

TEST_CASE("synth is deterministic and validates structures") {
    TempDir dir;
    auto a = invoke({"synth", "--noise", "4", "--rng-seed", "5", "-o", "-"});
    auto b = invoke({"synth", "--noise", "4", "--rng-seed", "5", "-o", "-"});
    auto c = invoke({"synth", "--noise", "4", "--rng-seed", "6", "-o", "-"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(taskxfer::io::parse_records(a.out).size() == 3 * 4 * 14 * 13);

    auto json = invoke({"synth", "--format", "json", "-o", "-"});
    CHECK(json.code == 0);
    CHECK(taskxfer::io::parse_records(json.out).size() == 3 * 4 * 14 * 13);

    write_file(dir / "bad.json", R"({"baseline": [1, 2]})");
    CHECK(invoke({"synth", "--structure", dir / "bad.json", "-o", "-"}).code != 0);
    CHECK(invoke({"synth", "--format", "xml", "-o", "-"}).code == 2);
}

TEST_CASE("report scores recovery against the planted structure") {
    TempDir dir;
    const std::string records = dir / "records.csv";
    REQUIRE(invoke({"synth", "--noise", "0", "-o", records, "--structure-out", dir / "structure.json"}).code == 0);
    REQUIRE(invoke({"analyze", records, "-o", dir / "out"}).code == 0);
    auto r = invoke({"report", dir / "out/report.json", "--structure", dir / "structure.json"});
    CHECK(r.code == 0);
    CHECK(r.out.find("recall 1") != std::string::npos);
    CHECK(r.out.find("missed") == std::string::npos);
}

TEST_CASE("the executable maps exit codes") {
    const std::string cli = TASKXFER_CLI;
    auto status = [](const std::string& command) {
        const int raw = std::system((command + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status(cli + " --version") == 0);
    CHECK(status(cli + " analyze") == 2);
    TempDir dir;
    write_file(dir / "r.csv", "model_id,seed,source,target,accuracy,num_questions\nm,0,BASELINE,RD,50,4\n");
    CHECK(status(cli + " validate " + (dir / "r.csv")) == 1);
}

}  // TEST_SUITE
