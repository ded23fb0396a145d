#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <unistd.h>

#include "iaa/cli.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace iaa {
namespace {

using nlohmann::json;
using testing::data_dir;
using testing::matches_golden;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data(const std::string& name) { return (data_dir() / name).string(); }

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("iaa_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
    static inline int counter_ = 0;
};

TEST(Cli, UnknownSubcommandAndFlag) {
    auto r = run({"frobnicate"});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    r = run({"metrics", "--in", data("three_workers.jsonl"), "--bogus"});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_EQ(run({}).code, cli::kInputError);
}

TEST(Cli, HelpIsSuccess) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, cli::kSuccess);
    EXPECT_NE(r.out.find("workers"), std::string::npos);
}

TEST(Cli, MetricsGolden) {
    const auto r = run({"metrics", "--in", data("two_classes.csv")});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["classes"].size(), 2u);
    EXPECT_EQ(doc["classes"][0]["doc_class"], "invoice");
    EXPECT_TRUE(matches_golden("cli_metrics.json", r.out));
}

TEST(Cli, MetricsWithBootstrapIsDeterministic) {
    const std::vector<std::string> args = {"metrics", "--in", data("two_classes.csv"), "--ci", "alpha",
                                           "--bootstrap-samples", "200", "--seed", "11"};
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, cli::kSuccess) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto ci = json::parse(a.out)["classes"][0]["ci"];
    EXPECT_EQ(ci["n_resamples"], 200);
    EXPECT_LE(ci["lower"].get<double>(), ci["upper"].get<double>());
    EXPECT_TRUE(matches_golden("cli_metrics_ci.json", a.out));
}

TEST(Cli, MissingInputIsInputError) {
    const auto r = run({"metrics", "--in", data("does_not_exist.jsonl")});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(Cli, MalformedInputCitesLine) {
    const auto r = run({"metrics", "--in", data("malformed.csv")});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, ValidateReportsEveryProblem) {
    const auto r = run({"validate", "--in", data("malformed.csv")});
    EXPECT_EQ(r.code, cli::kInputError);
    const auto doc = json::parse(r.out);
    EXPECT_FALSE(doc["valid"].get<bool>());
    std::vector<std::string> kinds;
    for (const auto& d : doc["diagnostics"]) kinds.push_back(d["kind"]);
    EXPECT_EQ(kinds, (std::vector<std::string>{"EmptyField", "MalformedLine", "DuplicateAssignment"}));
    EXPECT_EQ(doc["diagnostics"][2]["line"], 5);
}

TEST(Cli, ValidateHappyPath) {
    const auto r = run({"validate", "--in", data("two_classes.csv"), "--labels", data("labels.txt")});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["valid"].get<bool>());
    EXPECT_EQ(doc["annotators"], 3);
    EXPECT_EQ(doc["labels"], 4);
    EXPECT_EQ(doc["doc_classes"], json::array({"invoice", "receipt"}));
}

TEST(Cli, DeclaredLabelsRejectUnknown) {
    TempDir tmp;
    std::ofstream(tmp.file("labels.txt")) << "date\nname\n";
    const auto r = run({"metrics", "--in", data("two_classes.csv"), "--labels", tmp.file("labels.txt")});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("total"), std::string::npos) << r.err;
}

TEST(Cli, WorkersFlaggedExitsTwo) {
    const auto r = run({"workers", "--in", data("three_workers.jsonl"), "--config", data("min_pair_1.json"),
                        "--report-format", "csv"});
    EXPECT_EQ(r.code, cli::kFlagged);
    EXPECT_NE(r.out.find("A,0.000000,2,below_absolute|below_deviation,rework\n"), std::string::npos);
    EXPECT_NE(r.err.find("A -> rework"), std::string::npos);
}

TEST(Cli, WorkersCleanExitsZeroWithGoldens) {
    TempDir tmp;
    const auto r = run({"workers", "--in", data("clean_workers.jsonl"), "--heatmap", tmp.file("h.svg")});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    EXPECT_FALSE(json::parse(r.out)["any_flagged"].get<bool>());
    EXPECT_TRUE(matches_golden("cli_workers_clean.json", r.out));
    EXPECT_TRUE(matches_golden("cli_workers_clean.svg", testing::read_text(tmp.file("h.svg"))));
}

TEST(Cli, WorkersPerClassScopesAndGoldens) {
    TempDir tmp;
    const auto r = run({"workers", "--in", data("two_classes.csv"), "--min-units-per-pair", "5", "--heatmap",
                        tmp.file("h.svg")});
    ASSERT_NE(r.code, cli::kInputError) << r.err;
    const auto doc = json::parse(r.out);
    ASSERT_EQ(doc["scopes"].size(), 3u);
    EXPECT_TRUE(doc["scopes"][0]["matrix"]["doc_class"].is_null());
    EXPECT_EQ(doc["scopes"][1]["matrix"]["doc_class"], "invoice");
    EXPECT_EQ(r.code == cli::kFlagged, doc["any_flagged"].get<bool>());
    EXPECT_TRUE(matches_golden("cli_workers_two_classes.json", r.out));
    EXPECT_TRUE(matches_golden("cli_workers_two_classes.svg", testing::read_text(tmp.file("h.svg"))));
}

TEST(Cli, WorkersTextHeatmapAndNoColor) {
    TempDir tmp;
    const auto r = run({"workers", "--in", data("clean_workers.jsonl"), "--heatmap", tmp.file("h.txt")});
    ASSERT_EQ(r.code, cli::kSuccess);
    EXPECT_TRUE(matches_golden("cli_workers_clean.txt", testing::read_text(tmp.file("h.txt"))));

    ::setenv("NO_COLOR", "1", 1);
    const auto plain = run({"workers", "--in", data("clean_workers.jsonl"), "--show"});
    ::unsetenv("NO_COLOR");
    EXPECT_EQ(plain.err.find('\x1b'), std::string::npos);
    EXPECT_NE(plain.err.find("1.00"), std::string::npos);
    const auto colored = run({"workers", "--in", data("clean_workers.jsonl"), "--show"});
    EXPECT_NE(colored.err.find('\x1b'), std::string::npos);
}

TEST(Cli, ConfigPrecedence) {
    const auto from_file = json::parse(run({"metrics", "--in", data("two_classes.csv"), "--config",
                                            data("config_basic.json")})
                                           .out)["config_echo"];
    EXPECT_EQ(from_file["min_units_per_pair"], 5);
    EXPECT_EQ(from_file["min_abs_kappa"], 0.6);
    EXPECT_EQ(from_file["seed"], 3);
    EXPECT_EQ(from_file["deviation_delta"], 0.1);

    const auto flag_wins = json::parse(run({"metrics", "--in", data("two_classes.csv"), "--config",
                                            data("config_basic.json"), "--min-abs-kappa", "0.7", "--seed", "9"})
                                           .out)["config_echo"];
    EXPECT_EQ(flag_wins["min_abs_kappa"], 0.7);
    EXPECT_EQ(flag_wins["seed"], 9);
    EXPECT_EQ(flag_wins["min_units_per_pair"], 5);
}

TEST(Cli, InvalidConfigValues) {
    EXPECT_EQ(run({"metrics", "--in", data("two_classes.csv"), "--min-abs-kappa", "1.5"}).code, cli::kInputError);
    TempDir tmp;
    std::ofstream(tmp.file("c.json")) << R"({"tier_boundaries": {"easy": 0.5, "moderate": 0.8, "hard": 0.6}})";
    EXPECT_EQ(run({"metrics", "--in", data("two_classes.csv"), "--config", tmp.file("c.json")}).code,
              cli::kInputError);
    std::ofstream(tmp.file("d.json")) << R"({"unknown_key": 1})";
    EXPECT_EQ(run({"metrics", "--in", data("two_classes.csv"), "--config", tmp.file("d.json")}).code,
              cli::kInputError);
}

TEST(Cli, DifficultyGolden) {
    const auto r = run({"difficulty", "--in", data("two_classes.csv")});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["ranking_key"], "alpha");
    EXPECT_EQ(doc["entries"].size(), 2u);
    EXPECT_TRUE(matches_golden("cli_difficulty.json", r.out));
}

TEST(Cli, BaselineThenPilotForecast) {
    TempDir tmp;
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    const auto reg = tmp.file("registry.json");
    const auto b = run({"baseline", "--registry", reg, "--in", data("two_classes.csv")});
    ::unsetenv("SOURCE_DATE_EPOCH");
    ASSERT_EQ(b.code, cli::kSuccess) << b.err;
    EXPECT_EQ(b.out, testing::read_text(reg));
    EXPECT_TRUE(matches_golden("cli_registry.json", b.out));
    EXPECT_NE(b.out.find("2023-11-14T22:13:20Z"), std::string::npos);

    // Reading back leaves the file byte-identical.
    const auto show = run({"baseline", "--registry", reg});
    EXPECT_EQ(show.out, b.out);

    const auto f = run({"difficulty", "--registry", reg, "--pilot", data("pilot.jsonl")});
    ASSERT_NE(f.code, cli::kInputError) << f.err;
    const auto doc = json::parse(f.out);
    EXPECT_EQ(doc["pilot"]["nearest_baselines"].size(), 2u);
    const auto tier = doc["pilot"]["predicted_tier"].get<std::string>();
    EXPECT_EQ(f.code == cli::kFlagged, tier == "hard" || tier == "very_hard");
    EXPECT_TRUE(matches_golden("cli_pilot.json", f.out));
}

TEST(Cli, DifficultyUpdateWritesRegistry) {
    TempDir tmp;
    const auto reg = tmp.file("r.json");
    EXPECT_EQ(run({"difficulty", "--in", data("two_classes.csv"), "--update"}).code, cli::kInputError);
    const auto r = run({"difficulty", "--in", data("two_classes.csv"), "--registry", reg, "--update"});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    const auto doc = json::parse(testing::read_text(reg));
    EXPECT_EQ(doc["records"].size(), 2u);
}

TEST(Cli, PilotTooSmall) {
    TempDir tmp;
    std::ofstream(tmp.file("p.jsonl"))
        << R"({"doc_class":"p","doc_id":"d","item_id":"i","annotator_id":"A","label":"x"})" << "\n";
    const auto r = run({"difficulty", "--pilot", tmp.file("p.jsonl")});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("pilot"), std::string::npos);
}

TEST(Cli, SimulateRoundTripsThroughMetrics) {
    TempDir tmp;
    const auto a = run({"simulate", "--n-units", "50", "--error-rates", "0.1,0.2", "--seed", "4", "--out",
                        tmp.file("sim.csv")});
    ASSERT_EQ(a.code, cli::kSuccess) << a.err;
    const auto first = testing::read_text(tmp.file("sim.csv"));
    EXPECT_EQ(first.rfind("doc_class,doc_id,item_id,annotator_id,label\n", 0), 0u);
    const auto b = run({"simulate", "--n-units", "50", "--error-rates", "0.1,0.2", "--seed", "4", "--format", "csv"});
    EXPECT_EQ(b.out, first);
    EXPECT_EQ(run({"metrics", "--in", tmp.file("sim.csv")}).code, cli::kSuccess);

    std::ofstream(tmp.file("spec.json")) << R"({"n_units": 20, "worker_error_rates": [0, 0, 0], "doc_class": "s"})";
    const auto c = run({"simulate", "--spec", tmp.file("spec.json")});
    ASSERT_EQ(c.code, cli::kSuccess) << c.err;
    std::istringstream lines(c.out);
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line);) ++n;
    EXPECT_EQ(n, 60u);
    EXPECT_EQ(run({"simulate", "--error-rates", "0.1"}).code, cli::kInputError);
}

}  // namespace
}  // namespace iaa
