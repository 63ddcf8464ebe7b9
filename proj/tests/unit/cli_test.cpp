#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace opplab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kSqrt2 = "[1,-1,-1.4142135623730951]";
const std::string kGolden = "[1,-1,-1.618033988749895]";

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("opplab_cli_test_" + name);
}

TEST(Config, CanonicalRoundTrip) {
  for (const std::string& command : kCommands) {
    json j{{"command", command}, {"form", json::parse(kSqrt2)}};
    const ExperimentConfig c = parse_config(j);
    const std::string text = canonical_json(c);
    const ExperimentConfig again = parse_config(json::parse(text));
    EXPECT_EQ(again, c) << command;
    EXPECT_EQ(canonical_json(again), text) << command;
  }
}

TEST(Config, RejectsBadInput) {
  EXPECT_ANY_THROW(parse_config(json{{"command", "nope"}}));
  EXPECT_ANY_THROW(parse_config(json{{"command", "count"}, {"form", "sqf"}, {"bogus", 1}}));
  EXPECT_ANY_THROW(parse_config(json{{"command", "count"}}));
  EXPECT_ANY_THROW(parse_config(json{{"command", "equidist"}, {"form", "sqf"}, {"samples", 0}}));
  EXPECT_ANY_THROW(parse_config(json{{"command", "cq"}, {"form", "sqf"}, {"samples", 1.5}}));
}

TEST(Cli, DumpConfigMatchesFlags) {
  const CliRun r = run({"count", "--form", "sqf", "--T", "10,20", "--seed", "4", "--dump-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("T"), json::parse("[10.0,20.0]"));
  EXPECT_EQ(j.at("seed"), 4);
  EXPECT_EQ(j.at("form").at("m13"), -1.0);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path path = temp_file("config.json");
  std::ofstream(path) << R"({"command": "cq", "form": [1, 1, -1], "samples": 20000, "seed": 9})";
  const CliRun a = run({"cq", "--config", path.string(), "--seed", "10", "--dump-config"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(json::parse(a.out).at("seed"), 10);
  EXPECT_EQ(json::parse(a.out).at("samples"), 20000);
  fs::remove(path);
}

TEST(Cli, MalformedJsonExitsOne) {
  const fs::path path = temp_file("bad.json");
  std::ofstream(path) << "{\"command\": \"cq\", ";
  const CliRun r = run({"cq", "--config", path.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("parse"), std::string::npos) << r.err;
  fs::remove(path);
  EXPECT_EQ(run({"cq", "--form", "{\"m11\": }"}).code, 1);
  EXPECT_EQ(run({"cq", "--config", "/nonexistent/x.json"}).code, 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"cq", "--form", "sqf", "--unknown", "1"}).code, 1);
  EXPECT_EQ(run({"cq", "--form", "sqf", "--samples", "abc"}).code, 1);
  EXPECT_EQ(run({"cq", "--help"}).code, 0);
}

TEST(Cli, DichotomyRationalBranch) {
  const CliRun r = run({"dichotomy", "--form", "[1,-1,-1]", "--R", "2", "--T", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("branch"), "rational_approx");
  EXPECT_EQ(j.at("rational_approx").at("dist"), 0.0);
  EXPECT_EQ(j.at("thresholds").at("a_exp"), 4.0);
}

TEST(Cli, DichotomySqrt2SmallValues) {
  const CliRun r = run({"dichotomy", "--form", kSqrt2, "--R", "10", "--T", "1e4", "--a-exp", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("branch"), "small_values");
  EXPECT_EQ(j.at("small_values").at("witnessed_fraction"), 1.0);
}

TEST(Cli, DichotomyAnomalyExitsTwo) {
  const CliRun r = run({"dichotomy", "--form", kSqrt2, "--R", "10", "--T", "2000", "--a-exp", "0.01",
                        "--grid", "1", "--eps", "1e-9", "--coverage-floor", "0.9"});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_TRUE(json::parse(r.out).at("anomaly").get<bool>());
}

TEST(Cli, CountDegenerateWindow) {
  const CliRun r = run({"count", "--form", "sqf", "--a", "1", "--b", "1", "--T", "10", "--samples",
                     "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "a,b,T,count,C_Q,C_Q_stderr,main_term,ratio,degenerate");
  EXPECT_EQ(row.substr(row.rfind(',') + 1), "1");
  EXPECT_NE(row.find(",0,nan,1"), std::string::npos) << row;
}

TEST(Cli, EquidistRejectsZeroSamples) {
  const CliRun r = run({"equidist", "--form", kSqrt2, "--samples", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("N >= 10"), std::string::npos) << r.err;
}

TEST(Cli, HeadersAreFixed) {
  auto header = [](const CliRun& r) { return r.out.substr(0, r.out.find('\n')); };
  EXPECT_EQ(header(run({"witness", "--form", "sqf", "--T", "5", "--s-min", "0", "--s-max", "0"})),
            "s,v1,v2,v3,value,gap,norm");
  EXPECT_EQ(header(run({"equidist", "--form", kSqrt2, "--T", "5", "--samples", "10"})),
            "T,N,empirical,haar,deviation,min_inj");
  EXPECT_EQ(header(run({"projection", "--points", "20", "--r-grid", "3"})),
            "r,exceptional_fraction,max_count,energy_median,energy_p95");
  EXPECT_EQ(header(run({"margulis", "--points", "20", "--samples", "2"})),
            "r,exceptional_fraction,max_count,energy_median,energy_p95");
}

TEST(Cli, OutFile) {
  const fs::path path = temp_file("out.csv");
  const CliRun r = run({"cq", "--form", "sqf", "--samples", "20000", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "C_Q,C_Q_stderr,delta,samples,seed");
  fs::remove(path);
  EXPECT_EQ(run({"cq", "--form", "sqf", "--samples", "20000", "--out", "/nonexistent/dir/x"}).code,
            1);
}

struct GoldenCase {
  std::string name;
  std::vector<std::string> args;
};

std::vector<GoldenCase> golden_cases() {
  return {
      {"dichotomy", {"dichotomy", "--form", kSqrt2, "--R", "4", "--T", "1000", "--a-exp", "0.25"}},
      {"witness",
       {"witness", "--form", kSqrt2, "--T", "200", "--s-min", "-1", "--s-max", "1", "--grid", "0.5"}},
      {"count", {"count", "--form", "sqf", "--T", "20,40", "--samples", "20000", "--seed", "3"}},
      {"cq", {"cq", "--form", "sqf", "--samples", "20000", "--seed", "5"}},
      {"rational", {"rational", "--form", kGolden, "--R", "1,2,3"}},
      {"equidist", {"equidist", "--form", kSqrt2, "--T", "5,10", "--samples", "20", "--seed", "2"}},
      {"projection", {"projection", "--points", "100", "--r-grid", "11", "--seed", "4"}},
      {"margulis", {"margulis", "--points", "60", "--samples", "4", "--seed", "6"}},
  };
}

TEST(Golden, PinnedSeedOutputs) {
  for (const GoldenCase& g : golden_cases()) {
    const CliRun r = run(g.args);
    ASSERT_EQ(r.code, 0) << g.name << ": " << r.err;
    const fs::path path = fs::path(OPPLAB_GOLDEN_DIR) / (g.name + ".txt");
    if (!fs::exists(path)) {
      std::ofstream(path, std::ios::binary) << r.out;
      continue;
    }
    std::ifstream in(path, std::ios::binary);
    std::stringstream expected;
    expected << in.rdbuf();
    EXPECT_EQ(r.out, expected.str()) << g.name;
  }
}

TEST(Determinism, ByteIdenticalReruns) {
  for (const GoldenCase& g : golden_cases()) {
    EXPECT_EQ(run(g.args).out, run(g.args).out) << g.name;
  }
}

}  // namespace
}  // namespace opplab::cli
