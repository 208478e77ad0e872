#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lanchor/checks.hpp"

namespace {

struct CliRun {
  int code;
  std::string out;
};

// Runs the CLI from the source tree so that model paths in reports are
// relative and stable.
CliRun run(const std::string& args, const std::string& env = "") {
  std::string cmd = "cd " LANCHOR_TEST_DATA "/../.. && " + env + " " LANCHOR_CLI " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, OscillatorSuitePasses) {
  CliRun r = run("check tests/data/oscillator.model");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0 failed"), std::string::npos);
}

TEST(Cli, GoldenReports) {
  EXPECT_EQ(run("check tests/data/oscillator.model --json").out, slurp(LANCHOR_TEST_DATA "/oscillator.json"));
  CliRun bad = run("check tests/data/oscillator_bad.model --json");
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.out, slurp(LANCHOR_TEST_DATA "/oscillator_bad.json"));
  EXPECT_EQ(run("catalog pform --json").out, slurp(LANCHOR_TEST_DATA "/maxwell.json"));
}

TEST(Cli, ReportShape) {
  auto j = nlohmann::json::parse(run("check tests/data/oscillator.model --json --timing --seed 9").out);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["model"], "tests/data/oscillator.model");
  ASSERT_TRUE(j["checks"].is_array());
  std::vector<std::string> names;
  for (const auto& c : j["checks"]) {
    names.push_back(c["name"]);
    EXPECT_TRUE(c["ms"].is_number());
    EXPECT_TRUE(c.contains("residual"));
  }
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
}

TEST(Cli, DeterministicAcrossRunsAndJobs) {
  std::string a = run("check tests/data/hamiltonian.model --json --seed 3").out;
  EXPECT_EQ(a, run("check tests/data/hamiltonian.model --json --seed 3").out);
  EXPECT_EQ(a, run("check tests/data/hamiltonian.model --json --seed 3 --jobs 4").out);
  std::string c = run("catalog chiral --json").out;
  EXPECT_EQ(c, run("catalog chiral --json --jobs 3").out);
}

TEST(Cli, Selection) {
  CliRun r = run("check tests/data/oscillator.model --only characteristic,anchor --json");
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["name"], "anchor");
  EXPECT_EQ(j["checks"][1]["name"], "characteristic:f");
  EXPECT_EQ(run("check tests/data/oscillator.model --only symmetry:w").code, 0);
  EXPECT_EQ(run("check tests/data/oscillator.model --only nosuchcheck").code, 2);
}

TEST(Cli, UsageAndInputErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("check /nonexistent.model").code, 2);
  EXPECT_EQ(run("catalog pform --signature minkowski").code, 2);
  EXPECT_EQ(run("catalog selfdual --n 4").code, 2);
  EXPECT_EQ(run("search tests/data/oscillator.model --degree 99").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ResourceCapBecomesErrorRecord) {
  CliRun r = run("catalog pform --only pform.energy_momentum --json", "LANCHOR_MAX_NODES=40");
  EXPECT_EQ(r.code, 2);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["checks"][0]["status"], "ERROR");
}

TEST(Cli, ConventionSheet) {
  CliRun r = run("--convention");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(LANCHOR_TEST_DATA "/../../docs/CONVENTIONS.md"));
  EXPECT_EQ(r.out, std::string(lanchor::convention_sheet()));
}

TEST(Cli, ZeroCouplingMatchesAbelianReference) {
  auto g0 = nlohmann::json::parse(run("catalog chiral -g 0 --json").out);
  auto ab = nlohmann::json::parse(run("catalog chiral-abelian --json").out);
  EXPECT_EQ(g0["checks"].dump(), ab["checks"].dump());
  EXPECT_EQ(run("catalog chiral -g 0").code, 0);
}

TEST(Cli, OracleCommand) {
  CliRun r = run("oracle tests/data/oscillator_bad.model --json --t-end 10 --step 0.01");
  EXPECT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["checks"][0]["status"], "SKIP");
  CliRun ok = run("oracle tests/data/oscillator.model");
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("drift:f"), std::string::npos);
}

TEST(Cli, SearchCommand) {
  CliRun r = run("search tests/data/oscillator.model --degree 2 --json");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["basis"].size(), 1u);
  EXPECT_EQ(j["basis"][0], "x1^2 + x2^2");
}

TEST(Cli, CatalogModelsPass) {
  EXPECT_EQ(run("catalog pform").code, 0);
  EXPECT_EQ(run("catalog pform --n 2 --p 1 --signature euclidean").code, 0);
  EXPECT_EQ(run("catalog pform -a 2 -b 3").code, 0);
  EXPECT_EQ(run("catalog selfdual").code, 0);
  EXPECT_EQ(run("catalog chiral").code, 0);
  EXPECT_EQ(run("catalog chiral --eps 1,0,-1/2 -g 3").code, 0);
}

}  // namespace
