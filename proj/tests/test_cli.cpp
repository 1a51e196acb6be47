#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(CONSENSUS_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(CONSENSUS_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "consensus_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, CounterexamplePasses) {
  const auto r = cli("counterexample");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: PASS"), std::string::npos);
  const auto j = cli("counterexample --json");
  EXPECT_EQ(j.code, 0);
  const auto doc = json::parse(j.out);
  EXPECT_EQ(doc["farkas_x"], json({0.0, 1.0, 1.0, 1.0, 1.0, 0.0}));
}

TEST(Cli, CounterexampleFailureModes) {
  const auto perturbed = cli("counterexample --perturb 0.01 --json");
  EXPECT_EQ(perturbed.code, 5);
  EXPECT_EQ(json::parse(perturbed.out)["failed_step"], 4);
  EXPECT_EQ(cli("counterexample --tau-threshold 0.5").code, 5);
}

TEST(Cli, SeminormValues) {
  auto r = cli("seminorm --input " + data("counterexample.csv") + " --kind coe");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 2.0 / 3.0, 1e-15);
  r = cli("seminorm --input " + data("counterexample.json") + " --kind metric --p inf");
  ASSERT_EQ(r.code, 0);
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(doc["value"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(doc["method"], "lp");
  r = cli("seminorm --input " + data("identity.csv") + " --kind induced --p 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 1.0, 1e-12);
  r = cli("seminorm --input " + data("consensus.csv") + " --kind metric --p 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["value"].get<double>(), 0.0);
}

TEST(Cli, InducedOneNeedsTrials) {
  EXPECT_EQ(cli("seminorm --input " + data("identity.csv") + " --kind induced --p 1").code, 2);
  const auto r = cli("seminorm --input " + data("identity.csv") + " --kind induced --p 1 --trials 100 --seed 3");
  ASSERT_EQ(r.code, 0);
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["method"], "sampling_lower_bound");
  EXPECT_EQ(doc["seed"], 3);
}

TEST(Cli, CertifyExitCodes) {
  auto r = cli("certify --input " + data("counterexample.csv") + " --seminorm metric-inf");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.out)["witnesses"][0]["type"], "farkas");
  r = cli("certify --input " + data("counterexample.csv") + " --seminorm induced-inf");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["witnesses"][0]["type"], "sign_vector");
  r = cli("certify --input " + data("ensemble/a.csv") + " --seminorm metric-inf");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["witnesses"][0]["type"], "feasible_vector");
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(cli("certify --input " + data("not_stochastic.csv") + " --seminorm metric-inf").code, 2);
  EXPECT_EQ(cli("classify --input " + data("not_stochastic.csv")).code, 2);
  EXPECT_EQ(cli("seminorm --input /nonexistent.csv --kind coe").code, 2);
  EXPECT_EQ(cli("seminorm --input " + data("identity.csv") + " --kind bogus").code, 2);
  EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, Classify) {
  const auto r = cli("classify --input " + data("counterexample.csv"));
  ASSERT_EQ(r.code, 0);
  const auto doc = json::parse(r.out);
  EXPECT_TRUE(doc["scrambling"].get<bool>());
  EXPECT_FALSE(doc["positive_column"].get<bool>());
}

TEST(Cli, SimulateWritesTraceAndSummary) {
  const auto trace = scratch("trace.csv");
  const auto summary = scratch("summary.json");
  fs::remove(trace);
  fs::remove(summary);
  const auto r = cli("simulate --ensemble " + data("ensemble") + " --schedule random --seed 4 --steps 40 --d 1,2,3,4 --out " +
                     trace.string() + " --summary " + summary.string());
  ASSERT_EQ(r.code, 0);
  ASSERT_TRUE(fs::exists(trace));
  ASSERT_TRUE(fs::exists(summary));
  const auto doc = json::parse(r.out);
  EXPECT_TRUE(doc["certified"].get<bool>());
  EXPECT_LT(doc["lambda"].get<double>(), 1.0);
  std::FILE* f = std::fopen(trace.string().c_str(), "r");
  ASSERT_NE(f, nullptr);
  int lines = 0;
  for (int c; (c = std::fgetc(f)) != EOF;) lines += c == '\n';
  std::fclose(f);
  EXPECT_EQ(lines, 41);
}

TEST(Cli, SimulateRefusesNonContractive) {
  const auto trace = scratch("refused.csv");
  fs::remove(trace);
  auto r = cli("simulate --ensemble " + data("identity.csv") + " --out " + trace.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(trace));
  r = cli("simulate --ensemble " + data("identity.csv") + " --force --steps 5 --out " + trace.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(fs::exists(trace));
}

TEST(Cli, SimulateValidatesEnsemble) {
  EXPECT_EQ(cli("simulate --ensemble " + data("identity.csv") + " " + data("averaging.csv")).code, 2);
  EXPECT_EQ(cli("simulate --ensemble " + data("ensemble") + " --d 1,2").code, 2);
}

TEST(Cli, Equivalence) {
  const auto r = cli("equivalence --n 4 --samples 300 --seed 2");
  ASSERT_EQ(r.code, 0);
  const auto doc = json::parse(r.out);
  EXPECT_LE(doc["c_m_hat"].get<double>(), doc["c_M_hat"].get<double>());
  EXPECT_EQ(doc["accepted"].get<int>() + doc["rejected"].get<int>(), 300);
}
