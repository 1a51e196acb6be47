#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "consensus/certify.hpp"
#include "consensus/io.hpp"
#include "consensus/random.hpp"
#include "consensus/report.hpp"

using namespace consensus;

namespace {
const std::filesystem::path kData = CONSENSUS_DATA_DIR;
}

TEST(ParseNumber, DecimalsAndRationals) {
  EXPECT_EQ(io::parse_number("0.25"), 0.25);
  EXPECT_EQ(io::parse_number(" -3e2 "), -300.0);
  EXPECT_EQ(io::parse_number("+1"), 1.0);
  EXPECT_EQ(io::parse_number("1/3"), 1.0 / 3.0);
  EXPECT_EQ(io::parse_number(" 2 / 8 "), 0.25);
  EXPECT_THROW(io::parse_number("1/0"), parse_error);
  EXPECT_THROW(io::parse_number("abc"), parse_error);
  EXPECT_THROW(io::parse_number(""), parse_error);
  EXPECT_THROW(io::parse_number("1/2/3"), parse_error);
}

TEST(ParseCsv, SkipsCommentsAndBlankLines) {
  const Matrix m = io::parse_csv("# header\n\n1, 2\n3,4\n\n");
  EXPECT_EQ(m, (Matrix{{1, 2}, {3, 4}}));
}

TEST(ParseCsv, ErrorsNameTheLocation) {
  try {
    io::parse_csv("1,2\n3,x\n");
    FAIL();
  } catch (const parse_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 1"), std::string::npos);
    EXPECT_NE(msg.find("column 1"), std::string::npos);
  }
  EXPECT_THROW(io::parse_csv("1,2\n3\n"), parse_error);
  EXPECT_THROW(io::parse_csv("# only a comment\n"), parse_error);
  EXPECT_THROW(io::parse_csv("nan,1\n"), parse_error);
}

TEST(ParseJson, Shapes) {
  EXPECT_EQ(io::parse_json(R"({"rows": [[1, "1/2"], [0, 0.5]]})"), (Matrix{{1, 0.5}, {0, 0.5}}));
  EXPECT_THROW(io::parse_json("[1,2]"), parse_error);
  EXPECT_THROW(io::parse_json(R"({"rows": [[1], [1, 2]]})"), parse_error);
  EXPECT_THROW(io::parse_json(R"({"rows": [[true]]})"), parse_error);
  EXPECT_THROW(io::parse_json("{"), parse_error);
  EXPECT_THROW(io::parse_json(R"({"rows": []})"), parse_error);
}

TEST(DataFiles, CounterexampleInBothFormats) {
  const Matrix csv = io::load_matrix(kData / "counterexample.csv");
  const Matrix json = io::load_matrix(kData / "counterexample.json");
  EXPECT_EQ(csv, counterexample_matrix());
  EXPECT_EQ(json, counterexample_matrix());
  EXPECT_THROW(io::load_matrix(kData / "missing.csv"), parse_error);
}

TEST(RoundTrip, CsvAndJsonPreserveValues) {
  random::Engine gen(61);
  std::normal_distribution<double> normal(0, 1e3);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(1 + trial % 7, 1 + (trial / 7) % 7);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (double& v : m.row(i)) v = normal(gen);
    const Matrix back = io::parse_csv(io::to_csv(m));
    EXPECT_LE((back - m).max_abs(), 1e-15 * std::max(1.0, m.max_abs()));
    EXPECT_EQ(io::parse_json(io::to_json(m).dump()), m);
  }
}

TEST(Report, CertificationSchema) {
  const auto s = validate_stochastic(counterexample_matrix());
  const auto doc = report::certification(report::to_json(classify(s)), certify_metric_inf(s));
  EXPECT_TRUE(doc["class"]["scrambling"].get<bool>());
  EXPECT_EQ(doc["certificates"][0]["seminorm"], "metric-inf");
  EXPECT_EQ(doc["certificates"][0]["method"], "lp");
  EXPECT_FALSE(doc["certificates"][0]["contractive"].get<bool>());
  EXPECT_EQ(doc["witnesses"][0]["type"], "farkas");
  EXPECT_EQ(doc["witnesses"][0]["x"].size(), 6u);
}

TEST(Report, CounterexampleSchema) {
  const auto doc = report::to_json(verify_counterexample());
  EXPECT_EQ(doc["verdict"], "pass");
  EXPECT_TRUE(doc["failed_step"].is_null());
  EXPECT_EQ(doc["steps"].size(), 5u);
  EXPECT_EQ(doc["farkas_x"], nlohmann::json({0.0, 1.0, 1.0, 1.0, 1.0, 0.0}));
}
