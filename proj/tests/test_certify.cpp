#include <random>

#include <gtest/gtest.h>

#include "consensus/certify.hpp"
#include "consensus/random.hpp"
#include "oracles.hpp"

using namespace consensus;

TEST(Classify, IdentityAndAveraging) {
  const auto id = classify(validate_stochastic(Matrix::identity(3)));
  EXPECT_TRUE(id.doubly_stochastic);
  EXPECT_FALSE(id.scrambling);
  EXPECT_TRUE(id.positive_diagonal);
  EXPECT_FALSE(id.positive_column);
  EXPECT_FALSE(id.rooted);
  const auto avg = classify(validate_stochastic(Matrix(3, 3, 1.0 / 3.0)));
  EXPECT_TRUE(avg.scrambling);
  EXPECT_TRUE(avg.positive_column);
  EXPECT_TRUE(avg.rooted);
}

TEST(Classify, CounterexampleIsScramblingWithoutPositiveColumn) {
  const auto r = classify(validate_stochastic(counterexample_matrix()));
  EXPECT_TRUE(r.scrambling);
  EXPECT_FALSE(r.positive_column);
  EXPECT_FALSE(r.doubly_stochastic);
  EXPECT_THROW(classify(validate_stochastic(Matrix{{0.5, 0.5}})), validation_error);
}

TEST(Classify, RootedPath) {
  // 0 -> 1 -> 2 -> 2: vertex 0 reaches every vertex.
  EXPECT_TRUE(rooted(pattern(Matrix{{0, 1, 0}, {0, 0, 1}, {0, 0, 1}})));
  EXPECT_FALSE(rooted(pattern(Matrix{{1, 0, 0}, {0, 1, 0}, {0, 1, 0}})));
}

TEST(Certify, CounterexampleInducedIsContractive) {
  const auto cert = certify_induced_inf(EqualRowSumMatrix::make(counterexample_matrix()));
  EXPECT_TRUE(cert.contractive);
  EXPECT_NEAR(cert.value, 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(verify(cert, counterexample_matrix()));
}

TEST(Certify, CounterexampleMetricIsNotContractive) {
  const auto cert = certify_metric_inf(validate_stochastic(counterexample_matrix()));
  EXPECT_FALSE(cert.contractive);
  EXPECT_NEAR(cert.value, 1.0, 1e-9);
  ASSERT_TRUE(std::holds_alternative<FarkasWitness>(cert.witness));
  const Vector& x = std::get<FarkasWitness>(cert.witness).x;
  const Vector expected = counterexample_farkas();
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(x[i], expected[i], 1e-9);
  EXPECT_TRUE(verify(cert, counterexample_matrix()));
}

TEST(Certify, PositiveMatrixHasFeasibleWitness) {
  const Matrix m{{0.4, 0.3, 0.3}, {0.2, 0.5, 0.3}, {0.1, 0.1, 0.8}};
  const auto cert = certify_metric_inf(validate_stochastic(m));
  EXPECT_TRUE(cert.contractive);
  ASSERT_TRUE(std::holds_alternative<FeasibleVectorWitness>(cert.witness));
  EXPECT_TRUE(verify(cert, m));
}

TEST(Certify, TamperedCertificatesFailVerification) {
  auto cert = certify_metric_inf(validate_stochastic(counterexample_matrix()));
  cert.witness = FarkasWitness{Vector{1, 0, 0, 0, 0, 0}};
  EXPECT_FALSE(verify(cert, counterexample_matrix()));
  cert.witness = std::monostate{};
  EXPECT_FALSE(verify(cert, counterexample_matrix()));
  auto ind = certify_induced_inf(EqualRowSumMatrix::make(counterexample_matrix()));
  ind.value = 0.5;
  ind.contractive = true;
  EXPECT_FALSE(verify(ind, counterexample_matrix()));
}

TEST(Certify, IdentityIsNotContractive) {
  const auto cert = certify_metric_inf(validate_stochastic(Matrix::identity(4)));
  EXPECT_FALSE(cert.contractive);
  EXPECT_TRUE(verify(cert, Matrix::identity(4)));
  EXPECT_FALSE(certify_induced_inf(EqualRowSumMatrix::make(Matrix::identity(4))).contractive);
}

TEST(Certify, VerdictAgreesWithSeminormOnRandomMatrices) {
  random::Engine gen(41);
  int contractive = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto s = validate_stochastic(random::stochastic(n, n, gen, 0.4));
    const auto cert = certify_metric_inf(s);  // throws on disagreement
    contractive += cert.contractive;
    EXPECT_TRUE(verify(cert, s.matrix()));
  }
  EXPECT_GT(contractive, 10);
  EXPECT_LT(contractive, 150);
}

TEST(Certify, ScramblingIffErgodicityBelowOne) {
  random::Engine gen(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const auto s = validate_stochastic(random::stochastic(n, n, gen, 0.55));
    EXPECT_EQ(oracle::ergodicity(s.matrix()) < 1.0 - 1e-12, scrambling(pattern(s.matrix())));
  }
}

TEST(Counterexample, AllStepsPass) {
  const auto rep = verify_counterexample();
  EXPECT_TRUE(rep.passed());
  ASSERT_EQ(rep.steps.size(), 5u);
  EXPECT_NEAR(*rep.tau, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(*rep.metric_inf, 1.0, 1e-9);
  EXPECT_FALSE(*rep.strictly_feasible);
}

TEST(Counterexample, PerturbationBreaksInfeasibility) {
  const auto rep = verify_counterexample({0.01, 1.0});
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.failed_step, 4);
  EXPECT_TRUE(*rep.strictly_feasible);
  EXPECT_FALSE(rep.witness_y.empty());
}

TEST(Counterexample, ThresholdBelowTauFailsStepThree) {
  const auto rep = verify_counterexample({0.0, 0.5});
  EXPECT_EQ(rep.failed_step, 3);
  EXPECT_EQ(rep.steps.size(), 3u);
}
