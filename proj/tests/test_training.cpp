#include <gtest/gtest.h>

#include <random>

#include "onn/training.hpp"

using namespace onn;

namespace {

SpinVector random_spins(std::size_t n, std::mt19937_64& gen) {
  SpinVector s;
  for (std::size_t k = 0; k < n; ++k) s.spins.push_back(gen() & 1 ? 1 : -1);
  return s;
}

double field(const RealMatrix& w, const SpinVector& s, std::size_t i) {
  double h = 0;
  for (std::size_t j = 0; j < w.n; ++j) h += w.at(i, j) * s.spins[j];
  return h;
}

}  // namespace

TEST(DO1, SinglePatternGivesHebbianMatrix) {
  std::mt19937_64 gen(1);
  const auto xi = random_spins(12, gen);
  const std::vector<SpinVector> pats{xi};
  const auto r = train_do1(pats);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.epochs, 2u);
  EXPECT_EQ(r.updates, 12u);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j)
      EXPECT_DOUBLE_EQ(r.weights.at(i, j), xi.spins[i] * xi.spins[j] / 12.0);
}

TEST(DO1, ConvergedMeansMarginHolds) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SpinVector> pats;
    for (int k = 0; k < 4; ++k) pats.push_back(random_spins(30, gen));
    const auto r = train_do1(pats);
    ASSERT_TRUE(r.converged);
    for (const auto& p : pats)
      for (std::size_t i = 0; i < 30; ++i) EXPECT_GE(p.spins[i] * field(r.weights, p, i), 1.0 - 1e-12);
  }
}

TEST(DO1, Errors) {
  EXPECT_THROW(train_do1({}), std::invalid_argument);
  std::vector<SpinVector> mixed{SpinVector{{1, -1}}, SpinVector{{1}}};
  EXPECT_THROW(train_do1(mixed), ShapeError);
}

TEST(DO1, EpochCapReportsNonConvergence) {
  // A margin of 10 needs at least 20 half-steps on the diagonal.
  std::vector<SpinVector> pats{SpinVector{{1, 1}}, SpinVector{{1, -1}}, SpinVector{{-1, 1}}};
  TrainingParams p;
  p.max_epochs = 5;
  p.stability_threshold = 10.0;
  const auto r = train_do1(pats, p);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.epochs, 5u);
}

TEST(Quantize, ScalesLargestEntryToTopCode) {
  RealMatrix w(2);
  w.at(0, 0) = 0.5;
  w.at(0, 1) = -1.0;
  w.at(1, 0) = 0.25;
  w.at(1, 1) = 0.0;
  const auto q = quantize_matrix(w, 5);
  EXPECT_DOUBLE_EQ(q.report.scale, 15.0);
  EXPECT_EQ(q.weights.at(0, 1).value, -15);
  EXPECT_EQ(q.weights.at(0, 0).value, 8);   // 7.5 rounds away from zero
  EXPECT_EQ(q.weights.at(1, 0).value, 4);   // 3.75
  EXPECT_FALSE(q.report.all_zero);
}

TEST(Quantize, AllZeroFlagged) {
  const auto q = quantize_matrix(RealMatrix(3), 5);
  EXPECT_TRUE(q.report.all_zero);
}

TEST(Quantize, TrainedPatternsStayFixedPoints) {
  std::mt19937_64 gen(4);
  std::vector<SpinVector> pats;
  for (int k = 0; k < 3; ++k) pats.push_back(random_spins(25, gen));
  const auto r = train_do1(pats);
  const auto q = quantize_matrix(r.weights, 5, pats);
  EXPECT_TRUE(q.report.unstable_patterns.empty());
  for (const auto& p : pats) {
    EXPECT_TRUE(is_fixed_point(q.weights, p));
    EXPECT_TRUE(is_fixed_point(q.weights, p.negated()));
  }
}

TEST(FixedPoint, ZeroFieldCounts) {
  EXPECT_TRUE(is_fixed_point(WeightMatrix(3, 5), SpinVector{{1, -1, 1}}));
  const std::vector<std::int32_t> v{0, -1, -1, 0};
  EXPECT_FALSE(is_fixed_point(WeightMatrix(2, 5, v), SpinVector{{1, 1}}));
}
