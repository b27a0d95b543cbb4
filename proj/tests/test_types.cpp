#include <gtest/gtest.h>

#include <cmath>

#include "onn/types.hpp"

using namespace onn;

namespace {

// Round half away from zero, written without std::round.
std::int32_t round_oracle(double x) {
  const double mag = std::floor(std::abs(x) + 0.5);
  return static_cast<std::int32_t>(x < 0 ? -mag : mag);
}

}  // namespace

TEST(Types, PeriodAndStep) {
  EXPECT_EQ(period_clocks(1), 2u);
  EXPECT_EQ(period_clocks(4), 16u);
  EXPECT_EQ(period_clocks(12), 4096u);
  EXPECT_DOUBLE_EQ(phase_step_degrees(4), 22.5);
  EXPECT_DOUBLE_EQ(phase_step_degrees(2), 90.0);
}

TEST(Types, ValidateConfigRejectsOutOfRange) {
  NetworkConfig c;
  c.n_oscillators = 0;
  try {
    validate_config(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("N >= 1"), std::string::npos);
  }
  c = {};
  c.weight_bits = 1;
  EXPECT_THROW(validate_config(c), ConfigError);
  c = {};
  c.phase_bits = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
  c = {};
  c.phase_bits = kMaxPhaseBits + 1;
  EXPECT_THROW(validate_config(c), ConfigError);
  c = {};
  c.logic_frequency_hz = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
  EXPECT_NO_THROW(validate_config(NetworkConfig{}));
}

TEST(Types, DefaultHybridSamplingIsAligned) {
  EXPECT_EQ(NetworkConfig{}.hybrid_sampling, HybridSampling::Aligned);
}

TEST(Types, QuantizeMatchesOracle) {
  EXPECT_EQ(quantize_weight(-2.5, 5).value, -3);
  EXPECT_EQ(quantize_weight(2.5, 5).value, 3);
  EXPECT_EQ(quantize_weight(100.0, 5).value, 15);
  EXPECT_EQ(quantize_weight(-100.0, 5).value, -15);
  for (double x = -15.0; x <= 15.0; x += 0.125) EXPECT_EQ(quantize_weight(x, 5).value, round_oracle(x)) << x;
}

TEST(Types, FixedWeightChecked) {
  EXPECT_EQ(FixedWeight::checked(-15, 5).value, -15);
  EXPECT_THROW(FixedWeight::checked(16, 5), std::exception);
  EXPECT_THROW(FixedWeight::checked(-16, 5), std::exception);
}

TEST(Types, PhaseIndexWraps) {
  EXPECT_EQ(PhaseIndex(-1, 4).index(), 15u);
  EXPECT_EQ(PhaseIndex(16, 4).index(), 0u);
  EXPECT_EQ(PhaseIndex(37, 4).index(), 5u);
}

TEST(Types, WeightMatrixShape) {
  const std::vector<std::int32_t> v{1, -2, 3, -4};
  WeightMatrix w(2, 5, v);
  EXPECT_EQ(w.at(0, 1).value, -2);
  EXPECT_EQ(w.row(1)[0].value, 3);
  EXPECT_THROW(WeightMatrix(3, 5, v), ShapeError);
}

TEST(Types, PatternAndSpins) {
  BinaryPattern p(2, 2, {1, 0, 0, 1});
  EXPECT_EQ(p.at(1, 0), 0);
  EXPECT_EQ(p.complement().pixels, (std::vector<std::uint8_t>{0, 1, 1, 0}));
  const auto s = SpinVector::from_pattern(p);
  EXPECT_EQ(s.spins, (std::vector<std::int8_t>{1, -1, -1, 1}));
  EXPECT_EQ(s.negated().spins, (std::vector<std::int8_t>{-1, 1, 1, -1}));
  EXPECT_THROW(BinaryPattern(2, 2, {1, 0, 1}), ShapeError);
  EXPECT_THROW(BinaryPattern(1, 1, {2}), ShapeError);
}
