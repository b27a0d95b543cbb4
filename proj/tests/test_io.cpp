#include <gtest/gtest.h>

#include <random>

#include "onn/io.hpp"
#include "support.hpp"

using namespace onn;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("onn_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(PatternText, ParseAndFormat) {
  const auto p = parse_pattern("# comment\n010\n111\n");
  EXPECT_EQ(p.width, 3u);
  EXPECT_EQ(p.height, 2u);
  EXPECT_EQ(format_pattern(p), "010\n111\n");
  EXPECT_EQ(parse_pattern(format_pattern(p)), p);
}

TEST(PatternText, Errors) {
  EXPECT_THROW(parse_pattern("01\n0\n"), ParseError);
  EXPECT_THROW(parse_pattern("0a\n"), ParseError);
  EXPECT_THROW(parse_pattern(""), ParseError);
  EXPECT_THROW(parse_pattern("01\n\n10\n"), ParseError);
  EXPECT_EQ(parse_patterns("01\n\n10\n").size(), 2u);
}

TEST(PatternText, RandomRoundTrip) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t w = 1 + gen() % 12, h = 1 + gen() % 12;
    BinaryPattern p(w, h);
    for (auto& px : p.pixels) px = gen() & 1;
    ASSERT_EQ(parse_pattern(format_pattern(p)), p);
  }
}

TEST(Dataset, BuiltInLetters) {
  const std::pair<const char*, std::size_t> sizes[] = {{"3x3", 9}, {"5x4", 20}, {"7x6", 42}, {"10x10", 100},
                                                       {"22x22", 484}};
  for (const auto& [name, n] : sizes) {
    const auto ds = read_dataset(fs::path(ONN_DATA_DIR) / "letters" / name);
    EXPECT_EQ(ds.name, name);
    EXPECT_EQ(ds.width() * ds.height(), n);
    EXPECT_GE(ds.patterns.size(), 2u);
  }
  const auto ds = read_dataset(fs::path(ONN_DATA_DIR) / "letters" / "5x4");
  EXPECT_EQ(ds.height(), 5u);
  EXPECT_EQ(ds.width(), 4u);
}

TEST(Dataset, EmptyAndMixed) {
  const auto empty = temp_dir("empty");
  EXPECT_THROW(read_dataset(empty), ParseError);
  const auto mixed = temp_dir("mixed");
  write_file(mixed / "a.txt", "01\n10\n");
  write_file(mixed / "b.txt", "011\n101\n");
  EXPECT_THROW(read_dataset(mixed), std::exception);
  EXPECT_THROW(read_dataset(temp_dir("missing") / "nope"), std::exception);
}

TEST(WeightsCsv, RoundTrip) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 20; ++t) {
    const auto w = onn::testing::random_weights(1 + gen() % 20, 5, gen);
    const auto back = parse_weights_csv(format_weights_csv(w), 5);
    ASSERT_EQ(back.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = 0; j < w.size(); ++j) ASSERT_EQ(back.at(i, j).value, w.at(i, j).value);
  }
}

TEST(WeightsCsv, Errors) {
  EXPECT_THROW(parse_weights_csv("", 5), ParseError);
  EXPECT_THROW(parse_weights_csv("1,2\n3\n", 5), ParseError);
  EXPECT_THROW(parse_weights_csv("1,2,3\n4,5,6\n", 5), ParseError);
  EXPECT_THROW(parse_weights_csv("1,x\n3,4\n", 5), ParseError);
  EXPECT_THROW(parse_weights_csv("16\n", 5), std::exception);
}

TEST(SettingsText, RoundTrip) {
  Settings s;
  s.network.architecture = Architecture::Recurrent;
  s.network.hybrid_sampling = HybridSampling::Pipelined;
  s.network.phase_bits = 6;
  s.network.logic_frequency_hz = 40e6;
  s.settle.max_periods = 77;
  s.training.stability_threshold = 0.3;
  s.seed = 123456789012345ull;
  s.trials = 17;
  s.levels = {0.05, 0.333};
  EXPECT_EQ(parse_settings(format_settings(s)), s);
  EXPECT_EQ(parse_settings(format_settings(Settings{})), Settings{});
}

TEST(SettingsText, Errors) {
  EXPECT_THROW(parse_settings("colour = red\n"), ParseError);
  EXPECT_THROW(parse_settings("architecture = quantum\n"), ParseError);
  EXPECT_THROW(parse_settings("trials\n"), ParseError);
  EXPECT_THROW(parse_settings("trials = -3\n"), ParseError);
  EXPECT_THROW(parse_settings("levels = 0.1,2\n"), ParseError);
  EXPECT_EQ(parse_settings("# c\n\ntrials = 5\n").trials, 5u);
}

TEST(TraceText, HeaderAndFrames) {
  NetworkConfig c;
  c.n_oscillators = 2;
  PhaseTrace t;
  t.push({PhaseIndex(1, 4), PhaseIndex(9, 4)});
  const auto text = format_trace(c, t);
  EXPECT_EQ(text.substr(0, 1), "#");
  EXPECT_NE(text.find("\n1,9\n"), std::string::npos);
}
