#include <gtest/gtest.h>

#include <sstream>

#include "onn/cli.hpp"

using namespace onn;

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("onn_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string letter(const std::string& set, const std::string& name) {
  return (fs::path(ONN_DATA_DIR) / "letters" / set / (name + ".txt")).string();
}

}  // namespace

TEST(Cli, HelpListsEveryFlag) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--config", "--arch", "--hybrid-mode", "--phase-bits", "--weight-bits", "--trials",
                           "--levels", "--seed", "--parallel", "--trace", "--out"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
}

TEST(Cli, UnknownFlagIsError) {
  EXPECT_NE(invoke({"bench", "--frobnicate"}).code, 0);
  EXPECT_NE(invoke({"--arch", "quantum", "scale"}).code, 0);
  EXPECT_NE(invoke({}).code, 0);
}

TEST(Cli, TrainWritesWeights) {
  const auto dir = temp_dir("train");
  const auto r = invoke({"train", "3x3", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# command = train", 0), 0u);
  const auto w = read_weights_file(dir / "weights.csv", 5);
  EXPECT_EQ(w.size(), 9u);
  EXPECT_NE(invoke({"train", temp_dir("empty").string()}).code, 0);
}

TEST(Cli, TrainLargestSetConverges) {
  const auto r = invoke({"train", "22x22", "--out", temp_dir("train22").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find("UNSTABLE"), std::string::npos);
  EXPECT_NE(r.out.find("weights: "), std::string::npos);
}

TEST(Cli, RunStoredPatternSettlesOnItself) {
  const auto dir = temp_dir("run");
  ASSERT_EQ(invoke({"train", "5x4", "--out", dir.string()}).code, 0);
  const auto weights = (dir / "weights.csv").string();
  const auto trace = (dir / "trace.txt").string();
  const auto r = invoke({"run", "--weights", weights, letter("5x4", "C"), "--trace", trace});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("settled cycles=0"), std::string::npos);
  const auto grid = r.out.substr(r.out.find('\n', r.out.find("settled cycles=")) + 1);
  EXPECT_TRUE(judge(parse_pattern(grid), read_pattern_file(letter("5x4", "C"))));
  EXPECT_TRUE(fs::exists(trace));

  const auto hybrid = invoke({"run", "--arch", "hybrid", "--hybrid-mode", "aligned", "--weights", weights,
                              letter("5x4", "Z"), "--startup-offset", "3"});
  const auto recurrent =
      invoke({"run", "--arch", "recurrent", "--weights", weights, letter("5x4", "Z"), "--startup-offset", "3"});
  auto body = [](const std::string& s) { return s.substr(s.find("\nsettled") == std::string::npos ? s.find("\ntimeout") : s.find("\nsettled")); };
  EXPECT_EQ(body(hybrid.out), body(recurrent.out));
}

TEST(Cli, RunZeroWeightsReturnsInput) {
  const auto dir = temp_dir("zero");
  std::string csv;
  for (int i = 0; i < 9; ++i) csv += "0,0,0,0,0,0,0,0,0\n";
  write_file(dir / "w.csv", csv);
  const auto r = invoke({"run", "--weights", (dir / "w.csv").string(), letter("3x3", "T")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto grid = r.out.substr(r.out.find('\n', r.out.find("settled cycles=")) + 1);
  EXPECT_TRUE(judge(parse_pattern(grid), read_pattern_file(letter("3x3", "T"))));
}

TEST(Cli, RunShapeMismatch) {
  const auto dir = temp_dir("mismatch");
  write_file(dir / "w.csv", "0,0\n0,0\n");
  EXPECT_NE(invoke({"run", "--weights", (dir / "w.csv").string(), letter("3x3", "T")}).code, 0);
}

TEST(Cli, BenchIsByteReproducible) {
  const std::vector<std::string> args{"bench", "3x3", "5x4", "--trials", "10", "--seed", "5", "--random-offset"};
  const auto a = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, invoke(args).out);
  auto par = args;
  par.insert(par.end(), {"--parallel", "3"});
  EXPECT_EQ(a.out, invoke(par).out);
  EXPECT_NE(a.out, invoke({"bench", "3x3", "5x4", "--trials", "10", "--seed", "6", "--random-offset"}).out);
}

TEST(Cli, BenchWritesCsv) {
  const auto dir = temp_dir("bench");
  ASSERT_EQ(invoke({"bench", "3x3", "--trials", "3", "--out", dir.string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "bench_3x3.csv"));
}

TEST(Cli, ConfigFileThenFlags) {
  const auto dir = temp_dir("config");
  write_file(dir / "c.conf", "trials = 4\nseed = 9\nlevels = 0.1\n");
  const auto r = invoke({"bench", "3x3", "--config", (dir / "c.conf").string(), "--seed", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# trials = 4\n"), std::string::npos);
  EXPECT_NE(r.out.find("# seed = 11\n"), std::string::npos);
  write_file(dir / "bad.conf", "colour = red\n");
  EXPECT_NE(invoke({"bench", "3x3", "--config", (dir / "bad.conf").string()}).code, 0);
}

TEST(Cli, ScaleDefaults) {
  const auto r = invoke({"scale"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n8,"), std::string::npos);
  EXPECT_NE(r.out.find("\n512,"), std::string::npos);
  EXPECT_NE(r.out.find("# profile = zynq-7020"), std::string::npos);
  EXPECT_NE(r.out.find("# adders slope = 1.0000"), std::string::npos);
  const auto rec = invoke({"scale", "--arch", "recurrent"});
  EXPECT_NE(rec.out.find("# adders slope = 2.0"), std::string::npos);
  EXPECT_NE(invoke({"scale", "--min", "64", "--max", "8"}).code, 0);
  EXPECT_NE(invoke({"scale", "--min", "1", "--max", "1"}).out.find("# crossover none"), std::string::npos);
}
