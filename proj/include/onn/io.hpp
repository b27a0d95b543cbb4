#pragma once

// Text formats.
//
// Pattern file: one row per line of '0'/'1' characters, all rows the same
// length. Lines starting with '#' are comments. A file may hold several
// patterns separated by blank lines.
//
// Weight file: CSV of signed decimal integers, N rows of N columns.
//
// Config file: "key = value" lines, '#' comments. Keys:
//   architecture        recurrent | hybrid
//   hybrid_sampling     pipelined | aligned
//   n_oscillators       integer >= 1 (0 or absent: taken from the data)
//   weight_bits         integer >= 2
//   phase_bits          integer >= 1
//   logic_frequency_hz  positive real
//   max_periods         integer, settle timeout in oscillation periods
//   stability_window    integer, periods the relative phases must hold
//   stability_threshold positive real, training margin
//   max_epochs          integer, training epoch cap
//   seed                unsigned 64-bit master seed
//   trials              integer, trials per (pattern, level)
//   levels              comma-separated corruption fractions, e.g. 0.1,0.25,0.5

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onn/engine.hpp"
#include "onn/tasks.hpp"
#include "onn/training.hpp"
#include "onn/types.hpp"

namespace onn {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ParseError(std::string(what) + ": cannot parse '" + std::string(text) + "'");
  return value;
}

inline double parse_double(std::string_view text, std::string_view what) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw ParseError(std::string(what) + ": cannot parse '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<BinaryPattern> parse_patterns(const std::string& text) {
  std::vector<BinaryPattern> out;
  std::vector<std::string> rows;
  auto flush = [&] {
    if (rows.empty()) return;
    const auto width = rows.front().size();
    std::vector<std::uint8_t> px;
    for (const auto& r : rows) {
      if (r.size() != width)
        throw ParseError("pattern rows differ in length (" + std::to_string(width) + " vs " +
                         std::to_string(r.size()) + ")");
      for (char c : r) px.push_back(c == '1' ? 1 : 0);
    }
    out.emplace_back(width, rows.size(), std::move(px));
    rows.clear();
  };
  for (const auto& raw : detail::split_lines(text)) {
    const auto line = detail::trim(raw);
    if (!line.empty() && line.front() == '#') continue;
    if (line.empty()) {
      flush();
      continue;
    }
    for (char c : line)
      if (c != '0' && c != '1') throw ParseError("pattern line contains '" + std::string(1, c) + "'");
    rows.emplace_back(line);
  }
  flush();
  return out;
}

inline BinaryPattern parse_pattern(const std::string& text) {
  auto all = parse_patterns(text);
  if (all.size() != 1)
    throw ParseError("expected exactly one pattern, found " + std::to_string(all.size()));
  return std::move(all.front());
}

inline std::string format_pattern(const BinaryPattern& p) {
  std::string out;
  for (std::size_t y = 0; y < p.height; ++y) {
    for (std::size_t x = 0; x < p.width; ++x) out += p.at(x, y) ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline BinaryPattern read_pattern_file(const std::filesystem::path& path) {
  return parse_pattern(detail::read_file(path));
}

/// A directory of pattern files (sorted by file name, one or more patterns
/// each) or a single multi-pattern file.
inline Dataset read_dataset(const std::filesystem::path& path) {
  Dataset ds;
  ds.name = path.filename().string();
  if (ds.name.empty()) ds.name = path.parent_path().filename().string();
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
      for (auto& p : parse_patterns(detail::read_file(f))) ds.patterns.push_back(std::move(p));
  } else {
    ds.patterns = parse_patterns(detail::read_file(path));
    ds.name = path.stem().string();
  }
  if (ds.patterns.empty()) throw ParseError("dataset " + path.string() + " contains no patterns");
  for (const auto& p : ds.patterns)
    if (p.width != ds.width() || p.height != ds.height())
      throw ParseError("dataset " + path.string() + ": inconsistent pattern sizes");
  return ds;
}

inline std::string format_weights_csv(const WeightMatrix& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(w.at(i, j).value);
    }
    out += '\n';
  }
  return out;
}

inline WeightMatrix parse_weights_csv(const std::string& text, int weight_bits) {
  std::vector<std::int32_t> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (const auto& raw : detail::split_lines(text)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto field = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
      values.push_back(detail::parse_number<std::int32_t>(field, "weight"));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw ParseError("weight CSV row " + std::to_string(rows + 1) + " has " +
                                        std::to_string(count) + " columns, expected " + std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw ParseError("weight CSV is empty");
  if (rows != cols)
    throw ParseError("weight CSV is " + std::to_string(rows) + "x" + std::to_string(cols) + ", not square");
  try {
    return WeightMatrix(rows, weight_bits, values);
  } catch (const std::out_of_range& e) {
    throw ParseError(std::string("weight CSV: ") + e.what());
  }
}

inline WeightMatrix read_weights_file(const std::filesystem::path& path, int weight_bits) {
  return parse_weights_csv(detail::read_file(path), weight_bits);
}

/// Everything a tool invocation can be configured with.
struct Settings {
  NetworkConfig network;
  SettleCriteria settle;
  TrainingParams training;
  std::uint64_t seed = 1;
  std::size_t trials = 1000;
  std::vector<double> levels{0.10, 0.25, 0.50};

  bool operator==(const Settings& o) const {
    return network == o.network && settle.max_periods == o.settle.max_periods &&
           settle.stability_window == o.settle.stability_window &&
           training.stability_threshold == o.training.stability_threshold &&
           training.max_epochs == o.training.max_epochs && seed == o.seed && trials == o.trials &&
           levels == o.levels;
  }
};

inline Architecture parse_architecture(std::string_view s) {
  if (s == "recurrent") return Architecture::Recurrent;
  if (s == "hybrid") return Architecture::Hybrid;
  throw ParseError("architecture must be 'recurrent' or 'hybrid', got '" + std::string(s) + "'");
}

inline HybridSampling parse_hybrid_sampling(std::string_view s) {
  if (s == "pipelined") return HybridSampling::Pipelined;
  if (s == "aligned") return HybridSampling::Aligned;
  throw ParseError("hybrid_sampling must be 'pipelined' or 'aligned', got '" + std::string(s) + "'");
}

inline std::vector<double> parse_levels(std::string_view s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto field = s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start);
    const double v = detail::parse_double(field, "levels");
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("levels: fraction outside [0, 1]");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ParseError("levels: empty list");
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline void apply_setting(Settings& s, std::string_view key, std::string_view value) {
  if (key == "architecture") s.network.architecture = parse_architecture(value);
  else if (key == "hybrid_sampling") s.network.hybrid_sampling = parse_hybrid_sampling(value);
  else if (key == "n_oscillators") s.network.n_oscillators = detail::parse_number<std::size_t>(value, key);
  else if (key == "weight_bits") s.network.weight_bits = detail::parse_number<int>(value, key);
  else if (key == "phase_bits") s.network.phase_bits = detail::parse_number<int>(value, key);
  else if (key == "logic_frequency_hz") s.network.logic_frequency_hz = detail::parse_double(value, key);
  else if (key == "max_periods") s.settle.max_periods = detail::parse_number<std::size_t>(value, key);
  else if (key == "stability_window") s.settle.stability_window = detail::parse_number<std::size_t>(value, key);
  else if (key == "stability_threshold") s.training.stability_threshold = detail::parse_double(value, key);
  else if (key == "max_epochs") s.training.max_epochs = detail::parse_number<std::size_t>(value, key);
  else if (key == "seed") s.seed = detail::parse_number<std::uint64_t>(value, key);
  else if (key == "trials") s.trials = detail::parse_number<std::size_t>(value, key);
  else if (key == "levels") s.levels = parse_levels(value);
  else throw ParseError("unknown config key '" + std::string(key) + "'");
}

inline Settings parse_settings(const std::string& text, Settings base = {}) {
  std::size_t lineno = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++lineno;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline Settings read_settings_file(const std::filesystem::path& path, Settings base = {}) {
  return parse_settings(detail::read_file(path), std::move(base));
}

inline std::string format_settings(const Settings& s) {
  std::ostringstream os;
  os << "architecture = " << to_string(s.network.architecture) << '\n'
     << "hybrid_sampling = " << to_string(s.network.hybrid_sampling) << '\n'
     << "n_oscillators = " << s.network.n_oscillators << '\n'
     << "weight_bits = " << s.network.weight_bits << '\n'
     << "phase_bits = " << s.network.phase_bits << '\n'
     << "logic_frequency_hz = " << format_double(s.network.logic_frequency_hz) << '\n'
     << "max_periods = " << s.settle.max_periods << '\n'
     << "stability_window = " << s.settle.stability_window << '\n'
     << "stability_threshold = " << format_double(s.training.stability_threshold) << '\n'
     << "max_epochs = " << s.training.max_epochs << '\n'
     << "seed = " << s.seed << '\n'
     << "trials = " << s.trials << '\n'
     << "levels = ";
  for (std::size_t k = 0; k < s.levels.size(); ++k) os << (k ? "," : "") << format_double(s.levels[k]);
  os << '\n';
  return os.str();
}

/// Header line echoing the network config, then one line per period sample.
inline std::string format_trace(const NetworkConfig& config, const PhaseTrace& trace) {
  std::ostringstream os;
  os << "# architecture=" << to_string(config.architecture)
     << " hybrid_sampling=" << to_string(config.hybrid_sampling) << " n_oscillators=" << config.n_oscillators
     << " weight_bits=" << config.weight_bits << " phase_bits=" << config.phase_bits
     << " dropped_frames=" << trace.dropped() << '\n';
  for (const auto& frame : trace.frames()) {
    for (std::size_t k = 0; k < frame.size(); ++k) os << (k ? "," : "") << frame[k].index();
    os << '\n';
  }
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace onn
