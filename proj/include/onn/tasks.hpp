#pragma once

// Pattern retrieval tasks: phase encoding and decoding, seeded corruption,
// the retrieval judge, and the benchmark harness that drives them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "onn/engine.hpp"
#include "onn/rng.hpp"
#include "onn/training.hpp"
#include "onn/types.hpp"

namespace onn {

/// Black pixels start at 0 degrees, white pixels at 180 degrees.
inline std::vector<PhaseIndex> pattern_to_phases(const BinaryPattern& pattern, int phase_bits) {
  if (phase_bits < 1) throw ConfigError("phase_bits out of range: p >= 1 required");
  const auto half = static_cast<std::int64_t>(period_clocks(phase_bits) / 2);
  std::vector<PhaseIndex> out;
  out.reserve(pattern.size());
  for (auto px : pattern.pixels) out.emplace_back(px ? 0 : half, phase_bits);
  return out;
}

/// Classifies each phase relative to oscillator 0 as in-phase (black) or
/// anti-phase (white). Exact quadrature ties go to black.
inline BinaryPattern phases_to_pattern(std::span<const PhaseIndex> phases, int phase_bits,
                                       std::size_t width, std::size_t height) {
  if (phases.size() != width * height) throw ShapeError("phases_to_pattern: size mismatch");
  BinaryPattern out(width, height);
  if (phases.empty()) return out;
  const auto period = static_cast<std::int64_t>(period_clocks(phase_bits));
  const auto ref = static_cast<std::int64_t>(phases.front().index());
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const auto rel = ((static_cast<std::int64_t>(phases[k].index()) - ref) % period + period) % period;
    const auto dist_to_zero = std::min(rel, period - rel);
    const auto dist_to_half = std::abs(rel - period / 2);
    out.pixels[k] = dist_to_zero <= dist_to_half ? 1 : 0;
  }
  return out;
}

inline BinaryPattern phases_to_pattern(std::span<const PhaseIndex> phases, int phase_bits) {
  return phases_to_pattern(phases, phase_bits, phases.size(), 1);
}

struct CorruptionSpec {
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

/// round-half-away-from-zero(fraction * pixels)
inline std::size_t flip_count(double fraction, std::size_t pixels) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("corruption fraction must lie in [0, 1]");
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pixels)));
}

/// Distinct positions chosen by a partial Fisher-Yates shuffle driven by
/// SplitMix64(seed), in draw order.
inline std::vector<std::size_t> corruption_positions(std::size_t pixels, const CorruptionSpec& spec) {
  const auto count = flip_count(spec.fraction, pixels);
  std::vector<std::size_t> order(pixels);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(spec.seed);
  for (std::size_t k = 0; k < count; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(pixels - k));
    std::swap(order[k], order[pick]);
  }
  order.resize(count);
  return order;
}

inline BinaryPattern flip_positions(BinaryPattern pattern, std::span<const std::size_t> positions) {
  for (auto pos : positions) pattern.pixels.at(pos) ^= 1u;
  return pattern;
}

inline BinaryPattern corrupt(const BinaryPattern& pattern, const CorruptionSpec& spec) {
  return flip_positions(pattern, corruption_positions(pattern.size(), spec));
}

/// Correct when equal to the target or to its complement: a global half-turn
/// of every phase is indistinguishable from the original configuration.
inline bool judge(const BinaryPattern& retrieved, const BinaryPattern& target) {
  if (retrieved.width != target.width || retrieved.height != target.height)
    throw ShapeError("judge: patterns differ in dimensions");
  if (retrieved.pixels == target.pixels) return true;
  for (std::size_t k = 0; k < target.size(); ++k)
    if (retrieved.pixels[k] == target.pixels[k]) return false;
  return true;
}

struct Dataset {
  std::string name;
  std::vector<BinaryPattern> patterns;

  std::size_t width() const { return patterns.empty() ? 0 : patterns.front().width; }
  std::size_t height() const { return patterns.empty() ? 0 : patterns.front().height; }

  std::vector<SpinVector> spins() const {
    std::vector<SpinVector> out;
    for (const auto& p : patterns) out.push_back(SpinVector::from_pattern(p));
    return out;
  }
};

struct TrainedNetwork {
  WeightMatrix weights;
  TrainingResult training;
  QuantizationReport quantization;
};

inline TrainedNetwork train_network(const Dataset& dataset, int weight_bits, const TrainingParams& params) {
  if (dataset.patterns.empty()) throw std::invalid_argument("dataset is empty");
  for (const auto& p : dataset.patterns)
    if (p.width != dataset.width() || p.height != dataset.height())
      throw ShapeError("dataset patterns differ in size");
  const auto spins = dataset.spins();
  auto training = train_do1(spins, params);
  auto quantized = quantize_matrix(training.weights, weight_bits, spins);
  return {std::move(quantized.weights), std::move(training), std::move(quantized.report)};
}

struct TrialResult {
  bool correct = false;
  bool settled = false;
  bool failed = false;
  std::size_t cycles = 0;
};

struct TrialSpec {
  std::size_t pattern = 0;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  bool random_startup_offset = false;
};

/// One retrieval: corrupt, encode, run, decode, judge. Timeouts and engine
/// errors are judged incorrect.
inline TrialResult run_trial(const NetworkConfig& config, const WeightMatrix& weights,
                             const Dataset& dataset, const TrialSpec& trial,
                             const SettleCriteria& criteria) {
  const auto& target = dataset.patterns.at(trial.pattern);
  SplitMix64 rng(trial.seed);
  const CorruptionSpec corruption{trial.fraction, rng.next()};
  const auto probe = corrupt(target, corruption);
  EngineOptions options;
  if (trial.random_startup_offset)
    options.startup_offset_ticks =
        static_cast<std::uint32_t>(rng.below(period_clocks(config.phase_bits)));

  TrialResult result;
  try {
    Engine engine(config, weights, pattern_to_phases(probe, config.phase_bits), std::move(options));
    const auto outcome = run_until_settled(engine, criteria);
    result.settled = outcome.settled;
    result.cycles = outcome.cycles_to_settle;
    if (outcome.settled) {
      const auto decoded =
          phases_to_pattern(outcome.final_phases, config.phase_bits, target.width, target.height);
      result.correct = judge(decoded, target);
    }
  } catch (const std::exception&) {
    result.failed = true;
  }
  return result;
}

struct BenchmarkSpec {
  std::vector<double> levels{0.10, 0.25, 0.50};
  std::size_t trials = 1000;
  NetworkConfig config;  // n_oscillators is taken from the dataset
  TrainingParams training;
  SettleCriteria settle;
  std::uint64_t master_seed = 1;
  bool random_startup_offset = false;
  unsigned threads = 1;
};

struct CellResult {
  std::size_t pattern = 0;
  double level = 0.0;
  std::size_t trials = 0;
  std::size_t correct = 0;
  std::size_t timeouts = 0;  // includes failed trials
  std::size_t failures = 0;
  std::size_t settle_cycles_total = 0;

  std::size_t settled() const { return trials - timeouts; }
  double accuracy() const { return trials == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(trials); }
  double mean_settle() const {
    return settled() == 0 ? 0.0 : static_cast<double>(settle_cycles_total) / static_cast<double>(settled());
  }
};

struct RetrievalReport {
  std::string dataset;
  std::size_t width = 0;
  std::size_t height = 0;
  NetworkConfig config;
  BenchmarkSpec spec;
  bool training_converged = false;
  std::size_t training_epochs = 0;
  QuantizationReport quantization;
  std::vector<CellResult> cells;  // pattern-major, then level

  /// Pooled over patterns for one corruption level.
  CellResult level_summary(std::size_t level_index) const {
    CellResult pooled;
    pooled.level = spec.levels.at(level_index);
    for (std::size_t k = level_index; k < cells.size(); k += spec.levels.size()) {
      pooled.trials += cells[k].trials;
      pooled.correct += cells[k].correct;
      pooled.timeouts += cells[k].timeouts;
      pooled.failures += cells[k].failures;
      pooled.settle_cycles_total += cells[k].settle_cycles_total;
    }
    return pooled;
  }
};

inline RetrievalReport run_benchmark(const Dataset& dataset, const BenchmarkSpec& spec) {
  auto config = spec.config;
  config.n_oscillators = dataset.width() * dataset.height();
  validate_config(config);
  const auto net = train_network(dataset, config.weight_bits, spec.training);

  RetrievalReport report;
  report.dataset = dataset.name;
  report.width = dataset.width();
  report.height = dataset.height();
  report.config = config;
  report.spec = spec;
  report.training_converged = net.training.converged;
  report.training_epochs = net.training.epochs;
  report.quantization = net.quantization;

  const auto n_levels = spec.levels.size();
  const auto n_cells = dataset.patterns.size() * n_levels;
  const auto total = n_cells * spec.trials;
  std::vector<TrialResult> results(total);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t t = begin; t < total; t += stride) {
      const auto cell = t / spec.trials;
      const auto trial = t % spec.trials;
      const auto pattern = cell / n_levels;
      const auto level = cell % n_levels;
      const TrialSpec ts{pattern, spec.levels[level],
                         derive_seed(spec.master_seed, pattern, level, trial),
                         spec.random_startup_offset};
      results[t] = run_trial(config, net.weights, dataset, ts, spec.settle);
    }
  };

  const unsigned threads = std::max(1u, spec.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k, threads);
  }

  report.cells.resize(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    auto& c = report.cells[cell];
    c.pattern = cell / n_levels;
    c.level = spec.levels[cell % n_levels];
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
      const auto& r = results[cell * spec.trials + trial];
      ++c.trials;
      if (r.correct) ++c.correct;
      if (r.failed) ++c.failures;
      if (!r.settled) {
        ++c.timeouts;
      } else {
        c.settle_cycles_total += r.cycles;
      }
    }
  }
  return report;
}

inline std::string format_fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string report_csv(const RetrievalReport& report) {
  std::ostringstream os;
  os << "dataset,width,height,architecture,hybrid_sampling,pattern,level_percent,trials,correct,"
        "accuracy_percent,mean_settle_cycles,timeouts,failures\n";
  for (const auto& c : report.cells) {
    os << report.dataset << ',' << report.width << ',' << report.height << ','
       << to_string(report.config.architecture) << ',' << to_string(report.config.hybrid_sampling)
       << ',' << c.pattern << ',' << format_fixed(100.0 * c.level, 1) << ',' << c.trials << ','
       << c.correct << ',' << format_fixed(c.accuracy(), 2) << ',' << format_fixed(c.mean_settle(), 3)
       << ',' << c.timeouts << ',' << c.failures << '\n';
  }
  return os.str();
}

/// Text table: one block per pattern size, one row per corruption level,
/// accuracy and mean settle time pooled over the dataset's patterns.
inline std::string report_table(std::span<const RetrievalReport> reports) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "size" << std::setw(12) << "arch" << std::right
     << std::setw(12) << "corrupt[%]" << std::setw(14) << "correct[%]" << std::setw(16)
     << "settle[cycles]" << std::setw(10) << "timeouts" << '\n';
  for (const auto& r : reports) {
    std::string arch = to_string(r.config.architecture);
    if (r.config.architecture == Architecture::Hybrid)
      arch += r.config.hybrid_sampling == HybridSampling::Pipelined ? "/p" : "/a";
    for (std::size_t l = 0; l < r.spec.levels.size(); ++l) {
      const auto s = r.level_summary(l);
      os << std::left << std::setw(10) << r.dataset
         << std::setw(12) << arch << std::right << std::setw(12) << format_fixed(100.0 * s.level, 0)
         << std::setw(14) << format_fixed(s.accuracy(), 1) << std::setw(16)
         << format_fixed(s.mean_settle(), 1) << std::setw(10) << s.timeouts << '\n';
    }
  }
  return os.str();
}

}  // namespace onn
