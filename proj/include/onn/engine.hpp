#pragma once

// Cycle-accurate network scheduler.
//
// One call to Engine::step() is one rising edge of the slow (phase) clock.
// Within a tick the order is fixed: coupling sums, reference bits, edge
// corrections, register shift, reference history update.
//
// Recurrent: sums are combinational over the amplitudes of the current tick.
// Hybrid/Aligned: same amplitudes, computed through the per-oscillator
//   serial MAC within the fast-clock budget of the tick.
// Hybrid/Pipelined: the MAC result consumed at tick t was started at tick
//   t-1 over the amplitudes latched then.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "onn/coupling.hpp"
#include "onn/oscillator.hpp"
#include "onn/types.hpp"

namespace onn {

struct MacTraceEvent {
  std::uint64_t slow_tick = 0;
  std::size_t oscillator = 0;
  std::size_t counter = 0;
  std::int64_t accumulator = 0;
};

struct EngineOptions {
  // Fast-clock steps available per slow tick (hybrid only); 0 means exactly N.
  std::size_t fast_clock_ratio = 0;
  // Slow ticks of uncoupled free-run before coupling is enabled. Emulates an
  // enable signal that is not synchronized with the oscillators.
  std::uint32_t startup_offset_ticks = 0;
  // Per-fast-step accumulator trace (hybrid only). Disables the bulk MAC path.
  std::function<void(const MacTraceEvent&)> mac_trace;
  // Fold a full serial computation into one vectorized pass when the budget
  // covers all N steps. Results are identical to stepping one at a time.
  bool bulk_mac = true;
};

class Engine {
 public:
  Engine(const NetworkConfig& config, WeightMatrix weights,
         std::span<const PhaseIndex> initial_phases, EngineOptions options = {})
      : config_(validate_config(config).config),
        weights_(std::move(weights)),
        options_(std::move(options)) {
    const auto n = config_.n_oscillators;
    if (weights_.size() != n)
      throw ShapeError("weight matrix is " + std::to_string(weights_.size()) + "x" +
                       std::to_string(weights_.size()) + " but the network has " +
                       std::to_string(n) + " oscillators");
    if (weights_.weight_bits() > config_.weight_bits)
      throw ShapeError("weight matrix uses more bits than the configuration allows");
    if (initial_phases.size() != n)
      throw ShapeError("expected " + std::to_string(n) + " initial phases, got " +
                       std::to_string(initial_phases.size()));

    const auto period = period_clocks(config_.phase_bits);
    oscillators_.reserve(n);
    for (auto ph : initial_phases) {
      if (ph.index() >= period) throw std::out_of_range("initial phase out of range");
      oscillators_.emplace_back(config_.phase_bits, ph);
    }
    amplitudes_.resize(n);
    sums_.assign(n, 0);
    gather_amplitudes();
    prev_reference_ = amplitudes_;
    if (is_hybrid()) {
      macs_.assign(n, SerialMac(n));
      restart_pipeline();
    }
  }

  const NetworkConfig& config() const { return config_; }
  const WeightMatrix& weights() const { return weights_; }
  std::size_t size() const { return oscillators_.size(); }
  std::uint64_t slow_clock() const { return slow_clock_; }
  std::uint32_t period() const { return static_cast<std::uint32_t>(period_clocks(config_.phase_bits)); }

  std::span<const Oscillator> oscillators() const { return oscillators_; }
  std::span<const std::uint8_t> amplitudes() const { return amplitudes_; }
  std::span<const std::uint8_t> prev_reference() const { return prev_reference_; }
  std::span<const std::uint8_t> sampled_amplitudes() const { return sampled_amplitudes_; }
  std::span<const SerialMac> mac_units() const { return macs_; }
  // Sums used at the most recent tick.
  std::span<const std::int64_t> last_sums() const { return sums_; }

  std::vector<PhaseIndex> phases() const {
    std::vector<PhaseIndex> out;
    out.reserve(size());
    for (const auto& o : oscillators_) out.emplace_back(o.phase(), config_.phase_bits);
    return out;
  }

  /// Phases relative to oscillator 0, modulo 2^p.
  std::vector<PhaseIndex> relative_phases() const {
    std::vector<PhaseIndex> out;
    out.reserve(size());
    const auto ref = static_cast<std::int64_t>(oscillators_.front().phase());
    for (const auto& o : oscillators_)
      out.emplace_back(static_cast<std::int64_t>(o.phase()) - ref, config_.phase_bits);
    return out;
  }

  void step() {
    if (slow_clock_ < options_.startup_offset_ticks) {
      for (auto& o : oscillators_) o.step();
      gather_amplitudes();
      prev_reference_ = amplitudes_;
      if (is_hybrid()) restart_pipeline();
      ++slow_clock_;
      return;
    }

    const auto n = size();
    if (!is_hybrid()) {
      for (std::size_t i = 0; i < n; ++i) sums_[i] = fast_sum(weights_.row(i), amplitudes_);
    } else if (config_.hybrid_sampling == HybridSampling::Aligned) {
      for (std::size_t i = 0; i < n; ++i) {
        run_mac(i, amplitudes_);
        if (macs_[i].busy())
          throw TimingViolation("oscillator " + std::to_string(i) + ": serial sum not complete after " +
                                std::to_string(budget()) + " fast steps");
        sums_[i] = macs_[i].latched_sum();
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) sums_[i] = macs_[i].latched_sum();
    }

    for (std::size_t i = 0; i < n; ++i) {
      const bool ref = reference_bit(sums_[i], amplitudes_[i] != 0);
      const auto delta = phase_correction_on_ref_edge(prev_reference_[i] != 0, ref, oscillators_[i]);
      if (delta != 0) oscillators_[i].apply_correction(delta);
      prev_reference_[i] = ref ? 1 : 0;
    }

    if (is_hybrid() && config_.hybrid_sampling == HybridSampling::Pipelined) {
      sampled_amplitudes_ = amplitudes_;
      for (std::size_t i = 0; i < n; ++i) run_mac(i, sampled_amplitudes_);
    }

    for (auto& o : oscillators_) o.step();
    gather_amplitudes();
    ++slow_clock_;
  }

  void step(std::size_t ticks) {
    for (std::size_t t = 0; t < ticks; ++t) step();
  }

  bool coupling_enabled() const { return slow_clock_ >= options_.startup_offset_ticks; }

  /// Everything that determines future evolution once coupling is enabled.
  struct Snapshot {
    std::vector<Oscillator> oscillators;
    std::vector<std::uint8_t> prev_reference;
    std::vector<std::uint8_t> sampled_amplitudes;
    std::vector<SerialMac> macs;
    bool operator==(const Snapshot&) const = default;
  };

  Snapshot snapshot() const { return {oscillators_, prev_reference_, sampled_amplitudes_, macs_}; }

 private:
  bool is_hybrid() const { return config_.architecture == Architecture::Hybrid; }

  std::size_t budget() const {
    return options_.fast_clock_ratio == 0 ? size() : options_.fast_clock_ratio;
  }

  void gather_amplitudes() {
    for (std::size_t i = 0; i < oscillators_.size(); ++i)
      amplitudes_[i] = oscillators_[i].output() ? 1 : 0;
  }

  // Equivalent to weighted_sum(); accumulates in 32 bits when the worst-case
  // bound allows it so the loop vectorizes.
  std::int64_t fast_sum(std::span<const FixedWeight> row, std::span<const std::uint8_t> amps) const {
    if (coupling_sum_bound(config_.weight_bits, row.size()) < (std::int64_t{1} << 30)) {
      std::int32_t acc = 0;
      const auto* w = row.data();
      const auto* a = amps.data();
      for (std::size_t j = 0; j < row.size(); ++j) acc += a[j] ? w[j].value : -w[j].value;
      return acc;
    }
    return weighted_sum(row, amps);
  }

  void run_mac(std::size_t i, std::span<const std::uint8_t> amps) {
    auto& mac = macs_[i];
    const auto row = weights_.row(i);
    if (budget() >= size() && options_.bulk_mac && !options_.mac_trace) {
      // All N steps fit in the tick: fold them in one pass.
      mac.trigger_complete(fast_sum(row, amps));
      return;
    }
    mac.trigger();
    if (options_.mac_trace) {
      for (std::size_t s = 0; s < budget() && mac.busy(); ++s) {
        mac.step(row[mac.counter()], amps[mac.counter()] != 0);
        options_.mac_trace({slow_clock_, i, mac.counter(), mac.accumulator()});
      }
      return;
    }
    mac.run(row, amps, budget());
  }

  void restart_pipeline() {
    if (config_.hybrid_sampling != HybridSampling::Pipelined) return;
    sampled_amplitudes_ = amplitudes_;
    for (std::size_t i = 0; i < size(); ++i) {
      macs_[i] = SerialMac(size());
      run_mac(i, sampled_amplitudes_);
    }
  }

  NetworkConfig config_;
  WeightMatrix weights_;
  EngineOptions options_;
  std::vector<Oscillator> oscillators_;
  std::vector<std::uint8_t> amplitudes_;
  std::vector<std::uint8_t> prev_reference_;
  std::vector<std::uint8_t> sampled_amplitudes_;
  std::vector<SerialMac> macs_;
  std::vector<std::int64_t> sums_;
  std::uint64_t slow_clock_ = 0;
};

struct SettleCriteria {
  std::size_t max_periods = 1000;
  std::size_t stability_window = 3;
  // Stop early once the full engine state repeats without having settled;
  // the reported outcome is identical to running all max_periods samples.
  bool detect_cycles = true;
};

struct RunOutcome {
  std::vector<PhaseIndex> final_phases;
  bool settled = false;
  bool timed_out = false;
  std::size_t cycles_to_settle = 0;
  std::size_t samples = 0;
};

/// Bounded ring of period-sampled phase vectors.
class PhaseTrace {
 public:
  explicit PhaseTrace(std::size_t capacity = 4096) : capacity_(capacity) {}

  void push(std::vector<PhaseIndex> frame) {
    if (capacity_ == 0) return;
    if (frames_.size() == capacity_) {
      frames_.pop_front();
      ++dropped_;
    }
    frames_.push_back(std::move(frame));
  }

  const std::deque<std::vector<PhaseIndex>>& frames() const { return frames_; }
  std::size_t dropped() const { return dropped_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t dropped_ = 0;
  std::deque<std::vector<PhaseIndex>> frames_;
};

namespace detail {

inline std::size_t hash_state(const Engine::Snapshot& s) {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) { h = (h ^ v) * 1099511628211ull; };
  for (const auto& o : s.oscillators) {
    mix(o.mux_select());
    mix(o.rotation());
  }
  for (auto r : s.prev_reference) mix(r);
  for (auto a : s.sampled_amplitudes) mix(a);
  for (const auto& m : s.macs) mix(static_cast<std::uint64_t>(m.latched_sum()));
  return h;
}

// Longest run of equal consecutive entries in the infinite repetition of seq.
// Returns SIZE_MAX when every entry is equal.
template <typename T>
std::size_t longest_cyclic_run(const std::vector<T>& seq) {
  const auto n = seq.size();
  std::size_t best = 1;
  std::size_t run = 1;
  for (std::size_t k = 1; k < 2 * n; ++k) {
    if (seq[k % n] == seq[(k - 1) % n]) {
      if (++run >= n + 1) return static_cast<std::size_t>(-1);
    } else {
      run = 1;
    }
    best = std::max(best, run);
  }
  return best;
}

}  // namespace detail

/// Samples the phase vector once per oscillation period and stops when the
/// relative-phase vector has been identical for stability_window consecutive
/// samples. cycles_to_settle is the index of the first sample of that window.
inline RunOutcome run_until_settled(Engine& engine, const SettleCriteria& criteria,
                                    PhaseTrace* trace = nullptr) {
  if (criteria.stability_window < 1 || criteria.max_periods < criteria.stability_window)
    throw std::invalid_argument("run_until_settled: need max_periods >= stability_window >= 1");

  RunOutcome out;
  std::vector<PhaseIndex> last_relative;
  std::size_t run = 0;

  // Cycle detection bookkeeping.
  std::vector<Engine::Snapshot> snapshots;
  std::vector<std::vector<PhaseIndex>> sampled_phases;
  std::vector<std::vector<PhaseIndex>> sampled_relative;
  std::unordered_multimap<std::size_t, std::size_t> seen;
  bool tracking = criteria.detect_cycles;
  std::size_t first_tracked = 0;

  for (std::size_t k = 0; k < criteria.max_periods; ++k) {
    auto phases = engine.phases();
    auto relative = engine.relative_phases();
    if (trace) trace->push(phases);
    out.samples = k + 1;

    run = (k > 0 && relative == last_relative) ? run + 1 : 1;
    if (run >= criteria.stability_window) {
      out.settled = true;
      out.cycles_to_settle = k + 1 - criteria.stability_window;
      out.final_phases = std::move(phases);
      return out;
    }

    if (tracking && engine.coupling_enabled()) {
      auto snap = engine.snapshot();
      const auto h = detail::hash_state(snap);
      auto [lo, hi] = seen.equal_range(h);
      for (auto it = lo; it != hi; ++it) {
        const auto j = it->second;
        if (!(snapshots[j] == snap)) continue;
        std::vector<std::vector<PhaseIndex>> cycle(sampled_relative.begin() + static_cast<std::ptrdiff_t>(j),
                                                   sampled_relative.end());
        if (detail::longest_cyclic_run(cycle) >= criteria.stability_window) {
          // Will settle later in the orbit; keep stepping normally.
          tracking = false;
          break;
        }
        // Periodic orbit that never holds still long enough: timeout.
        const auto start = first_tracked + j;
        const auto len = k - start;
        auto at = [&](std::size_t idx) -> const std::vector<PhaseIndex>& {
          return sampled_phases[j + (idx - start) % len];
        };
        if (trace) {
          for (std::size_t idx = k + 1; idx < criteria.max_periods; ++idx) trace->push(at(idx));
        }
        out.samples = criteria.max_periods;
        out.timed_out = true;
        out.final_phases = at(criteria.max_periods - 1);
        return out;
      }
      if (tracking) {
        if (snapshots.empty()) first_tracked = k;
        seen.emplace(h, snapshots.size());
        snapshots.push_back(std::move(snap));
        sampled_phases.push_back(phases);
        sampled_relative.push_back(relative);
      }
    }

    last_relative = std::move(relative);
    if (k + 1 == criteria.max_periods) {
      out.timed_out = true;
      out.final_phases = std::move(phases);
      return out;
    }
    engine.step(engine.period());
  }
  out.timed_out = true;
  out.final_phases = engine.phases();
  return out;
}

/// Ising coupling energy -1/2 sum_ij W_ij s_i s_j, stored exactly in halves.
struct Energy {
  std::int64_t halves = 0;
  double value() const { return static_cast<double>(halves) / 2.0; }
  auto operator<=>(const Energy&) const = default;
};

inline Energy energy(const WeightMatrix& weights, const SpinVector& spins) {
  const auto n = weights.size();
  if (spins.size() != n) throw ShapeError("energy: spin vector length does not match weights");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t row = 0;
    for (std::size_t j = 0; j < n; ++j) row += weights.at(i, j).value * spins.spins[j];
    total += row * spins.spins[i];
  }
  return Energy{-total};
}

}  // namespace onn
