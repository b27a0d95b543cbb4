#pragma once

// Coupling arithmetic: the combinational sign-select sum used by the
// recurrent design, the serial multiply-accumulate unit used by the hybrid
// design, and the reference-signal / edge-correction rule shared by both.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "onn/oscillator.hpp"
#include "onn/types.hpp"

namespace onn {

class TimingViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int ceil_log2(std::size_t n) {
  return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
}

/// Accumulator width in bits that holds any sum of n weights of b bits.
inline int coupling_sum_width(int weight_bits, std::size_t n) {
  return weight_bits + ceil_log2(n) + 1;
}

inline std::int64_t coupling_sum_bound(int weight_bits, std::size_t n) {
  return static_cast<std::int64_t>(n) * max_weight_magnitude(weight_bits);
}

/// Sum of +w (amplitude high) or -w (amplitude low) over one weight row.
inline std::int64_t weighted_sum(std::span<const FixedWeight> row,
                                 std::span<const std::uint8_t> amplitudes) {
  if (row.size() != amplitudes.size())
    throw ShapeError("weighted_sum: row has " + std::to_string(row.size()) +
                     " weights but " + std::to_string(amplitudes.size()) + " amplitudes");
  std::int64_t acc = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const std::int64_t w = row[j].value;
    acc += amplitudes[j] ? w : -w;
  }
  return acc;
}

/// Sign of the sum; a zero sum follows the oscillator's own amplitude.
inline bool reference_bit(std::int64_t sum, bool own_amplitude) {
  if (sum > 0) return true;
  if (sum < 0) return false;
  return own_amplitude;
}

/// On a rising reference edge, the tap offset that moves the oscillator to
/// phase 0 so its high half starts together with the reference. Zero otherwise.
inline std::uint32_t phase_correction_on_ref_edge(bool prev_ref, bool cur_ref,
                                                  const Oscillator& osc) {
  if (prev_ref || !cur_ref) return 0;
  const auto period = osc.period();
  return (period - osc.phase()) % period;
}

/// One accumulator per oscillator. A trigger clears it; each fast-clock step
/// folds in one signed weight in ascending source order; after n steps the
/// result is latched and held until the next completion.
class SerialMac {
 public:
  SerialMac() = default;
  explicit SerialMac(std::size_t n) : n_(n) {}

  std::size_t size() const { return n_; }
  std::size_t counter() const { return counter_; }
  std::int64_t accumulator() const { return accumulator_; }
  std::int64_t latched_sum() const { return latched_sum_; }
  bool busy() const { return busy_; }

  void trigger() {
    if (busy_)
      throw TimingViolation("serial MAC retriggered after " + std::to_string(counter_) + " of " +
                            std::to_string(n_) +
                            " steps: fast clock too slow for the number of oscillators");
    accumulator_ = 0;
    counter_ = 0;
    busy_ = true;
  }

  void step(FixedWeight weight, bool amplitude) {
    if (!busy_) throw std::logic_error("serial MAC stepped while idle");
    accumulator_ += amplitude ? weight.value : -static_cast<std::int64_t>(weight.value);
    ++counter_;
    if (counter_ == n_) {
      latched_sum_ = accumulator_;
      busy_ = false;
    }
  }

  /// Runs up to max_steps fast-clock steps over the row; returns steps taken.
  std::size_t run(std::span<const FixedWeight> row, std::span<const std::uint8_t> amplitudes,
                  std::size_t max_steps) {
    std::size_t taken = 0;
    while (busy_ && taken < max_steps) {
      step(row[counter_], amplitudes[counter_] != 0);
      ++taken;
    }
    return taken;
  }

  /// Trigger followed by all n steps at once, given their total.
  void trigger_complete(std::int64_t total) {
    trigger();
    accumulator_ = total;
    counter_ = n_;
    latched_sum_ = total;
    busy_ = false;
  }

  bool operator==(const SerialMac&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t counter_ = 0;
  std::int64_t accumulator_ = 0;
  std::int64_t latched_sum_ = 0;
  bool busy_ = false;
};

}  // namespace onn
