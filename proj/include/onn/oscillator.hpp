#pragma once

// Phase-controlled square-wave oscillator built from a circular shift
// register and an output multiplexer.
//
// The register file starts as 2^(p-1) ones followed by 2^(p-1) zeros and is
// rotated left by one position every slow clock. The multiplexer tap selects
// which register drives the output, so moving the tap shifts the phase.
//
// Phase convention: phase() is the position of the current output sample in
// the waveform, 0 meaning the high half has just started. The output is high
// iff phase() < 2^(p-1), and every step() advances the phase by one.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "onn/types.hpp"

namespace onn {

class Oscillator {
 public:
  Oscillator() = default;

  Oscillator(int phase_bits, PhaseIndex phase) : phase_bits_(phase_bits) {
    const auto period = period_clocks(phase_bits);
    if (phase.index() >= period) throw std::out_of_range("initial phase out of range");
    registers_.assign(period, 0);
    std::fill(registers_.begin(), registers_.begin() + static_cast<std::ptrdiff_t>(period / 2),
              std::uint8_t{1});
    mux_select_ = phase.index();
  }

  /// Unchecked construction from raw parts; used by tests that build
  /// arbitrary rotations.
  static Oscillator from_parts(int phase_bits, std::vector<std::uint8_t> registers,
                               std::uint32_t mux_select) {
    Oscillator o;
    o.phase_bits_ = phase_bits;
    o.registers_ = std::move(registers);
    o.mux_select_ = mux_select;
    return o;
  }

  int phase_bits() const { return phase_bits_; }
  std::uint32_t period() const { return static_cast<std::uint32_t>(registers_.size()); }
  std::span<const std::uint8_t> registers() const { return registers_; }
  std::uint32_t mux_select() const { return mux_select_; }

  bool output() const { return registers_[mux_select_] != 0; }

  /// Circular left shift of the register file.
  void step() { std::rotate(registers_.begin(), registers_.begin() + 1, registers_.end()); }

  /// Moves the multiplexer tap forward by delta positions.
  void apply_correction(std::uint32_t delta) { mux_select_ = (mux_select_ + delta) % period(); }

  /// Number of left shifts applied since the canonical [1..1 0..0] layout.
  std::uint32_t rotation() const {
    const auto n = period();
    for (std::uint32_t k = 0; k < n; ++k) {
      const auto prev = (k + n - 1) % n;
      if (registers_[k] && !registers_[prev]) return (n - k) % n;
    }
    return 0;  // unreachable for a well-formed register file
  }

  std::uint32_t phase() const { return (mux_select_ + rotation()) % period(); }

  /// True when the registers hold one contiguous run of 2^(p-1) ones.
  bool well_formed() const {
    const auto n = period();
    if (n != period_clocks(phase_bits_) || mux_select_ >= n) return false;
    std::uint32_t ones = 0;
    std::uint32_t rising = 0;
    for (std::uint32_t k = 0; k < n; ++k) {
      ones += registers_[k];
      if (registers_[k] && !registers_[(k + n - 1) % n]) ++rising;
    }
    return ones == n / 2 && rising == 1;
  }

  bool operator==(const Oscillator&) const = default;

 private:
  int phase_bits_ = 1;
  std::vector<std::uint8_t> registers_;
  std::uint32_t mux_select_ = 0;
};

}  // namespace onn
