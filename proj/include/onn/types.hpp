#pragma once

// Shared domain types for the oscillatory network emulator: network
// configuration, fixed-point weights, phases, patterns and spins.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace onn {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Architecture { Recurrent, Hybrid };

// Pipelined: the serial sum started at one slow edge is consumed at the next.
// Aligned: the serial sum covers the amplitudes of the edge that consumes it.
enum class HybridSampling { Pipelined, Aligned };

inline constexpr int kMaxPhaseBits = 12;
inline constexpr int kMaxWeightBits = 16;

struct NetworkConfig {
  Architecture architecture = Architecture::Hybrid;
  std::size_t n_oscillators = 1;
  int weight_bits = 5;
  int phase_bits = 4;
  HybridSampling hybrid_sampling = HybridSampling::Aligned;
  double logic_frequency_hz = 50e6;

  bool operator==(const NetworkConfig&) const = default;
};

struct CheckedConfig {
  NetworkConfig config;
  std::size_t period_clocks = 0;
  double phase_step_degrees = 0.0;
};

inline std::size_t period_clocks(int phase_bits) {
  return std::size_t{1} << phase_bits;
}

inline double phase_step_degrees(int phase_bits) {
  return 360.0 / static_cast<double>(period_clocks(phase_bits));
}

inline CheckedConfig validate_config(const NetworkConfig& config) {
  if (config.n_oscillators < 1)
    throw ConfigError("n_oscillators out of range: N >= 1 required");
  if (config.weight_bits < 2)
    throw ConfigError("weight_bits out of range: b >= 2 required (sign + magnitude)");
  if (config.weight_bits > kMaxWeightBits)
    throw ConfigError("weight_bits out of range: b <= " + std::to_string(kMaxWeightBits) +
                      " required");
  if (config.phase_bits < 1)
    throw ConfigError("phase_bits out of range: p >= 1 required");
  if (config.phase_bits > kMaxPhaseBits)
    throw ConfigError("phase_bits out of range: p <= " + std::to_string(kMaxPhaseBits) +
                      " required");
  if (!(config.logic_frequency_hz > 0.0) || !std::isfinite(config.logic_frequency_hz))
    throw ConfigError("logic_frequency_hz out of range: must be positive");
  return {config, period_clocks(config.phase_bits), phase_step_degrees(config.phase_bits)};
}

/// Largest representable weight magnitude. The most negative two's-complement
/// code is excluded so every weight can be negated.
inline constexpr std::int32_t max_weight_magnitude(int weight_bits) {
  return (std::int32_t{1} << (weight_bits - 1)) - 1;
}

struct FixedWeight {
  std::int32_t value = 0;

  constexpr FixedWeight() = default;
  constexpr explicit FixedWeight(std::int32_t v) : value(v) {}

  constexpr FixedWeight operator-() const { return FixedWeight{-value}; }
  bool operator==(const FixedWeight&) const = default;

  static FixedWeight checked(std::int32_t v, int weight_bits) {
    const auto bound = max_weight_magnitude(weight_bits);
    if (v > bound || v < -bound)
      throw std::out_of_range("weight " + std::to_string(v) + " outside [-" +
                              std::to_string(bound) + ", " + std::to_string(bound) + "]");
    return FixedWeight{v};
  }
};

/// Round to nearest (ties away from zero), then clamp to the symmetric range.
inline FixedWeight quantize_weight(double w, int weight_bits) {
  const auto bound = static_cast<double>(max_weight_magnitude(weight_bits));
  if (std::isnan(w)) return FixedWeight{0};
  double r = std::round(w);
  if (r > bound) r = bound;
  if (r < -bound) r = -bound;
  return FixedWeight{static_cast<std::int32_t>(r)};
}

/// N x N coupling weights. Row i holds the weights into oscillator i, so
/// at(i, j) is the coupling from oscillator j to oscillator i.
class WeightMatrix {
 public:
  WeightMatrix() = default;

  WeightMatrix(std::size_t n, int weight_bits)
      : n_(n), weight_bits_(weight_bits), entries_(n * n) {}

  WeightMatrix(std::size_t n, int weight_bits, std::span<const std::int32_t> values)
      : WeightMatrix(n, weight_bits) {
    if (values.size() != n * n)
      throw ShapeError("weight matrix needs " + std::to_string(n * n) + " entries, got " +
                       std::to_string(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k)
      entries_[k] = FixedWeight::checked(values[k], weight_bits);
  }

  std::size_t size() const { return n_; }
  int weight_bits() const { return weight_bits_; }

  FixedWeight at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, FixedWeight w) {
    entries_[i * n_ + j] = FixedWeight::checked(w.value, weight_bits_);
  }

  std::span<const FixedWeight> row(std::size_t i) const {
    return {entries_.data() + i * n_, n_};
  }

  std::span<const FixedWeight> entries() const { return entries_; }

  bool operator==(const WeightMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  int weight_bits_ = 5;
  std::vector<FixedWeight> entries_;
};

/// Phase in units of 360/2^p degrees, always reduced modulo 2^p.
class PhaseIndex {
 public:
  constexpr PhaseIndex() = default;
  PhaseIndex(std::int64_t raw, int phase_bits) {
    const auto period = static_cast<std::int64_t>(period_clocks(phase_bits));
    index_ = static_cast<std::uint32_t>(((raw % period) + period) % period);
  }

  constexpr std::uint32_t index() const { return index_; }
  bool operator==(const PhaseIndex&) const = default;

 private:
  std::uint32_t index_ = 0;
};

/// Row-major black/white image; 1 = black.
struct BinaryPattern {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  BinaryPattern() = default;
  BinaryPattern(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h, 0) {}
  BinaryPattern(std::size_t w, std::size_t h, std::vector<std::uint8_t> px)
      : width(w), height(h), pixels(std::move(px)) {
    if (pixels.size() != width * height)
      throw ShapeError("pattern has " + std::to_string(pixels.size()) + " pixels, expected " +
                       std::to_string(width * height));
    for (auto& p : pixels) {
      if (p > 1) throw ShapeError("pattern pixels must be 0 or 1");
    }
  }

  std::size_t size() const { return pixels.size(); }
  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  BinaryPattern complement() const {
    BinaryPattern out = *this;
    for (auto& p : out.pixels) p ^= 1u;
    return out;
  }

  bool operator==(const BinaryPattern&) const = default;
};

/// Ising spins in {+1, -1}; black pixel / high amplitude maps to +1.
struct SpinVector {
  std::vector<std::int8_t> spins;

  std::size_t size() const { return spins.size(); }
  bool operator==(const SpinVector&) const = default;

  static SpinVector from_pattern(const BinaryPattern& pattern) {
    SpinVector s;
    s.spins.reserve(pattern.size());
    for (auto px : pattern.pixels) s.spins.push_back(px ? 1 : -1);
    return s;
  }

  static SpinVector from_amplitudes(std::span<const std::uint8_t> amplitudes) {
    SpinVector s;
    s.spins.reserve(amplitudes.size());
    for (auto a : amplitudes) s.spins.push_back(a ? 1 : -1);
    return s;
  }

  SpinVector negated() const {
    SpinVector out = *this;
    for (auto& v : out.spins) v = static_cast<std::int8_t>(-v);
    return out;
  }
};

inline const char* to_string(Architecture a) {
  return a == Architecture::Recurrent ? "recurrent" : "hybrid";
}

inline const char* to_string(HybridSampling s) {
  return s == HybridSampling::Pipelined ? "pipelined" : "aligned";
}

}  // namespace onn
