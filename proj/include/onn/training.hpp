#pragma once

// Diederich-Opper I learning and quantization to engine precision.
//
// Rule: sweep patterns (outer) and units (inner, ascending). For pattern xi
// and unit i with local field h_i = sum_j W_ij xi_j, if xi_i * h_i is below
// the stability threshold, add xi_i * xi_j / N to every W_ij of row i. The
// diagonal is trained like any other entry. Training has converged when a
// full epoch performs no update, at which point xi_i * h_i >= threshold holds
// for every stored pattern and unit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "onn/types.hpp"

namespace onn {

struct TrainingParams {
  double stability_threshold = 1.0;
  std::size_t max_epochs = 1000;
};

struct RealMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  RealMatrix() = default;
  explicit RealMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  bool operator==(const RealMatrix&) const = default;
};

struct TrainingResult {
  RealMatrix weights;
  bool converged = false;
  std::size_t epochs = 0;
  std::size_t updates = 0;
};

inline TrainingResult train_do1(std::span<const SpinVector> patterns, const TrainingParams& params = {}) {
  if (patterns.empty()) throw std::invalid_argument("train_do1: at least one pattern required");
  const auto n = patterns.front().size();
  if (n == 0) throw std::invalid_argument("train_do1: empty patterns");
  for (const auto& p : patterns)
    if (p.size() != n) throw ShapeError("train_do1: patterns differ in length");

  TrainingResult result;
  result.weights = RealMatrix(n);
  auto& w = result.weights;
  const double increment = 1.0 / static_cast<double>(n);

  for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
    std::size_t updates = 0;
    for (const auto& xi : patterns) {
      for (std::size_t i = 0; i < n; ++i) {
        double h = 0.0;
        for (std::size_t j = 0; j < n; ++j) h += w.at(i, j) * xi.spins[j];
        if (xi.spins[i] * h < params.stability_threshold) {
          for (std::size_t j = 0; j < n; ++j) w.at(i, j) += increment * xi.spins[i] * xi.spins[j];
          ++updates;
        }
      }
    }
    result.epochs = epoch + 1;
    result.updates += updates;
    if (updates == 0) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// Engine-consistent fixed point: every unit's field agrees with its spin or
/// is exactly zero (a zero sum holds the current amplitude).
inline bool is_fixed_point(const WeightMatrix& w, const SpinVector& s) {
  const auto n = w.size();
  if (s.size() != n) throw ShapeError("is_fixed_point: spin vector length does not match weights");
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t h = 0;
    for (std::size_t j = 0; j < n; ++j) h += w.at(i, j).value * s.spins[j];
    if (h * s.spins[i] < 0) return false;
  }
  return true;
}

struct QuantizationReport {
  double scale = 1.0;
  bool all_zero = false;
  std::vector<std::size_t> unstable_patterns;
};

struct QuantizedWeights {
  WeightMatrix weights;
  QuantizationReport report;
};

/// Scales so the largest |entry| lands on the top code, then rounds each
/// entry. Lists stored patterns that are no longer fixed points.
inline QuantizedWeights quantize_matrix(const RealMatrix& w, int weight_bits,
                                        std::span<const SpinVector> patterns = {}) {
  if (weight_bits < 2) throw ConfigError("weight_bits out of range: b >= 2 required");
  double max_abs = 0.0;
  for (double v : w.data) max_abs = std::max(max_abs, std::abs(v));

  QuantizedWeights out{WeightMatrix(w.n, weight_bits), {}};
  if (max_abs == 0.0) {
    out.report.all_zero = true;
    out.report.scale = 1.0;
  } else {
    out.report.scale = static_cast<double>(max_weight_magnitude(weight_bits)) / max_abs;
  }
  for (std::size_t i = 0; i < w.n; ++i)
    for (std::size_t j = 0; j < w.n; ++j)
      out.weights.set(i, j, quantize_weight(w.at(i, j) * out.report.scale, weight_bits));

  for (std::size_t k = 0; k < patterns.size(); ++k)
    if (!is_fixed_point(out.weights, patterns[k])) out.report.unstable_patterns.push_back(k);
  return out;
}

}  // namespace onn
