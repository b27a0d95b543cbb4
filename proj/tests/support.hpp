#pragma once

#include <random>
#include <vector>

#include "onn/types.hpp"

namespace onn::testing {

inline WeightMatrix random_weights(std::size_t n, int bits, std::mt19937_64& gen) {
  const auto m = max_weight_magnitude(bits);
  std::vector<std::int32_t> v(n * n);
  for (auto& x : v) x = static_cast<std::int32_t>(gen() % static_cast<std::uint64_t>(2 * m + 1)) - m;
  return WeightMatrix(n, bits, v);
}

inline WeightMatrix symmetric_weights(std::size_t n, int bits, std::mt19937_64& gen) {
  auto w = random_weights(n, bits, gen);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) w.set(j, i, w.at(i, j));
  return w;
}

inline std::vector<PhaseIndex> random_phases(std::size_t n, int p, std::mt19937_64& gen) {
  std::vector<PhaseIndex> out;
  for (std::size_t k = 0; k < n; ++k) out.emplace_back(static_cast<std::int64_t>(gen() % period_clocks(p)), p);
  return out;
}

inline NetworkConfig config(Architecture a, std::size_t n, int b, int p,
                            HybridSampling s = HybridSampling::Aligned) {
  NetworkConfig c;
  c.architecture = a;
  c.n_oscillators = n;
  c.weight_bits = b;
  c.phase_bits = p;
  c.hybrid_sampling = s;
  return c;
}

}  // namespace onn::testing
