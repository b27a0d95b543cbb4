#pragma once

// Analytic hardware cost model: element counts per architecture, oscillation
// frequency after clock division, log-log scaling fits, and the
// area/frequency trade-off curve for a device profile.
//
// The counts are theoretical orders. Absolute LUT/FF numbers depend on the
// synthesis tool and only enter through a user-supplied linear calibration.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onn/types.hpp"

namespace onn {

struct ResourceCounts {
  std::uint64_t oscillators = 0;
  std::uint64_t coupling_elements = 0;
  std::uint64_t memory_cells = 0;
  std::uint64_t memory_bits = 0;
  std::uint64_t adders = 0;
  std::uint64_t mac_units = 0;
  std::uint64_t mux_inputs = 0;

  bool operator==(const ResourceCounts&) const = default;
};

inline ResourceCounts count_elements(Architecture arch, std::uint64_t n, int weight_bits, int phase_bits) {
  ResourceCounts c;
  c.oscillators = n;
  c.coupling_elements = n * n;
  c.memory_cells = n * n;
  c.memory_bits = n * n * static_cast<std::uint64_t>(weight_bits);
  const std::uint64_t phase_mux = n * (std::uint64_t{1} << phase_bits);
  if (arch == Architecture::Recurrent) {
    // One adder tree of N-1 adders per oscillator.
    c.adders = n == 0 ? 0 : n * (n - 1);
    c.mac_units = 0;
    c.mux_inputs = phase_mux;
  } else {
    c.adders = n;
    c.mac_units = n;
    c.mux_inputs = phase_mux + n * n;  // plus one N-input amplitude mux each
  }
  return c;
}

/// Smallest power of two >= n.
inline std::uint64_t division_factor(std::uint64_t n) {
  std::uint64_t d = 1;
  while (d < n) d <<= 1;
  return d;
}

/// Recurrent: f_logic / 2^p. Hybrid: f_logic / (2^p * D) with D the clock
/// division covering N serial steps. overhead_divisor scales either result.
inline double oscillation_frequency(Architecture arch, std::uint64_t n, int phase_bits, double logic_hz,
                                    double overhead_divisor = 1.0) {
  if (!(logic_hz > 0.0) || !(overhead_divisor > 0.0) || n == 0)
    throw std::invalid_argument("oscillation_frequency: inputs must be positive");
  double f = logic_hz / static_cast<double>(period_clocks(phase_bits));
  if (arch == Architecture::Hybrid) f /= static_cast<double>(division_factor(n));
  return f / overhead_divisor;
}

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct ScalingPoint {
  double n = 0.0;
  double y = 0.0;
};

/// Ordinary least squares of log10(y) on log10(n).
inline ScalingFit fit_scaling(std::span<const ScalingPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("fit_scaling: need at least 2 points");
  double sx = 0, sy = 0;
  for (const auto& p : points) {
    if (!(p.n > 0.0) || !(p.y > 0.0)) throw std::invalid_argument("fit_scaling: values must be positive");
    sx += std::log10(p.n);
    sy += std::log10(p.y);
  }
  const double m = static_cast<double>(points.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    const double dx = std::log10(p.n) - mx;
    const double dy = std::log10(p.y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_scaling: all sizes are equal");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (const auto& p : points) {
    const double r = std::log10(p.y) - (fit.intercept + fit.slope * std::log10(p.n));
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

struct DeviceProfile {
  std::string name;
  double luts = 0;
  double flip_flops = 0;
  double dsps = 0;
  double brams = 0;
};

/// Zynq-7020 capacities, back-computed from reported usage/percentage pairs.
inline DeviceProfile zynq7020() { return {"zynq-7020", 53200, 106400, 220, 140}; }

/// usage = fixed + sum of coefficient * element count.
struct LinearCost {
  double fixed = 0;
  double per_oscillator = 0;
  double per_coupling_element = 0;
  double per_adder = 0;
  double per_mac_unit = 0;
  double per_mux_input = 0;
  double per_memory_bit = 0;

  double operator()(const ResourceCounts& c) const {
    return fixed + per_oscillator * static_cast<double>(c.oscillators) +
           per_coupling_element * static_cast<double>(c.coupling_elements) +
           per_adder * static_cast<double>(c.adders) + per_mac_unit * static_cast<double>(c.mac_units) +
           per_mux_input * static_cast<double>(c.mux_inputs) +
           per_memory_bit * static_cast<double>(c.memory_bits);
  }
};

struct CostCalibration {
  LinearCost luts;
  LinearCost flip_flops;
  LinearCost dsps;
  LinearCost brams;
};

/// Single-point calibration: per-oscillator costs matching the hybrid design
/// at 506 oscillators (41547 LUT, 44748 FF, 220 DSP, 140 BRAM).
inline CostCalibration hybrid_calibration() {
  CostCalibration c;
  c.luts.per_oscillator = 41547.0 / 506.0;
  c.flip_flops.per_oscillator = 44748.0 / 506.0;
  c.dsps.per_mac_unit = 220.0 / 506.0;
  c.brams.per_oscillator = 140.0 / 506.0;
  return c;
}

/// Single-point calibration: the recurrent design at 48 oscillators
/// (49441 LUT over its adders, 13906 FF over its coupling elements).
inline CostCalibration recurrent_calibration() {
  CostCalibration c;
  c.luts.per_adder = 49441.0 / (48.0 * 47.0);
  c.flip_flops.per_coupling_element = 13906.0 / (48.0 * 48.0);
  return c;
}

inline CostCalibration default_calibration(Architecture arch) {
  return arch == Architecture::Hybrid ? hybrid_calibration() : recurrent_calibration();
}

struct TradeoffPoint {
  std::uint64_t n = 0;
  ResourceCounts counts;
  double oscillation_hz = 0;
  double lut_percent = 0;
  double ff_percent = 0;
  double dsp_percent = 0;
  double bram_percent = 0;
  double area_percent = 0;  // mean of the four utilization percentages
  double freq_percent = 0;  // of the highest frequency in the range
  bool exceeds_capacity = false;
};

struct Crossover {
  double n = 0;
  double area_percent = 0;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  std::optional<Crossover> crossover;
};

struct TradeoffSpec {
  Architecture architecture = Architecture::Hybrid;
  int weight_bits = 5;
  int phase_bits = 4;
  double logic_hz = 50e6;
  double overhead_divisor = 1.0;
};

inline double percent_of(double used, double capacity) {
  return capacity > 0 ? 100.0 * used / capacity : 0.0;
}

inline TradeoffCurve area_frequency_tradeoff(const TradeoffSpec& spec, const DeviceProfile& profile,
                                             const CostCalibration& cal, std::span<const std::uint64_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("area_frequency_tradeoff: empty size range");
  if (!(profile.luts > 0 && profile.flip_flops > 0 && profile.dsps > 0 && profile.brams > 0))
    throw std::invalid_argument("area_frequency_tradeoff: device capacities must be positive");

  TradeoffCurve curve;
  double f_max = 0;
  for (auto n : sizes) {
    if (n == 0) throw std::invalid_argument("area_frequency_tradeoff: sizes must be >= 1");
    TradeoffPoint pt;
    pt.n = n;
    pt.counts = count_elements(spec.architecture, n, spec.weight_bits, spec.phase_bits);
    pt.oscillation_hz =
        oscillation_frequency(spec.architecture, n, spec.phase_bits, spec.logic_hz, spec.overhead_divisor);
    pt.lut_percent = percent_of(cal.luts(pt.counts), profile.luts);
    pt.ff_percent = percent_of(cal.flip_flops(pt.counts), profile.flip_flops);
    pt.dsp_percent = percent_of(cal.dsps(pt.counts), profile.dsps);
    pt.bram_percent = percent_of(cal.brams(pt.counts), profile.brams);
    pt.area_percent = (pt.lut_percent + pt.ff_percent + pt.dsp_percent + pt.bram_percent) / 4.0;
    pt.exceeds_capacity =
        pt.lut_percent > 100 || pt.ff_percent > 100 || pt.dsp_percent > 100 || pt.bram_percent > 100;
    f_max = std::max(f_max, pt.oscillation_hz);
    curve.points.push_back(pt);
  }
  for (auto& pt : curve.points) pt.freq_percent = 100.0 * pt.oscillation_hz / f_max;

  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    const double da = a.area_percent - a.freq_percent;
    const double db = b.area_percent - b.freq_percent;
    if (da == 0.0) {
      curve.crossover = Crossover{static_cast<double>(a.n), a.area_percent};
      break;
    }
    if ((da < 0) != (db < 0) || db == 0.0) {
      const double t = da / (da - db);
      curve.crossover = Crossover{static_cast<double>(a.n) + t * static_cast<double>(b.n - a.n),
                                  a.area_percent + t * (b.area_percent - a.area_percent)};
      break;
    }
  }
  return curve;
}

inline std::vector<std::uint64_t> powers_of_two(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi && n != 0; n *= 2) out.push_back(n);
  return out;
}

}  // namespace onn
