#pragma once

// Command-line front end: train, run, bench, scale, serve.
//
// Settings are resolved as built-in defaults, then --config, then flags. The
// effective settings are echoed as '#'-prefixed lines before any other output
// so each report carries everything needed to reproduce it.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "onn/cost_model.hpp"
#include "onn/engine.hpp"
#include "onn/io.hpp"
#include "onn/service.hpp"
#include "onn/tasks.hpp"
#include "onn/training.hpp"

#ifndef ONN_DATA_DIR
#define ONN_DATA_DIR "data"
#endif

namespace onn::cli {

inline const char* const kDefaultDatasets[] = {"3x3", "5x4", "7x6", "10x10", "22x22"};

struct Flags {
  std::string config_path;
  std::optional<std::string> arch;
  std::optional<std::string> hybrid_mode;
  std::optional<int> phase_bits;
  std::optional<int> weight_bits;
  std::optional<std::size_t> trials;
  std::optional<std::string> levels;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_periods;
  unsigned parallel = 1;
  std::string trace_path;
  std::string out_dir;
  bool allow_unstable = false;
  bool random_offset = false;
};

inline Settings resolve(const Flags& f) {
  Settings s;
  if (!f.config_path.empty()) s = read_settings_file(f.config_path, s);
  if (f.arch) s.network.architecture = parse_architecture(*f.arch);
  if (f.hybrid_mode) s.network.hybrid_sampling = parse_hybrid_sampling(*f.hybrid_mode);
  if (f.phase_bits) s.network.phase_bits = *f.phase_bits;
  if (f.weight_bits) s.network.weight_bits = *f.weight_bits;
  if (f.trials) s.trials = *f.trials;
  if (f.levels) s.levels = parse_levels(*f.levels);
  if (f.seed) s.seed = *f.seed;
  if (f.max_periods) s.settle.max_periods = *f.max_periods;
  return s;
}

inline void echo(std::ostream& out, const std::string& command, const Settings& s,
                 const std::vector<std::string>& extra = {}) {
  out << "# command = " << command << '\n';
  std::istringstream lines(format_settings(s));
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  for (const auto& e : extra) out << "# " << e << '\n';
}

inline std::filesystem::path dataset_path(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  const auto builtin = std::filesystem::path(ONN_DATA_DIR) / "letters" / arg;
  if (std::filesystem::exists(builtin)) return builtin;
  throw ParseError("dataset '" + arg + "' not found");
}

inline std::string stability_report(const TrainedNetwork& net, const Dataset& ds) {
  std::ostringstream os;
  os << "training: " << (net.training.converged ? "converged" : "NOT converged") << " after "
     << net.training.epochs << " epochs, " << net.training.updates << " updates\n";
  os << "quantization scale: " << format_double(net.quantization.scale) << '\n';
  const auto& bad = net.quantization.unstable_patterns;
  for (std::size_t k = 0; k < ds.patterns.size(); ++k) {
    const bool stable = std::find(bad.begin(), bad.end(), k) == bad.end();
    os << "pattern " << k << ": " << (stable ? "stable" : "UNSTABLE") << '\n';
  }
  return os.str();
}

inline int cmd_train(const Flags& f, const std::string& dataset_arg, std::ostream& out) {
  auto s = resolve(f);
  const auto ds = read_dataset(dataset_path(dataset_arg));
  s.network.n_oscillators = ds.width() * ds.height();
  validate_config(s.network);
  echo(out, "train", s, {"dataset = " + ds.name});
  const auto net = train_network(ds, s.network.weight_bits, s.training);
  out << stability_report(net, ds);
  const auto csv = format_weights_csv(net.weights);
  if (f.out_dir.empty()) {
    out << csv;
  } else {
    std::filesystem::create_directories(f.out_dir);
    const auto path = std::filesystem::path(f.out_dir) / "weights.csv";
    write_file(path, csv);
    out << "weights: " << path.string() << '\n';
  }
  const bool clean = net.training.converged && net.quantization.unstable_patterns.empty();
  return clean || f.allow_unstable ? 0 : 2;
}

inline int cmd_run(const Flags& f, const std::string& weights_path, const std::string& pattern_path,
                   std::uint32_t startup_offset, std::ostream& out) {
  auto s = resolve(f);
  const auto probe = read_pattern_file(pattern_path);
  s.network.n_oscillators = probe.size();
  validate_config(s.network);
  echo(out, "run", s, {"startup_offset_ticks = " + std::to_string(startup_offset)});
  auto weights = read_weights_file(weights_path, s.network.weight_bits);
  if (weights.size() != probe.size())
    throw ShapeError("weights are " + std::to_string(weights.size()) + "x" + std::to_string(weights.size()) +
                     " but the pattern has " + std::to_string(probe.size()) + " pixels");
  EngineOptions options;
  options.startup_offset_ticks = startup_offset;
  Engine engine(s.network, std::move(weights), pattern_to_phases(probe, s.network.phase_bits), options);
  PhaseTrace trace(s.settle.max_periods);
  const auto outcome = run_until_settled(engine, s.settle, &trace);
  out << (outcome.settled ? "settled" : "timeout") << " cycles=" << outcome.cycles_to_settle
      << " frames=" << trace.frames().size() << '\n';
  out << format_pattern(phases_to_pattern(outcome.final_phases, s.network.phase_bits, probe.width, probe.height));
  if (!f.trace_path.empty()) write_file(f.trace_path, format_trace(s.network, trace));
  return 0;
}

inline int cmd_bench(const Flags& f, std::vector<std::string> datasets, std::ostream& out) {
  const auto s = resolve(f);
  if (datasets.empty()) datasets.assign(std::begin(kDefaultDatasets), std::end(kDefaultDatasets));
  const unsigned threads = f.parallel == 0 ? std::max(1u, std::thread::hardware_concurrency()) : f.parallel;
  std::vector<std::string> extra{"random_startup_offset = " + std::string(f.random_offset ? "true" : "false")};
  std::string names;
  for (const auto& d : datasets) names += (names.empty() ? "" : ",") + d;
  extra.push_back("datasets = " + names);
  echo(out, "bench", s, extra);

  std::vector<RetrievalReport> reports;
  for (const auto& d : datasets) {
    auto ds = read_dataset(dataset_path(d));
    BenchmarkSpec spec;
    spec.levels = s.levels;
    spec.trials = s.trials;
    spec.config = s.network;
    spec.training = s.training;
    spec.settle = s.settle;
    spec.master_seed = s.seed;
    spec.random_startup_offset = f.random_offset;
    spec.threads = threads;
    reports.push_back(run_benchmark(ds, spec));
    const auto& r = reports.back();
    if (!r.training_converged || !r.quantization.unstable_patterns.empty())
      out << "# warning: " << r.dataset << " has unstable stored patterns\n";
    if (!f.out_dir.empty()) {
      std::filesystem::create_directories(f.out_dir);
      write_file(std::filesystem::path(f.out_dir) / ("bench_" + r.dataset + ".csv"), report_csv(r));
    }
  }
  out << report_table(reports);
  return 0;
}

inline DeviceProfile read_profile(const std::string& path) {
  auto p = zynq7020();
  if (path.empty()) return p;
  p.name = std::filesystem::path(path).stem().string();
  std::size_t lineno = 0;
  for (const auto& raw : detail::split_lines(detail::read_file(path))) {
    ++lineno;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("profile line " + std::to_string(lineno) + ": expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto v = detail::parse_double(detail::trim(line.substr(eq + 1)), key);
    if (key == "luts") p.luts = v;
    else if (key == "flip_flops") p.flip_flops = v;
    else if (key == "dsps") p.dsps = v;
    else if (key == "brams") p.brams = v;
    else throw ParseError("unknown profile key '" + std::string(key) + "'");
  }
  return p;
}

inline int cmd_scale(const Flags& f, std::uint64_t lo, std::uint64_t hi, const std::string& profile_path,
                     double overhead, std::ostream& out) {
  const auto s = resolve(f);
  if (lo < 1 || hi < lo) throw ParseError("scale: need 1 <= min <= max");
  const auto profile = read_profile(profile_path);
  echo(out, "scale", s,
       {"range = " + std::to_string(lo) + ".." + std::to_string(hi), "profile = " + profile.name,
        "overhead_divisor = " + format_double(overhead)});
  const auto sizes = powers_of_two(lo, hi);
  TradeoffSpec spec{s.network.architecture, s.network.weight_bits, s.network.phase_bits,
                    s.network.logic_frequency_hz, overhead};
  const auto curve = area_frequency_tradeoff(spec, profile, default_calibration(spec.architecture), sizes);

  std::ostringstream csv;
  csv << "n,oscillators,coupling_elements,memory_cells,adders,mac_units,mux_inputs,f_osc_hz,"
         "lut_pct,ff_pct,dsp_pct,bram_pct,area_pct,freq_pct,over_capacity\n";
  for (const auto& p : curve.points) {
    const auto& c = p.counts;
    csv << p.n << ',' << c.oscillators << ',' << c.coupling_elements << ',' << c.memory_cells << ','
        << c.adders << ',' << c.mac_units << ',' << c.mux_inputs << ',' << format_fixed(p.oscillation_hz, 3)
        << ',' << format_fixed(p.lut_percent, 4) << ',' << format_fixed(p.ff_percent, 4) << ','
        << format_fixed(p.dsp_percent, 4) << ',' << format_fixed(p.bram_percent, 4) << ','
        << format_fixed(p.area_percent, 4) << ',' << format_fixed(p.freq_percent, 4) << ','
        << (p.exceeds_capacity ? 1 : 0) << '\n';
  }
  out << csv.str();
  if (sizes.size() >= 2) {
    std::vector<ScalingPoint> adders, memory;
    for (const auto& p : curve.points) {
      adders.push_back({static_cast<double>(p.n), static_cast<double>(p.counts.adders)});
      memory.push_back({static_cast<double>(p.n), static_cast<double>(p.counts.memory_cells)});
    }
    // Recurrent adder counts are zero at N = 1; the fit needs positive data.
    if (lo >= 2 || spec.architecture == Architecture::Hybrid) {
      const auto fa = fit_scaling(adders);
      out << "# adders slope = " << format_fixed(fa.slope, 4) << " r2 = " << format_fixed(fa.r_squared, 6) << '\n';
    }
    const auto fm = fit_scaling(memory);
    out << "# memory_cells slope = " << format_fixed(fm.slope, 4) << " r2 = " << format_fixed(fm.r_squared, 6)
        << '\n';
  }
  if (curve.crossover)
    out << "# crossover n = " << format_fixed(curve.crossover->n, 2)
        << " area_pct = " << format_fixed(curve.crossover->area_percent, 2) << '\n';
  else
    out << "# crossover none\n";
  if (!f.out_dir.empty()) {
    std::filesystem::create_directories(f.out_dir);
    write_file(std::filesystem::path(f.out_dir) / (std::string("scale_") + to_string(spec.architecture) + ".csv"),
               csv.str());
  }
  return 0;
}

inline int cmd_serve(const std::string& bind, int port, std::size_t cap, std::ostream& out) {
  Service service(ServiceOptions{cap});
  httplib::Server server;
  service.mount(server);
  out << "# listening on " << bind << ':' << port << std::endl;
  if (!server.listen(bind, port)) throw std::runtime_error("cannot listen on " + bind + ":" + std::to_string(port));
  return 0;
}

inline std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

/// Parses and dispatches. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Digital oscillatory neural network emulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_path, "Settings file (key = value lines)")->check(CLI::ExistingFile);
  app.add_option("--arch", f.arch, "Architecture: recurrent | hybrid")->check(CLI::IsMember({"recurrent", "hybrid"}));
  app.add_option("--hybrid-mode", f.hybrid_mode, "Hybrid sum sampling: pipelined | aligned")
      ->check(CLI::IsMember({"pipelined", "aligned"}));
  app.add_option("--phase-bits", f.phase_bits, "Phase resolution p (period 2^p ticks)");
  app.add_option("--weight-bits", f.weight_bits, "Signed weight width b");
  app.add_option("--trials", f.trials, "Trials per pattern and corruption level");
  app.add_option("--levels", f.levels, "Comma-separated corruption fractions");
  app.add_option("--seed", f.seed, "Master seed");
  app.add_option("--max-periods", f.max_periods, "Settle timeout in oscillation periods");
  app.add_option("--parallel", f.parallel, "Benchmark worker threads (0 = all cores)");
  app.add_option("--trace", f.trace_path, "Write the period-sampled phase trace to this file");
  app.add_option("--out", f.out_dir, "Output directory");
  app.add_flag("--allow-unstable", f.allow_unstable, "Exit 0 even if training leaves unstable patterns");
  app.add_flag("--random-offset", f.random_offset, "Random coupling start offset per trial");

  auto* train = app.add_subcommand("train", "Train and quantize weights for a dataset");
  std::string train_dataset;
  train->add_option("dataset", train_dataset, "Dataset directory, file, or built-in name")->required();

  auto* runc = app.add_subcommand("run", "Single retrieval from an initial pattern");
  std::string weights_path, pattern_path;
  std::uint32_t startup_offset = 0;
  runc->add_option("--weights", weights_path, "Weight CSV")->required()->check(CLI::ExistingFile);
  runc->add_option("pattern", pattern_path, "Initial pattern file")->required()->check(CLI::ExistingFile);
  runc->add_option("--startup-offset", startup_offset, "Ticks of free running before coupling starts");

  auto* bench = app.add_subcommand("bench", "Retrieval accuracy benchmark");
  std::vector<std::string> datasets;
  bench->add_option("datasets", datasets, "Datasets (default: all built-in letter sets)");

  auto* scale = app.add_subcommand("scale", "Element counts and area/frequency curves");
  std::uint64_t lo = 8, hi = 512;
  std::string profile_path;
  double overhead = 1.0;
  scale->add_option("--min", lo, "Smallest N (powers of two from here)");
  scale->add_option("--max", hi, "Largest N");
  scale->add_option("--profile", profile_path, "Device profile file (luts, flip_flops, dsps, brams)")
      ->check(CLI::ExistingFile);
  scale->add_option("--overhead-divisor", overhead, "Extra frequency divisor")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "HTTP service");
  std::string bind = env_or("ONN_BIND", "127.0.0.1");
  int port = std::stoi(env_or("ONN_PORT", "8080"));
  std::size_t cap = 484;
  serve->add_option("--bind", bind, "Bind address (env ONN_BIND)");
  serve->add_option("--port", port, "Port (env ONN_PORT)")->check(CLI::Range(0, 65535));
  serve->add_option("--max-oscillators", cap, "Largest accepted pattern size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train) return cmd_train(f, train_dataset, out);
    if (*runc) return cmd_run(f, weights_path, pattern_path, startup_offset, out);
    if (*bench) return cmd_bench(f, datasets, out);
    if (*scale) return cmd_scale(f, lo, hi, profile_path, overhead, out);
    if (*serve) return cmd_serve(bind, port, cap, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"onn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace onn::cli
