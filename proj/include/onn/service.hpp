#pragma once

// HTTP/JSON facade over training and retrieval.
//
// Wire format (all bodies JSON; a pattern is an array of rows, each row an
// array of 0/1 integers, 1 = black):
//
//   POST /sessions
//     {"patterns": [pattern, ...],
//      "config": {"architecture": "hybrid", "hybrid_sampling": "aligned",
//                 "weight_bits": 5, "phase_bits": 4, "max_periods": 1000,
//                 "stability_window": 3, ...}}            config is optional
//     -> 200 {"id", "config", "training": {"converged", "epochs"},
//             "patterns": [{"index", "stable"}], "stable"}
//     400 malformed or mixed sizes, 413 more oscillators than the cap
//
//   POST /sessions/{id}/retrieve
//     {"pattern": pattern, "options": {"startup_offset_ticks": 0,
//                                      "max_periods": 1000}}
//     -> 200 {"trace_id", "settled", "timed_out", "cycles_to_settle",
//             "frames", "decoded": pattern, "match": index or null}
//     400 malformed, 404 unknown session, 409 pattern size differs
//
//   GET /sessions/{id}/traces/{tid}
//     text/event-stream: one "frame" event per period
//       {"period", "phases": relative phases, "pattern": decoded}
//     then one "summary" event carrying the retrieve response. 404 if gone.
//
//   POST /corrupt
//     {"pattern": pattern, "fraction": 0.25, "seed": 7}
//     -> 200 {"pattern": corrupted, "flipped": [row-major indices]}
//
//   GET /healthz -> 200 {"status": "ok"}

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "onn/engine.hpp"
#include "onn/io.hpp"
#include "onn/tasks.hpp"
#include "onn/types.hpp"

namespace onn {

struct ServiceOptions {
  std::size_t max_oscillators = 484;
  std::size_t history = 32;  // traces retained per session
  std::size_t max_periods_cap = 100000;
};

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

namespace detail {

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

inline BinaryPattern pattern_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw HttpError(400, "pattern must be a non-empty array of rows");
  const auto height = j.size();
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) throw HttpError(400, "pattern rows must be non-empty arrays");
    if (width == 0) width = row.size();
    if (row.size() != width) throw HttpError(400, "pattern rows differ in length");
    for (const auto& v : row) {
      if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
        throw HttpError(400, "pattern cells must be 0 or 1");
      pixels.push_back(static_cast<std::uint8_t>(v.get<int>()));
    }
  }
  return BinaryPattern(width, height, std::move(pixels));
}

inline nlohmann::json pattern_to_json(const BinaryPattern& p) {
  auto rows = nlohmann::json::array();
  for (std::size_t y = 0; y < p.height; ++y) {
    auto row = nlohmann::json::array();
    for (std::size_t x = 0; x < p.width; ++x) row.push_back(p.at(x, y));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json config_to_json(const Settings& s) {
  return {{"architecture", to_string(s.network.architecture)},
          {"hybrid_sampling", to_string(s.network.hybrid_sampling)},
          {"n_oscillators", s.network.n_oscillators},
          {"weight_bits", s.network.weight_bits},
          {"phase_bits", s.network.phase_bits},
          {"logic_frequency_hz", s.network.logic_frequency_hz},
          {"max_periods", s.settle.max_periods},
          {"stability_window", s.settle.stability_window},
          {"stability_threshold", s.training.stability_threshold},
          {"max_epochs", s.training.max_epochs}};
}

inline std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw HttpError(400, "config values must be strings or numbers");
}

}  // namespace detail

class Service {
 public:
  explicit Service(ServiceOptions options = {}) : options_(options) {}

  HttpReply create_session(const std::string& body) {
    return guarded([&] {
      const auto req = parse(body);
      if (!req.contains("patterns") || !req["patterns"].is_array() || req["patterns"].empty())
        throw detail::HttpError(400, "'patterns' must be a non-empty array");

      Dataset ds;
      ds.name = "session";
      for (const auto& p : req["patterns"]) ds.patterns.push_back(detail::pattern_from_json(p));
      for (const auto& p : ds.patterns)
        if (p.width != ds.width() || p.height != ds.height())
          throw detail::HttpError(400, "patterns differ in size");
      const auto n = ds.width() * ds.height();
      if (n > options_.max_oscillators)
        throw detail::HttpError(413, std::to_string(n) + " oscillators exceed the cap of " +
                                         std::to_string(options_.max_oscillators));

      Settings settings;
      if (req.contains("config")) {
        if (!req["config"].is_object()) throw detail::HttpError(400, "'config' must be an object");
        for (const auto& [key, value] : req["config"].items()) {
          try {
            apply_setting(settings, key, detail::scalar_text(value));
          } catch (const ParseError& e) {
            throw detail::HttpError(400, e.what());
          }
        }
      }
      settings.network.n_oscillators = n;
      try {
        validate_config(settings.network);
      } catch (const ConfigError& e) {
        throw detail::HttpError(400, e.what());
      }
      check_settle(settings.settle);

      auto session = std::make_shared<Session>();
      session->settings = settings;
      session->dataset = ds;
      session->net = train_network(ds, settings.network.weight_bits, settings.training);

      nlohmann::json out;
      {
        std::lock_guard lock(registry_mutex_);
        session->id = "s" + std::to_string(++session_counter_);
        sessions_[session->id] = session;
      }
      out["id"] = session->id;
      out["config"] = detail::config_to_json(settings);
      out["training"] = {{"converged", session->net.training.converged},
                         {"epochs", session->net.training.epochs}};
      auto pats = nlohmann::json::array();
      const auto& unstable = session->net.quantization.unstable_patterns;
      for (std::size_t k = 0; k < ds.patterns.size(); ++k) {
        const bool stable = std::find(unstable.begin(), unstable.end(), k) == unstable.end();
        pats.push_back({{"index", k}, {"stable", stable}});
      }
      out["patterns"] = pats;
      out["stable"] = unstable.empty() && session->net.training.converged;
      return HttpReply{200, out.dump()};
    });
  }

  HttpReply retrieve(const std::string& session_id, const std::string& body) {
    return guarded([&] {
      auto session = find(session_id);
      const auto req = parse(body);
      if (!req.contains("pattern")) throw detail::HttpError(400, "'pattern' is required");
      const auto probe = detail::pattern_from_json(req["pattern"]);
      const auto& ds = session->dataset;
      if (probe.width != ds.width() || probe.height != ds.height())
        throw detail::HttpError(409, "pattern is " + std::to_string(probe.height) + "x" +
                                         std::to_string(probe.width) + " but the session stores " +
                                         std::to_string(ds.height()) + "x" + std::to_string(ds.width()));

      auto criteria = session->settings.settle;
      EngineOptions engine_options;
      if (req.contains("options")) {
        const auto& o = req["options"];
        if (!o.is_object()) throw detail::HttpError(400, "'options' must be an object");
        for (const auto& [key, value] : o.items()) {
          if (!value.is_number_unsigned()) throw detail::HttpError(400, "option '" + key + "' must be >= 0");
          if (key == "startup_offset_ticks")
            engine_options.startup_offset_ticks = value.get<std::uint32_t>();
          else if (key == "max_periods")
            criteria.max_periods = value.get<std::size_t>();
          else if (key == "stability_window")
            criteria.stability_window = value.get<std::size_t>();
          else
            throw detail::HttpError(400, "unknown option '" + key + "'");
        }
      }
      check_settle(criteria);

      const auto& config = session->settings.network;
      Engine engine(config, session->net.weights, pattern_to_phases(probe, config.phase_bits),
                    std::move(engine_options));
      PhaseTrace trace(criteria.max_periods);
      const auto outcome = run_until_settled(engine, criteria, &trace);
      const auto decoded = phases_to_pattern(outcome.final_phases, config.phase_bits, ds.width(), ds.height());

      nlohmann::json out;
      out["settled"] = outcome.settled;
      out["timed_out"] = outcome.timed_out;
      out["cycles_to_settle"] = outcome.cycles_to_settle;
      out["frames"] = trace.frames().size();
      out["decoded"] = detail::pattern_to_json(decoded);
      out["match"] = nullptr;
      for (std::size_t k = 0; k < ds.patterns.size(); ++k)
        if (judge(decoded, ds.patterns[k])) {
          out["match"] = k;
          break;
        }

      std::lock_guard lock(session->mutex);
      const auto tid = "t" + std::to_string(++session->trace_counter);
      out["trace_id"] = tid;
      session->traces.push_back({tid, std::move(trace), out});
      while (session->traces.size() > options_.history) session->traces.pop_front();
      return HttpReply{200, out.dump()};
    });
  }

  HttpReply trace_events(const std::string& session_id, const std::string& trace_id) {
    return guarded([&] {
      auto session = find(session_id);
      std::lock_guard lock(session->mutex);
      for (const auto& t : session->traces) {
        if (t.id != trace_id) continue;
        const auto& config = session->settings.network;
        const auto& ds = session->dataset;
        std::ostringstream os;
        std::size_t period = 0;
        for (const auto& frame : t.trace.frames()) {
          const auto ref = static_cast<std::int64_t>(frame.front().index());
          auto phases = nlohmann::json::array();
          for (auto ph : frame) phases.push_back(PhaseIndex(ph.index() - ref, config.phase_bits).index());
          const auto decoded = phases_to_pattern(frame, config.phase_bits, ds.width(), ds.height());
          const nlohmann::json j{{"period", period++}, {"phases", phases},
                                 {"pattern", detail::pattern_to_json(decoded)}};
          os << "event: frame\ndata: " << j.dump() << "\n\n";
        }
        os << "event: summary\ndata: " << t.summary.dump() << "\n\n";
        return HttpReply{200, os.str(), "text/event-stream"};
      }
      throw detail::HttpError(404, "unknown trace '" + trace_id + "'");
    });
  }

  HttpReply corrupt_pattern(const std::string& body) {
    return guarded([&] {
      const auto req = parse(body);
      if (!req.contains("pattern")) throw detail::HttpError(400, "'pattern' is required");
      const auto pattern = detail::pattern_from_json(req["pattern"]);
      const auto fraction = req.value("fraction", 0.0);
      const auto seed = req.value("seed", std::uint64_t{0});
      if (!(fraction >= 0.0 && fraction <= 1.0)) throw detail::HttpError(400, "fraction outside [0, 1]");
      const auto flipped = corruption_positions(pattern.size(), CorruptionSpec{fraction, seed});
      nlohmann::json out;
      out["pattern"] = detail::pattern_to_json(flip_positions(pattern, flipped));
      out["flipped"] = flipped;
      return HttpReply{200, out.dump()};
    });
  }

  static HttpReply health() { return {200, R"({"status":"ok"})"}; }

  /// Registers all routes on an httplib server.
  void mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpReply& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get("/healthz", [send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
    server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, create_session(req.body));
    });
    server.Post(R"(/sessions/([^/]+)/retrieve)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, retrieve(req.matches[1], req.body));
    });
    server.Get(R"(/sessions/([^/]+)/traces/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, trace_events(req.matches[1], req.matches[2]));
    });
    server.Post("/corrupt", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, corrupt_pattern(req.body));
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }

  std::size_t session_count() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
  }

 private:
  struct StoredTrace {
    std::string id;
    PhaseTrace trace;
    nlohmann::json summary;
  };

  struct Session {
    std::string id;
    Settings settings;
    Dataset dataset;
    TrainedNetwork net;
    std::mutex mutex;
    std::uint64_t trace_counter = 0;
    std::deque<StoredTrace> traces;
  };

  template <class F>
  static HttpReply guarded(F&& f) {
    try {
      return f();
    } catch (const detail::HttpError& e) {
      return error(e.status(), e.what());
    } catch (const nlohmann::json::exception& e) {
      return error(400, e.what());
    } catch (const std::invalid_argument& e) {
      return error(400, e.what());
    } catch (const std::exception& e) {
      return error(500, e.what());
    }
  }

  static HttpReply error(int status, const std::string& message) {
    return {status, nlohmann::json{{"error", message}}.dump()};
  }

  static nlohmann::json parse(const std::string& body) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw detail::HttpError(400, "body must be a JSON object");
    return j;
  }

  void check_settle(const SettleCriteria& c) const {
    if (c.stability_window < 1 || c.max_periods < c.stability_window || c.max_periods > options_.max_periods_cap)
      throw detail::HttpError(400, "need 1 <= stability_window <= max_periods <= " +
                                       std::to_string(options_.max_periods_cap));
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(registry_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw detail::HttpError(404, "unknown session '" + id + "'");
    return it->second;
  }

  ServiceOptions options_;
  mutable std::mutex registry_mutex_;
  std::uint64_t session_counter_ = 0;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace onn
