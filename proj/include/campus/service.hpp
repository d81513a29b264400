#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "campus/engine.hpp"
#include "campus/errors.hpp"
#include "campus/event_log.hpp"
#include "campus/survey.hpp"

namespace campus::service {

using nlohmann::json;
using nlohmann::ordered_json;
using Millis = std::chrono::milliseconds;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  Millis now() const override;
};

class ManualClock final : public Clock {
 public:
  Millis now() const override;
  void advance(Millis dt);

 private:
  mutable std::mutex mutex_;
  Millis now_{0};
};

// Failure surfaced to clients. `status` is an HTTP status code.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message, ordered_json details = nullptr)
      : Error(message), status_(status), code_(std::move(code)), details_(std::move(details)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const ordered_json& details() const noexcept { return details_; }
  ordered_json to_json() const;

 private:
  int status_;
  std::string code_;
  ordered_json details_;
};

struct Delta {
  std::uint64_t seq = 0;
  std::int64_t tick = 0;
  bool terminal = false;
  ordered_json snapshot;
};

ordered_json delta_to_json(const Delta& d);

struct CreateRequest {
  std::string world = "default";
  json config = json::object();  // overrides, same keys as the event log header config
  std::optional<std::uint64_t> seed;
  std::optional<std::string> client_id;
};

struct Created {
  std::string session_id;
  std::uint64_t seed = 0;
  ordered_json snapshot;
};

struct ServiceOptions {
  std::shared_ptr<Clock> clock;            // SteadyClock when null
  std::optional<std::filesystem::path> data_dir;  // survey dataset and finished event logs
  Millis idle_timeout{30 * 60 * 1000};
  std::size_t delta_history = 4096;        // deltas retained per session
};

// Thread-safe session host. Simulated time follows the service clock at
// 100 ms per tick; sessions catch up lazily whenever they are touched, which
// is observationally the same as ticking in the background.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});
  ~SessionService();

  void add_world(std::string id, std::shared_ptr<const world::WorldDef> world);
  std::vector<std::string> world_ids() const;
  ordered_json world_layout(const std::string& world_id) const;

  Created create_session(const CreateRequest& request);
  ordered_json get_state(const std::string& session_id);
  ordered_json submit_action(const std::string& session_id, const json& action);

  // Deltas with seq > after, oldest first.
  std::vector<Delta> deltas_since(const std::string& session_id, std::uint64_t after);
  // Blocks until a delta newer than `after` exists or the timeout passes.
  std::vector<Delta> wait_deltas(const std::string& session_id, std::uint64_t after, Millis timeout);

  std::string event_log(const std::string& session_id);

  const survey::Instrument& instrument() const { return *instrument_; }
  ordered_json submit_survey(const std::optional<std::string>& session_id, const json& answers);
  std::vector<survey::Response> survey_responses() const;

  ordered_json list_sessions();
  // Drops sessions idle longer than the timeout; returns how many were removed.
  std::size_t reap_idle();

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& session_id);
  void sync(Session& s);
  void record(Session& s, std::vector<engine::Event>& events, bool force);
  void persist_log(Session& s) const;

  ServiceOptions options_;
  std::shared_ptr<const survey::Instrument> instrument_;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const world::WorldDef>> worlds_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::string> client_sessions_;
  std::uint64_t created_count_ = 0;

  mutable std::mutex survey_mutex_;
  std::vector<survey::Response> responses_;
  std::set<std::string> surveyed_sessions_;
};

}  // namespace campus::service
