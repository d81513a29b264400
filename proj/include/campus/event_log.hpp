#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "campus/engine.hpp"

namespace campus::engine {

using ordered_json = nlohmann::ordered_json;

// Wire form of actions: {"type": "move-step", "to": "c14"}, {"type": "grab", "item": "pen"}, ...
ordered_json action_to_json(const Action& action);
// Throws std::invalid_argument on unknown types or missing fields.
Action action_from_json(const nlohmann::json& j);

ordered_json event_to_json(const Event& event);
Event event_from_json(const nlohmann::json& j);

ordered_json config_to_json(const SessionConfig& config);
// Applies the fields present in `j` on top of `base`, then validates.
SessionConfig config_from_json(const nlohmann::json& j, SessionConfig base = {});

// Append-only session log. Serialized as newline-delimited JSON: one header
// record echoing the session setup, then one record per event.
class EventLog {
 public:
  EventLog() = default;
  EventLog(const SessionState& initial, const SessionConfig& requested_config);

  void append(const Event& event);
  void append(const std::vector<Event>& events);

  const ordered_json& header() const { return header_; }
  const std::vector<Event>& events() const { return events_; }

  std::string to_ndjson() const;
  static EventLog from_ndjson(std::string_view text);

  // FNV-1a over the serialized log, as 16 hex digits.
  std::string digest() const;

 private:
  ordered_json header_;
  std::vector<Event> events_;
};

// Actions and the ticks at which they were applied; seed plus trace fully
// determines the event log.
struct TraceEntry {
  std::int64_t tick = 0;
  Action action;
};

struct Trace {
  std::vector<TraceEntry> entries;
  std::int64_t final_tick = 0;
};

// Extracts the action trace from a recorded log.
Trace trace_from_log(const EventLog& log);

// Re-runs a trace on a fresh session. Rejected actions are recorded as they
// were originally (not at all).
EventLog replay(std::shared_ptr<const world::WorldDef> world, const SessionConfig& config,
                std::uint64_t seed, const Trace& trace, const std::string& session_id = {});

}  // namespace campus::engine
