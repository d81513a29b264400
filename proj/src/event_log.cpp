#include "campus/event_log.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace campus::engine {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string need_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

Direction direction_from_string(const std::string& s) {
  if (s == "north") return Direction::North;
  if (s == "south") return Direction::South;
  if (s == "east") return Direction::East;
  if (s == "west") return Direction::West;
  throw std::invalid_argument("unknown direction '" + s + "'");
}

Stage need_stage(const json& j, const char* key) {
  const auto name = need_string(j, key);
  const auto s = stage_from_string(name);
  if (!s) throw std::invalid_argument("unknown stage '" + name + "'");
  return *s;
}

}  // namespace

ordered_json action_to_json(const Action& action) {
  return std::visit(
      overloaded{
          [](const act::MoveStep& a) {
            ordered_json j{{"type", "move-step"}};
            if (const auto* id = std::get_if<std::string>(&a.to)) {
              j["to"] = *id;
            } else {
              j["direction"] = to_string(std::get<Direction>(a.to));
            }
            return j;
          },
          [](const act::Teleport& a) { return ordered_json{{"type", "teleport"}, {"target", a.target}}; },
          [](const act::PressButton& a) { return ordered_json{{"type", "press-button"}, {"button", a.button}}; },
          [](const act::Grab& a) { return ordered_json{{"type", "grab"}, {"item", a.item}}; },
          [](const act::Release& a) { return ordered_json{{"type", "release"}, {"item", a.item}}; },
          [](const act::RequestHelp& a) { return ordered_json{{"type", "request-help"}, {"map", a.map}}; },
          [](const act::ReadSign& a) { return ordered_json{{"type", "read-sign"}, {"sign", a.sign}}; },
          [](const act::EnterBuilding& a) {
            return ordered_json{{"type", "enter-building"}, {"building", a.building}};
          },
          [](const act::ExitBuilding&) { return ordered_json{{"type", "exit-building"}}; },
          [](const act::ClimbStairs& a) {
            return ordered_json{{"type", "climb-stairs"}, {"direction", to_string(a.direction)}};
          },
      },
      action);
}

Action action_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("action must be an object");
  const auto type = need_string(j, "type");
  if (type == "move-step") {
    if (j.contains("to")) return act::MoveStep{need_string(j, "to")};
    return act::MoveStep{direction_from_string(need_string(j, "direction"))};
  }
  if (type == "teleport") return act::Teleport{need_string(j, "target")};
  if (type == "press-button") return act::PressButton{need_string(j, "button")};
  if (type == "grab") return act::Grab{need_string(j, "item")};
  if (type == "release") return act::Release{need_string(j, "item")};
  if (type == "request-help") return act::RequestHelp{need_string(j, "map")};
  if (type == "read-sign") return act::ReadSign{need_string(j, "sign")};
  if (type == "enter-building") return act::EnterBuilding{need_string(j, "building")};
  if (type == "exit-building") return act::ExitBuilding{};
  if (type == "climb-stairs") {
    const auto d = need_string(j, "direction");
    if (d != "up" && d != "down") throw std::invalid_argument("climb direction must be up or down");
    return act::ClimbStairs{d == "up" ? StairDirection::Up : StairDirection::Down};
  }
  throw std::invalid_argument("unknown action type '" + type + "'");
}

ordered_json event_to_json(const Event& event) {
  ordered_json j{{"type", "event"}, {"tick", event.tick}, {"seq", event.seq}, {"session_id", event.session_id}};
  std::visit(overloaded{
                 [&](const Action& a) {
                   j["kind"] = "action";
                   j["action"] = action_to_json(a);
                 },
                 [&](const ev::StageTransition& t) {
                   j["kind"] = "stage-transition";
                   j["from"] = to_string(t.from);
                   j["to"] = to_string(t.to);
                 },
                 [&](const ev::TimerExpired& t) {
                   j["kind"] = "timer-expired";
                   j["stage"] = to_string(t.stage);
                   j["expiry_count"] = t.expiry_count;
                 },
                 [&](const ev::SignRendered& s) {
                   j["kind"] = "sign-rendered";
                   j["sign"] = s.sign;
                   j["text"] = s.text;
                 },
                 [&](const ev::ArrowShown& a) {
                   j["kind"] = "help-arrow";
                   j["from"] = a.from;
                   j["to"] = a.to;
                 },
             },
             event.payload);
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.tick = j.at("tick").get<std::int64_t>();
  e.seq = j.at("seq").get<std::uint64_t>();
  e.session_id = need_string(j, "session_id");
  const auto kind = need_string(j, "kind");
  if (kind == "action") {
    e.payload = action_from_json(j.at("action"));
  } else if (kind == "stage-transition") {
    e.payload = ev::StageTransition{need_stage(j, "from"), need_stage(j, "to")};
  } else if (kind == "timer-expired") {
    e.payload = ev::TimerExpired{need_stage(j, "stage"), j.at("expiry_count").get<int>()};
  } else if (kind == "sign-rendered") {
    e.payload = ev::SignRendered{need_string(j, "sign"), need_string(j, "text")};
  } else if (kind == "help-arrow") {
    e.payload = ev::ArrowShown{need_string(j, "from"), need_string(j, "to")};
  } else {
    throw std::invalid_argument("unknown event kind '" + kind + "'");
  }
  return e;
}

ordered_json config_to_json(const SessionConfig& c) {
  return ordered_json{
      {"seed", c.barrier.seed},
      {"scramble_cadence_ms", c.barrier.scramble_cadence.count()},
      {"swap_probability", c.barrier.swap_probability},
      {"misdirection_rate", c.barrier.misdirection_rate},
      {"agatha_timer_ms", c.agatha_timer.count()},
      {"galileo_timer_ms", c.galileo_timer.count()},
      {"teleport_radius", c.teleport_radius},
      {"reading_radius", c.reading_radius},
  };
}

SessionConfig config_from_json(const json& j, SessionConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  auto number = [&](const char* key) -> const json* {
    const auto it = j.find(key);
    if (it == j.end()) return nullptr;
    if (!it->is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
    return &*it;
  };
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known{"seed",           "scramble_cadence_ms", "swap_probability",
                                             "misdirection_rate", "agatha_timer_ms", "galileo_timer_ms",
                                             "teleport_radius", "reading_radius"};
    if (!known.count(key)) throw std::invalid_argument("unknown config field '" + key + "'");
  }
  if (const auto* v = number("seed")) c.barrier.seed = v->get<std::uint64_t>();
  if (const auto* v = number("scramble_cadence_ms")) c.barrier.scramble_cadence = Millis{v->get<std::int64_t>()};
  if (const auto* v = number("swap_probability")) c.barrier.swap_probability = v->get<double>();
  if (const auto* v = number("misdirection_rate")) c.barrier.misdirection_rate = v->get<double>();
  if (const auto* v = number("agatha_timer_ms")) c.agatha_timer = Millis{v->get<std::int64_t>()};
  if (const auto* v = number("galileo_timer_ms")) c.galileo_timer = Millis{v->get<std::int64_t>()};
  if (const auto* v = number("teleport_radius")) c.teleport_radius = v->get<double>();
  if (const auto* v = number("reading_radius")) c.reading_radius = v->get<double>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

EventLog::EventLog(const SessionState& initial, const SessionConfig& requested_config) {
  header_ = ordered_json{{"type", "header"},
                         {"format", "campus-event-log/1"},
                         {"session_id", initial.session_id},
                         {"seed", initial.seed},
                         {"world", initial.world->id},
                         {"config", config_to_json(requested_config)}};
}

void EventLog::append(const Event& event) { events_.push_back(event); }

void EventLog::append(const std::vector<Event>& events) {
  events_.insert(events_.end(), events.begin(), events.end());
}

std::string EventLog::to_ndjson() const {
  std::string out = header_.dump();
  out += '\n';
  for (const auto& e : events_) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

EventLog EventLog::from_ndjson(std::string_view text) {
  EventLog log;
  bool first = true;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    if (first) {
      if (j.value("type", "") != "header") throw std::invalid_argument("event log must start with a header");
      log.header_ = ordered_json::parse(line);
      first = false;
      continue;
    }
    log.events_.push_back(event_from_json(j));
  }
  if (first) throw std::invalid_argument("empty event log");
  return log;
}

std::string EventLog::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_ndjson())));
  return buf;
}

Trace trace_from_log(const EventLog& log) {
  Trace trace;
  for (const auto& e : log.events()) {
    if (const auto* a = std::get_if<Action>(&e.payload)) trace.entries.push_back({e.tick, *a});
    trace.final_tick = std::max(trace.final_tick, e.tick);
  }
  return trace;
}

EventLog replay(std::shared_ptr<const world::WorldDef> world, const SessionConfig& config,
                std::uint64_t seed, const Trace& trace, const std::string& session_id) {
  SessionState state = new_session(std::move(world), config, seed, session_id);
  EventLog log(state, config);
  std::vector<Event> events;
  for (const auto& entry : trace.entries) {
    advance_ticks(state, entry.tick - state.tick, events);
    apply_action_in_place(state, entry.action, events);
  }
  advance_ticks(state, trace.final_tick - state.tick, events);
  log.append(events);
  return log;
}

}  // namespace campus::engine
