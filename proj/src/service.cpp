#include "campus/service.hpp"

#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include "campus/snapshot.hpp"

namespace campus::service {

Millis SteadyClock::now() const {
  return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now().time_since_epoch());
}

Millis ManualClock::now() const {
  std::lock_guard lock(mutex_);
  return now_;
}

void ManualClock::advance(Millis dt) {
  std::lock_guard lock(mutex_);
  now_ += dt;
}

ordered_json ServiceError::to_json() const {
  ordered_json j{{"error", code_}, {"message", what()}};
  if (!details_.is_null()) j["details"] = details_;
  return j;
}

ordered_json delta_to_json(const Delta& d) {
  return {{"seq", d.seq}, {"tick", d.tick}, {"terminal", d.terminal}, {"snapshot", d.snapshot}};
}

struct SessionService::Session {
  std::mutex mutex;
  std::condition_variable cv;
  engine::SessionState state;
  engine::EventLog log;
  std::string world_id;
  std::optional<std::string> client_id;
  Millis created_at{0};
  Millis last_activity{0};
  std::deque<Delta> deltas;
  std::uint64_t next_delta = 1;
  ordered_json last_view;
  bool terminal_sent = false;
  bool log_persisted = false;
};

namespace {

std::uint64_t fresh_random() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// The part of a snapshot whose change warrants a delta.
ordered_json comparable_view(ordered_json snap) {
  snap.erase("tick");
  snap.erase("npcs");
  snap.erase("timer");
  return snap;
}

std::filesystem::path survey_path(const std::filesystem::path& dir) { return dir / "survey-responses.csv"; }

}  // namespace

SessionService::SessionService(ServiceOptions options)
    : options_(std::move(options)),
      instrument_(std::shared_ptr<const survey::Instrument>(std::shared_ptr<const survey::Instrument>{},
                                                            &survey::Instrument::bundled())) {
  if (!options_.clock) options_.clock = std::make_shared<SteadyClock>();
  worlds_["default"] = std::shared_ptr<const world::WorldDef>(std::shared_ptr<const world::WorldDef>{},
                                                              &world::default_world());
  if (options_.data_dir) {
    std::filesystem::create_directories(*options_.data_dir / "sessions");
    const auto path = survey_path(*options_.data_dir);
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      std::stringstream buf;
      buf << in.rdbuf();
      responses_ = survey::responses_from_csv(*instrument_, buf.str());
      for (const auto& r : responses_) {
        if (r.session_id) surveyed_sessions_.insert(*r.session_id);
      }
    }
  }
}

SessionService::~SessionService() {
  std::lock_guard lock(mutex_);
  for (const auto& [_, s] : sessions_) {
    std::lock_guard slock(s->mutex);
    persist_log(*s);
  }
}

void SessionService::add_world(std::string id, std::shared_ptr<const world::WorldDef> world) {
  std::lock_guard lock(mutex_);
  worlds_[std::move(id)] = std::move(world);
}

std::vector<std::string> SessionService::world_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : worlds_) ids.push_back(id);
  return ids;
}

ordered_json SessionService::world_layout(const std::string& world_id) const {
  std::lock_guard lock(mutex_);
  const auto it = worlds_.find(world_id);
  if (it == worlds_.end()) throw ServiceError(404, "unknown-world", "unknown world '" + world_id + "'");
  return snapshot::world_layout(*it->second);
}

Created SessionService::create_session(const CreateRequest& request) {
  reap_idle();
  std::shared_ptr<const world::WorldDef> world;
  {
    std::lock_guard lock(mutex_);
    const auto it = worlds_.find(request.world);
    if (it == worlds_.end()) throw ServiceError(404, "unknown-world", "unknown world '" + request.world + "'");
    world = it->second;
  }
  engine::SessionConfig config;
  try {
    config = engine::config_from_json(request.config);
  } catch (const std::exception& e) {
    throw ServiceError(400, "invalid-config", e.what());
  }
  const std::uint64_t seed = request.seed ? *request.seed : fresh_random();

  auto s = std::make_shared<Session>();
  std::string id;
  {
    std::lock_guard lock(mutex_);
    do {
      id = "s-" + hex16(derive_seed(fresh_random(), ++created_count_));
    } while (sessions_.count(id));
  }
  s->state = engine::new_session(world, config, seed, id);
  s->log = engine::EventLog(s->state, config);
  s->world_id = request.world;
  s->client_id = request.client_id;
  s->created_at = s->last_activity = options_.clock->now();
  std::vector<engine::Event> none;
  record(*s, none, true);

  std::shared_ptr<Session> replaced;
  {
    std::lock_guard lock(mutex_);
    if (request.client_id) {
      const auto prev = client_sessions_.find(*request.client_id);
      if (prev != client_sessions_.end()) {
        const auto old = sessions_.find(prev->second);
        if (old != sessions_.end()) {
          replaced = old->second;
          sessions_.erase(old);
        }
      }
      client_sessions_[*request.client_id] = id;
    }
    sessions_[id] = s;
  }
  if (replaced) {
    std::lock_guard lock(replaced->mutex);
    persist_log(*replaced);
  }
  return {id, seed, s->deltas.back().snapshot};
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown-session", "unknown session '" + session_id + "'");
  return it->second;
}

void SessionService::sync(Session& s) {
  const auto elapsed = options_.clock->now() - s.created_at;
  const std::int64_t target = elapsed / text::kTickDuration;
  const std::int64_t cadence = s.state.config.barrier.scramble_cadence.count();
  const std::int64_t tick_ms = text::kTickDuration.count();
  std::vector<engine::Event> events;
  // Advance one cadence window at a time so every rollover yields its own delta.
  while (s.state.tick < target && !s.state.finished()) {
    const std::int64_t window = text::cadence_window(s.state.tick, s.state.config.barrier.scramble_cadence);
    const std::int64_t boundary = ((window + 1) * cadence + tick_ms - 1) / tick_ms;
    engine::advance_ticks(s.state, std::min(target, boundary) - s.state.tick, events);
    record(s, events, false);
  }
}

void SessionService::record(Session& s, std::vector<engine::Event>& events, bool force) {
  s.log.append(events);
  const bool had_events = !events.empty();
  events.clear();
  auto snap = snapshot::make_snapshot(s.state);
  auto view = comparable_view(snap);
  const bool completed = s.state.finished();
  if (force || had_events || view != s.last_view || (completed && !s.terminal_sent)) {
    Delta d{s.next_delta++, s.state.tick, completed, std::move(snap)};
    s.terminal_sent = s.terminal_sent || completed;
    s.deltas.push_back(std::move(d));
    while (s.deltas.size() > options_.delta_history) s.deltas.pop_front();
    s.last_view = std::move(view);
    s.cv.notify_all();
  }
  if (completed) persist_log(s);
}

ordered_json SessionService::get_state(const std::string& session_id) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  s->last_activity = options_.clock->now();
  sync(*s);
  return snapshot::make_snapshot(s->state);
}

ordered_json SessionService::submit_action(const std::string& session_id, const json& body) {
  auto s = find(session_id);
  engine::Action action;
  try {
    action = engine::action_from_json(body);
  } catch (const std::exception& e) {
    throw ServiceError(400, "bad-action", e.what());
  }
  std::lock_guard lock(s->mutex);
  s->last_activity = options_.clock->now();
  sync(*s);
  std::vector<engine::Event> events;
  try {
    engine::apply_action_in_place(s->state, action, events);
  } catch (const IllegalActionError& e) {
    throw ServiceError(409, "illegal-action", e.what(), {{"constraint", e.constraint()}});
  } catch (const UnknownIdError& e) {
    throw ServiceError(400, "unknown-id", e.what());
  }
  record(*s, events, true);
  return s->deltas.back().snapshot;
}

std::vector<Delta> SessionService::deltas_since(const std::string& session_id, std::uint64_t after) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  s->last_activity = options_.clock->now();
  sync(*s);
  std::vector<Delta> out;
  for (const auto& d : s->deltas) {
    if (d.seq > after) out.push_back(d);
  }
  return out;
}

std::vector<Delta> SessionService::wait_deltas(const std::string& session_id, std::uint64_t after,
                                               Millis timeout) {
  auto s = find(session_id);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(s->mutex);
  for (;;) {
    s->last_activity = options_.clock->now();
    sync(*s);
    std::vector<Delta> out;
    for (const auto& d : s->deltas) {
      if (d.seq > after) out.push_back(d);
    }
    const auto now = std::chrono::steady_clock::now();
    if (!out.empty() || now >= deadline) return out;
    s->cv.wait_until(lock, std::min(deadline, now + text::kTickDuration));
  }
}

std::string SessionService::event_log(const std::string& session_id) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  sync(*s);
  return s->log.to_ndjson();
}

ordered_json SessionService::submit_survey(const std::optional<std::string>& session_id, const json& answers) {
  survey::Response response;
  try {
    response = survey::validate_response(*instrument_, answers, session_id);
  } catch (const survey::ValidationError& e) {
    ordered_json issues = ordered_json::array();
    for (const auto& i : e.issues()) {
      issues.push_back({{"question", i.question}, {"code", i.code}, {"message", i.message}});
    }
    throw ServiceError(422, "invalid-survey", e.what(), {{"issues", std::move(issues)}});
  }
  std::lock_guard lock(survey_mutex_);
  if (session_id && surveyed_sessions_.count(*session_id)) {
    throw ServiceError(409, "duplicate-survey", "a survey was already submitted for session '" + *session_id + "'");
  }
  if (options_.data_dir) {
    const auto path = survey_path(*options_.data_dir);
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app);
    if (fresh) out << survey::responses_csv_header(*instrument_);
    out << survey::response_csv_row(*instrument_, response);
    if (!out) throw ServiceError(500, "storage", "could not append to " + path.string());
  }
  if (session_id) surveyed_sessions_.insert(*session_id);
  responses_.push_back(std::move(response));
  return {{"accepted", true}, {"responses", responses_.size()}};
}

std::vector<survey::Response> SessionService::survey_responses() const {
  std::lock_guard lock(survey_mutex_);
  return responses_;
}

ordered_json SessionService::list_sessions() {
  reap_idle();
  std::vector<std::shared_ptr<Session>> live;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [_, s] : sessions_) live.push_back(s);
  }
  const auto now = options_.clock->now();
  ordered_json out = ordered_json::array();
  for (const auto& s : live) {
    std::lock_guard lock(s->mutex);
    ordered_json j{{"session_id", s->state.session_id},
                   {"world", s->world_id},
                   {"seed", s->state.seed},
                   {"stage", to_string(s->state.stage)},
                   {"outcome", engine::to_string(s->state.outcome)},
                   {"tick", s->state.tick},
                   {"help_uses", s->state.help_uses},
                   {"idle_ms", (now - s->last_activity).count()}};
    j["client_id"] = s->client_id ? ordered_json(*s->client_id) : ordered_json(nullptr);
    out.push_back(std::move(j));
  }
  return out;
}

std::size_t SessionService::reap_idle() {
  const auto now = options_.clock->now();
  std::vector<std::shared_ptr<Session>> dropped;
  {
    std::lock_guard lock(mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      bool idle = false;
      {
        std::lock_guard slock(it->second->mutex);
        idle = now - it->second->last_activity > options_.idle_timeout;
      }
      if (idle) {
        if (const auto& c = it->second->client_id; c && client_sessions_[*c] == it->first) {
          client_sessions_.erase(*c);
        }
        dropped.push_back(it->second);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (const auto& s : dropped) {
    std::lock_guard lock(s->mutex);
    persist_log(*s);
  }
  return dropped.size();
}

void SessionService::persist_log(Session& s) const {
  if (!options_.data_dir || s.log_persisted) return;
  std::ofstream out(*options_.data_dir / "sessions" / (s.state.session_id + ".ndjson"));
  out << s.log.to_ndjson();
  s.log_persisted = s.state.finished();
}

}  // namespace campus::service
