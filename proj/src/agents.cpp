#include "campus/agents.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "campus/errors.hpp"

namespace campus::agents {

using engine::Locator;
using world::Building;
using world::BuildingRole;

std::vector<NodeIndex> shortest_path(const NavGraph& graph, NodeIndex from, NodeIndex to) {
  if (from >= graph.size() || to >= graph.size()) throw std::out_of_range("node index out of range");
  std::vector<NodeIndex> path;
  if (from == to) return path;

  // Distances to `to`, then a greedy walk that always takes the smallest id
  // one hop closer.
  std::vector<int> dist(graph.size(), -1);
  std::deque<NodeIndex> queue{to};
  dist[to] = 0;
  while (!queue.empty()) {
    const NodeIndex n = queue.front();
    queue.pop_front();
    for (NodeIndex m : graph.neighbors(n)) {
      if (dist[m] < 0) {
        dist[m] = dist[n] + 1;
        queue.push_back(m);
      }
    }
  }
  if (dist[from] < 0) throw std::runtime_error("no path from " + graph.id(from) + " to " + graph.id(to));

  NodeIndex cur = from;
  while (cur != to) {
    for (NodeIndex m : graph.neighbors(cur)) {
      if (dist[m] == dist[cur] - 1) {
        cur = m;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::ArrowFollower: return "arrow-follower";
    case PolicyKind::RandomWalk: return "random-walk";
  }
  return "oracle";
}

std::optional<PolicyKind> policy_from_string(std::string_view name) {
  if (name == "oracle") return PolicyKind::Oracle;
  if (name == "arrow-follower") return PolicyKind::ArrowFollower;
  if (name == "random-walk") return PolicyKind::RandomWalk;
  return std::nullopt;
}

namespace {

const std::string& local_id(const SessionState& s, NodeIndex n) { return s.world->graph(s.position.graph).id(n); }

const Building* building_entered_at(const SessionState& s) {
  if (s.inside()) return nullptr;
  for (const auto& b : s.world->buildings) {
    if (b.entrance_node == s.position.node) return &b;
  }
  return nullptr;
}

std::optional<std::string> item_here(const SessionState& s) {
  for (const auto& [item, at] : s.item_locations) {
    if (at == s.position && !s.inventory.count(item)) return item;
  }
  return std::nullopt;
}

// Action that completes the current step once the player stands on destination().
std::optional<Action> arrival_action(const SessionState& s) {
  if (s.stage == Stage::Tutorial) {
    for (const auto& st : s.world->maps.interactive.stations) {
      if (st.at == s.position && st.button == "tutorial-map") return engine::act::PressButton{st.button};
    }
    return std::nullopt;
  }
  if (const auto* b = building_entered_at(s); b && b->id == s.active_target) {
    return engine::act::EnterBuilding{b->id};
  }
  if (s.backpack_equipped) {
    if (auto item = item_here(s)) return engine::act::Grab{*item};
  }
  if (s.stage == Stage::AgathaChristie && engine::has_materials(s)) {
    const auto* b = s.world->building_of(s.position.graph);
    if (b && b->entry() == s.position) return engine::act::ExitBuilding{};
  }
  return std::nullopt;
}

// One step of the plan that moves the player from its position toward `goal`,
// crossing between campus, building and floors as needed.
std::optional<Action> step_toward(const SessionState& s, Locator goal) {
  const auto& w = *s.world;
  if (goal == s.position) return arrival_action(s);

  const Building* here = w.building_of(s.position.graph);
  const Building* there = w.building_of(goal.graph);
  Locator waypoint = goal;
  std::optional<Action> on_waypoint;

  if (here != there) {
    if (here != nullptr) {
      waypoint = *here->entry();
      on_waypoint = engine::act::ExitBuilding{};
    } else {
      waypoint = Locator{world::kCampusGraph, there->entrance_node};
      on_waypoint = engine::act::EnterBuilding{there->id};
    }
  } else if (s.position.graph != goal.graph) {
    const auto* floor = here->floor_of(s.position.graph);
    const auto* target = here->floor_of(goal.graph);
    if (!floor->stair_node) return std::nullopt;
    waypoint = Locator{s.position.graph, *floor->stair_node};
    on_waypoint = engine::act::ClimbStairs{target->level > floor->level ? engine::StairDirection::Up
                                                                        : engine::StairDirection::Down};
  }

  if (waypoint == s.position) return on_waypoint;
  const auto path = shortest_path(w.graph(s.position.graph), s.position.node, waypoint.node);
  return engine::act::MoveStep{local_id(s, path.front())};
}

std::optional<Action> oracle_action(const SessionState& s) { return step_toward(s, engine::destination(s)); }

std::optional<Action> arrow_action(const SessionState& s) {
  const Locator goal = engine::destination(s);
  if (s.inside() || goal.graph != world::kCampusGraph || goal == s.position) return step_toward(s, goal);
  if (s.arrow && s.arrow->from == s.position) {
    return engine::act::MoveStep{s.world->node_id(s.arrow->to)};
  }
  return engine::act::RequestHelp{s.world->maps.interactive.id};
}

std::optional<Action> random_action(const SessionState& s, Rng& rng) {
  std::vector<Action> options;
  if (auto a = arrival_action(s)) options.push_back(*a);
  if (const auto* b = s.world->building_of(s.position.graph)) {
    const auto* floor = b->floor_of(s.position.graph);
    if (floor->stair_node == s.position.node) {
      if (b->floor_at(floor->level + 1)) options.push_back(engine::act::ClimbStairs{engine::StairDirection::Up});
      if (b->floor_at(floor->level - 1)) options.push_back(engine::act::ClimbStairs{engine::StairDirection::Down});
    }
    if (b->entry() == s.position) options.push_back(engine::act::ExitBuilding{});
  }
  for (NodeIndex n : s.world->graph(s.position.graph).neighbors(s.position.node)) {
    options.push_back(engine::act::MoveStep{local_id(s, n)});
  }
  if (options.empty()) return std::nullopt;
  return options[rng.uniform_index(options.size())];
}

}  // namespace

std::optional<Action> choose_action(const Policy& policy, const SessionState& state, Rng& rng) {
  if (state.finished()) return std::nullopt;
  switch (policy.kind) {
    case PolicyKind::Oracle: return oracle_action(state);
    case PolicyKind::ArrowFollower: return arrow_action(state);
    case PolicyKind::RandomWalk: return random_action(state, rng);
  }
  return std::nullopt;
}

std::int64_t action_ticks(const Policy& policy, const SessionState& before, const Action& action) {
  constexpr std::int64_t kInteract = 10;
  constexpr std::int64_t kStairs = 50;
  const auto walk = [&](const std::string& id) -> std::int64_t {
    const auto& g = before.world->graph(before.position.graph);
    const auto n = g.find(id);
    if (!n) return kInteract;
    const double seconds = g.edge_length(before.position.node, *n) / policy.walk_speed;
    const double tick_s = std::chrono::duration<double>(text::kTickDuration).count();
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(seconds / tick_s - 1e-9)));
  };
  if (const auto* m = std::get_if<engine::act::MoveStep>(&action)) {
    if (const auto* id = std::get_if<std::string>(&m->to)) return walk(*id);
    return kInteract;
  }
  if (const auto* t = std::get_if<engine::act::Teleport>(&action)) return walk(t->target);
  if (std::holds_alternative<engine::act::ClimbStairs>(action)) return kStairs;
  return kInteract;
}

nlohmann::ordered_json report_to_json(const RunReport& r) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (const auto& [stage, ticks] : r.stage_ticks) stages[std::string(to_string(stage))] = ticks;
  return {
      {"seed", r.seed},
      {"policy", r.policy},
      {"misdirection_rate", r.misdirection_rate},
      {"outcome", engine::to_string(r.outcome)},
      {"truncated", r.truncated},
      {"total_ticks", r.total_ticks},
      {"stage_ticks", stages},
      {"help_uses", r.help_uses},
      {"eligible_help", r.eligible_help},
      {"misdirections", r.misdirections},
      {"wrong_arrow_fraction", r.wrong_arrow_fraction()},
      {"transitions", r.transitions},
      {"expiries", r.expiries},
      {"events", r.events},
      {"digest", r.digest},
  };
}

RunResult run_headless(std::shared_ptr<const world::WorldDef> world, const SessionConfig& config,
                       std::uint64_t seed, const Policy& policy, std::int64_t max_ticks) {
  if (max_ticks < 0) throw std::invalid_argument("max_ticks must be non-negative");
  if (!(policy.walk_speed > 0.0)) throw std::invalid_argument("walk_speed must be positive");

  SessionState state = engine::new_session(std::move(world), config, seed);
  RunResult result{{}, {}, engine::EventLog(state, config)};
  RunReport& report = result.report;
  report.seed = seed;
  report.policy = std::string(to_string(policy.kind));
  report.misdirection_rate = config.barrier.misdirection_rate;

  Rng rng(derive_seed(seed, "policy"));
  std::vector<engine::Event> events;
  std::int64_t steps = 0;
  int expiries_since_transition = 0;

  while (!state.finished()) {
    if (state.tick >= max_ticks || steps >= policy.step_budget) {
      report.truncated = true;
      break;
    }
    const auto action = choose_action(policy, state, rng);
    if (!action) {
      report.truncated = true;
      break;
    }
    ++steps;
    const std::int64_t duration = action_ticks(policy, state, *action);
    const std::size_t first_new = events.size();
    try {
      engine::apply_action_in_place(state, *action, events);
      result.trace.entries.push_back({state.tick, *action});
    } catch (const IllegalActionError&) {
      // The attempt still costs time; nothing is logged.
    }
    for (std::size_t i = first_new; i < events.size(); ++i) {
      const auto* shown = std::get_if<engine::ev::ArrowShown>(&events[i].payload);
      if (shown == nullptr) continue;
      const auto& g = state.world->campus();
      const auto dist = g.hop_distances(engine::destination(state).node);
      const NodeIndex from = *g.find(shown->from);
      const NodeIndex to = *g.find(shown->to);
      const auto nbrs = g.neighbors(from);
      const bool eligible =
          std::any_of(nbrs.begin(), nbrs.end(), [&](NodeIndex n) { return dist[n] != dist[from] - 1; });
      if (eligible) ++report.eligible_help;
      if (dist[to] != dist[from] - 1) ++report.misdirections;
    }
    const std::size_t before_ticks = events.size();
    engine::advance_ticks(state, std::min(duration, max_ticks - state.tick), events);
    for (std::size_t i = first_new; i < events.size(); ++i) {
      if (std::holds_alternative<engine::ev::StageTransition>(events[i].payload)) expiries_since_transition = 0;
      if (i >= before_ticks && std::holds_alternative<engine::ev::TimerExpired>(events[i].payload)) {
        ++expiries_since_transition;
      }
    }
    if (expiries_since_transition >= kExpiryLoopLimit) break;
  }

  result.log.append(events);
  result.trace.final_tick = state.tick;

  Stage current = Stage::Tutorial;
  std::int64_t since = 0;
  report.stage_ticks[current] = 0;
  for (const auto& e : events) {
    if (const auto* t = std::get_if<engine::ev::StageTransition>(&e.payload)) {
      report.stage_ticks[t->from] += e.tick - since;
      since = e.tick;
      current = t->to;
      report.stage_ticks.try_emplace(current, 0);
      ++report.transitions;
    } else if (std::holds_alternative<engine::ev::TimerExpired>(e.payload)) {
      ++report.expiries;
    }
  }
  report.stage_ticks[current] += state.tick - since;

  report.outcome = state.outcome;
  report.total_ticks = state.tick;
  report.help_uses = state.help_uses;
  report.events = events.size();
  report.digest = result.log.digest();
  return result;
}

}  // namespace campus::agents
