#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "campus/engine.hpp"
#include "campus/event_log.hpp"

namespace campus::agents {

using engine::Action;
using engine::SessionConfig;
using engine::SessionState;
using world::NavGraph;
using world::NodeIndex;

// Minimum-hop path from `from` to `to`, excluding `from` and including `to`.
// Among minimum-hop paths the lexicographically smallest node-id sequence is
// returned. Empty when from == to. Throws std::runtime_error if unreachable.
std::vector<NodeIndex> shortest_path(const NavGraph& graph, NodeIndex from, NodeIndex to);

enum class PolicyKind { Oracle, ArrowFollower, RandomWalk };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> policy_from_string(std::string_view name);

struct Policy {
  PolicyKind kind = PolicyKind::Oracle;
  double walk_speed = 4.0;  // world units per second; sets how long a MoveStep takes
  std::int64_t step_budget = 100'000;  // max actions attempted (random-walk budget)
};

// The policy's next action for this state; nullopt when it has nothing to do.
std::optional<Action> choose_action(const Policy& policy, const SessionState& state, Rng& rng);

// Simulated time an action occupies the player, in ticks.
std::int64_t action_ticks(const Policy& policy, const SessionState& before, const Action& action);

struct RunReport {
  std::uint64_t seed = 0;
  std::string policy;
  double misdirection_rate = 0.0;
  engine::Outcome outcome = engine::Outcome::InProgress;
  bool truncated = false;
  std::int64_t total_ticks = 0;
  std::map<Stage, std::int64_t> stage_ticks;
  int help_uses = 0;
  int eligible_help = 0;  // help requests where a wrong direction existed
  int misdirections = 0;  // arrows that left every shortest path
  int transitions = 0;
  int expiries = 0;
  std::size_t events = 0;
  std::string digest;

  double wrong_arrow_fraction() const {
    return eligible_help == 0 ? 0.0 : static_cast<double>(misdirections) / eligible_help;
  }
};

nlohmann::ordered_json report_to_json(const RunReport& report);

struct RunResult {
  RunReport report;
  engine::Trace trace;
  engine::EventLog log;
};

// Consecutive TimerExpired resets without a stage transition before giving up.
inline constexpr int kExpiryLoopLimit = 3;

RunResult run_headless(std::shared_ptr<const world::WorldDef> world, const SessionConfig& config,
                       std::uint64_t seed, const Policy& policy, std::int64_t max_ticks);

}  // namespace campus::agents
