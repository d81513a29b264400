#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "campus/rng.hpp"
#include "campus/stage.hpp"
#include "campus/text_barriers.hpp"
#include "campus/world.hpp"

namespace campus::engine {

using world::Locator;
using Millis = std::chrono::milliseconds;

enum class Direction { North, South, East, West };  // north is +y
enum class StairDirection { Up, Down };

std::string_view to_string(Direction d);
std::string_view to_string(StairDirection d);

// Discrete player actions. Identifiers are the wire-level ids from the world
// document; they are resolved (and rejected) by apply_action.
namespace act {
struct MoveStep {
  std::variant<std::string, Direction> to;  // adjacent node id or compass direction
  friend bool operator==(const MoveStep&, const MoveStep&) = default;
};
struct Teleport {
  std::string target;
  friend bool operator==(const Teleport&, const Teleport&) = default;
};
struct PressButton {
  std::string button;
  friend bool operator==(const PressButton&, const PressButton&) = default;
};
struct Grab {
  std::string item;
  friend bool operator==(const Grab&, const Grab&) = default;
};
struct Release {
  std::string item;
  friend bool operator==(const Release&, const Release&) = default;
};
struct RequestHelp {
  std::string map;
  friend bool operator==(const RequestHelp&, const RequestHelp&) = default;
};
struct ReadSign {
  std::string sign;
  friend bool operator==(const ReadSign&, const ReadSign&) = default;
};
struct EnterBuilding {
  std::string building;
  friend bool operator==(const EnterBuilding&, const EnterBuilding&) = default;
};
struct ExitBuilding {
  friend bool operator==(const ExitBuilding&, const ExitBuilding&) = default;
};
struct ClimbStairs {
  StairDirection direction = StairDirection::Up;
  friend bool operator==(const ClimbStairs&, const ClimbStairs&) = default;
};
}  // namespace act

using Action = std::variant<act::MoveStep, act::Teleport, act::PressButton, act::Grab, act::Release,
                            act::RequestHelp, act::ReadSign, act::EnterBuilding, act::ExitBuilding,
                            act::ClimbStairs>;

enum class Outcome { InProgress, Completed, TaskExpired };
std::string_view to_string(Outcome o);

struct SessionConfig {
  text::BarrierConfig barrier;
  Millis agatha_timer{240'000};
  Millis galileo_timer{300'000};
  double teleport_radius = 60.0;  // world units
  double reading_radius = 20.0;   // world units; also the sign visibility radius

  void validate() const;  // throws std::invalid_argument
  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

struct HelpArrow {
  Locator from;
  Locator to;
  friend bool operator==(const HelpArrow&, const HelpArrow&) = default;
};

// --- events ---------------------------------------------------------------

namespace ev {
struct StageTransition {
  Stage from;
  Stage to;
  friend bool operator==(const StageTransition&, const StageTransition&) = default;
};
struct TimerExpired {
  Stage stage;
  int expiry_count = 0;
  friend bool operator==(const TimerExpired&, const TimerExpired&) = default;
};
struct SignRendered {
  std::string sign;
  std::string text;
  friend bool operator==(const SignRendered&, const SignRendered&) = default;
};
struct ArrowShown {
  std::string from;
  std::string to;
  friend bool operator==(const ArrowShown&, const ArrowShown&) = default;
};
}  // namespace ev

using EventPayload = std::variant<Action, ev::StageTransition, ev::TimerExpired, ev::SignRendered, ev::ArrowShown>;

struct Event {
  std::int64_t tick = 0;
  std::uint64_t seq = 0;
  std::string session_id;
  EventPayload payload;
  friend bool operator==(const Event&, const Event&) = default;
};

// --- session ----------------------------------------------------------------

struct SessionState {
  std::string session_id;
  std::uint64_t seed = 0;
  std::shared_ptr<const world::WorldDef> world;
  std::shared_ptr<const text::HomophoneLexicon> lexicon;
  SessionConfig config;  // config.barrier.seed is the session's text stream seed

  Stage stage = Stage::Tutorial;
  Locator position;
  std::set<std::string> inventory;
  std::map<std::string, Locator> item_locations;  // items lying in the world
  bool backpack_equipped = false;
  std::string active_target;  // building id
  std::map<Stage, Millis> timers;
  int help_uses = 0;
  int expiry_count = 0;
  std::optional<HelpArrow> arrow;
  Outcome outcome = Outcome::InProgress;

  Rng arrow_rng;
  std::int64_t tick = 0;
  Millis pending{0};  // sub-tick remainder carried between tick() calls
  std::uint64_t next_seq = 0;

  bool inside() const { return position.graph != world::kCampusGraph; }
  bool finished() const { return stage == Stage::Completed; }
};

struct StepResult {
  SessionState state;
  std::vector<Event> events;
};

SessionState new_session(std::shared_ptr<const world::WorldDef> world, const SessionConfig& config,
                         std::uint64_t seed, std::string session_id = {},
                         std::shared_ptr<const text::HomophoneLexicon> lexicon = nullptr);

// Throws IllegalActionError (stage or position constraint) and UnknownIdError.
StepResult apply_action(const SessionState& state, const Action& action);

// Advances simulated time by dt (whole ticks; the remainder is carried).
StepResult tick(const SessionState& state, Millis dt);

// In-place variants used by hot loops; events are appended to `out`.
void apply_action_in_place(SessionState& state, const Action& action, std::vector<Event>& out);
void advance_ticks(SessionState& state, std::int64_t ticks, std::vector<Event>& out);

// Current rendering of a sign for this session. Throws UnknownIdError, and
// IllegalActionError("reading-radius") when the player is out of range.
std::string read_sign(const SessionState& state, std::string_view sign_id);

// --- derived views ------------------------------------------------------------

// Rendering of `sign` at the session's tick, ignoring the reading radius.
std::string sign_text(const SessionState& state, const world::Sign& sign);
std::vector<const world::Sign*> visible_signs(const SessionState& state);
// Where the current stage sends the player next.
Locator destination(const SessionState& state);
// The position at which the current stage is retried after a timer expiry.
Locator stage_entry_point(const SessionState& state);
const world::Beacon* active_beacon(const SessionState& state, world::BeaconKind kind);
std::optional<Millis> active_timer(const SessionState& state);
// Labels shown on the interactive map; letter movement applies after the tutorial.
std::map<std::string, std::string> map_labels(const SessionState& state);

inline constexpr std::string_view kNotebook = "notebook";
inline constexpr std::string_view kPen = "pen";
bool has_materials(const SessionState& state);

}  // namespace campus::engine
