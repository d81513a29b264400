#include "campus/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "campus/errors.hpp"
#include "campus/navigation.hpp"

namespace campus::engine {

using world::Building;
using world::BuildingRole;
using world::NodeIndex;

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::North: return "north";
    case Direction::South: return "south";
    case Direction::East: return "east";
    case Direction::West: return "west";
  }
  return "north";
}

std::string_view to_string(StairDirection d) { return d == StairDirection::Up ? "up" : "down"; }

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::InProgress: return "in-progress";
    case Outcome::Completed: return "completed";
    case Outcome::TaskExpired: return "task-expired";
  }
  return "in-progress";
}

void SessionConfig::validate() const {
  barrier.validate();
  if (agatha_timer.count() <= 0 || galileo_timer.count() <= 0) {
    throw std::invalid_argument("stage timers must be positive");
  }
  if (!(teleport_radius > 0.0)) throw std::invalid_argument("teleport_radius must be positive");
  if (!(reading_radius > 0.0)) throw std::invalid_argument("reading_radius must be positive");
}

namespace {

const Building& materials_building(const SessionState& s) {
  return s.world->building_with_role(BuildingRole::MaterialsTask);
}

const Building& exam_building(const SessionState& s) {
  return s.world->building_with_role(BuildingRole::ExamTask);
}

Locator campus_node(NodeIndex n) { return Locator{world::kCampusGraph, n}; }

class Mutator {
 public:
  Mutator(SessionState& s, std::vector<Event>& out) : s_(s), out_(out) {}

  void emit(EventPayload payload) {
    out_.push_back(Event{s_.tick, s_.next_seq++, s_.session_id, std::move(payload)});
  }

  void transition(Stage to) {
    const Stage from = s_.stage;
    s_.stage = to;
    if (s_.outcome == Outcome::TaskExpired) s_.outcome = Outcome::InProgress;
    switch (to) {
      case Stage::AgathaChristie: s_.backpack_equipped = true; break;
      case Stage::Journey2: s_.active_target = exam_building(s_).id; break;
      case Stage::Completed: s_.outcome = Outcome::Completed; break;
      default: break;
    }
    emit(ev::StageTransition{from, to});
  }

  void on_arrive() {
    const auto& exam = exam_building(s_);
    if (s_.stage == Stage::GalileoGalilei && exam.exam_room && s_.position == *exam.exam_room &&
        has_materials(s_)) {
      transition(Stage::ExamClassroom);
    } else if (s_.stage == Stage::ExamClassroom && exam.seat_zone && s_.position == *exam.seat_zone) {
      transition(Stage::Completed);
    }
  }

  void move_to(Locator to) {
    s_.position = to;
    s_.arrow.reset();
    on_arrive();
  }

  void expire_timer() {
    ++s_.expiry_count;
    s_.outcome = Outcome::TaskExpired;
    emit(ev::TimerExpired{s_.stage, s_.expiry_count});
    s_.timers[s_.stage] = full_timer(s_.stage);
    if (s_.stage == Stage::AgathaChristie) {
      const auto& b = materials_building(s_);
      s_.inventory.clear();
      s_.item_locations = b.item_locations;
    }
    s_.position = stage_entry_point(s_);
    s_.arrow.reset();
  }

  Millis full_timer(Stage stage) const {
    return stage == Stage::AgathaChristie ? s_.config.agatha_timer : s_.config.galileo_timer;
  }

  void step_one_tick() {
    ++s_.tick;
    if (category(s_.stage) == StageCategory::MainBuildingTask) {
      auto& remaining = s_.timers[s_.stage];
      remaining -= text::kTickDuration;
      if (remaining.count() <= 0) expire_timer();
    }
    const auto cadence = s_.config.barrier.scramble_cadence;
    if (text::cadence_window(s_.tick, cadence) != text::cadence_window(s_.tick - 1, cadence)) {
      for (const auto* sign : visible_signs(s_)) {
        if (sign->barrier != text::BarrierKind::None) {
          emit(ev::SignRendered{sign->id, sign_text(s_, *sign)});
        }
      }
    }
  }

  void apply(const Action& action) {
    if (s_.finished()) throw IllegalActionError("session-completed", "the experience is over");
    emit(action);
    std::visit([this](const auto& a) { handle(a); }, action);
  }

 private:
  const world::NavGraph& here_graph() const { return s_.world->graph(s_.position.graph); }

  // Resolves a node id into the player's current graph.
  NodeIndex resolve_local(const std::string& id) const {
    if (auto n = here_graph().find(id)) return *n;
    if (s_.world->locate(id)) {
      throw IllegalActionError("same-area", "node '" + id + "' is not reachable from this area");
    }
    throw UnknownIdError("unknown node '" + id + "'");
  }

  void handle(const act::MoveStep& a) {
    const auto& g = here_graph();
    NodeIndex target = 0;
    if (const auto* id = std::get_if<std::string>(&a.to)) {
      target = resolve_local(*id);
      if (!g.adjacent(s_.position.node, target)) {
        throw IllegalActionError("move-adjacent", "'" + *id + "' is not adjacent to the player");
      }
    } else {
      world::Vec2 heading{0, 0};
      switch (std::get<Direction>(a.to)) {
        case Direction::North: heading = {0, 1}; break;
        case Direction::South: heading = {0, -1}; break;
        case Direction::East: heading = {1, 0}; break;
        case Direction::West: heading = {-1, 0}; break;
      }
      double best = std::cos(std::numbers::pi / 4.0) - 1e-9;
      std::optional<NodeIndex> pick;
      for (NodeIndex n : g.neighbors(s_.position.node)) {
        const world::Vec2 d = (g.position(n) - g.position(s_.position.node)).normalized();
        const double align = d.dot(heading);
        if (align > best + 1e-12) {
          best = align;
          pick = n;
        }
      }
      if (!pick) throw IllegalActionError("move-adjacent", "no path leads that way");
      target = *pick;
    }
    move_to(Locator{s_.position.graph, target});
  }

  void handle(const act::Teleport& a) {
    const auto& g = here_graph();
    const NodeIndex target = resolve_local(a.target);
    const double dist = (g.position(target) - g.position(s_.position.node)).norm();
    if (dist > s_.config.teleport_radius) {
      throw IllegalActionError("teleport-radius", "'" + a.target + "' is beyond the teleport radius");
    }
    move_to(Locator{s_.position.graph, target});
  }

  void handle(const act::PressButton& a) {
    const auto* station = s_.world->station_with_button(a.button);
    if (station == nullptr) throw UnknownIdError("unknown button '" + a.button + "'");
    if (station->at != s_.position) {
      throw IllegalActionError("button-reach", "the player is not at map '" + station->id + "'");
    }
    if (a.button == "tutorial-map") {
      if (s_.stage != Stage::Tutorial) {
        throw IllegalActionError("tutorial-only", "the tutorial button only works during the tutorial");
      }
      transition(Stage::Journey1);
    }
  }

  void handle(const act::Grab& a) {
    if (!materials_building(s_).item_locations.count(a.item)) {
      throw UnknownIdError("unknown item '" + a.item + "'");
    }
    if (s_.inventory.count(a.item)) throw IllegalActionError("item-held", a.item + " is already held");
    if (!s_.backpack_equipped) {
      throw IllegalActionError("grab-stage", "items can only be collected once the materials task has begun");
    }
    const auto it = s_.item_locations.find(a.item);
    if (it == s_.item_locations.end() || it->second != s_.position) {
      throw IllegalActionError("grab-location", a.item + " is not here");
    }
    s_.item_locations.erase(it);
    s_.inventory.insert(a.item);
  }

  void handle(const act::Release& a) {
    if (!materials_building(s_).item_locations.count(a.item)) {
      throw UnknownIdError("unknown item '" + a.item + "'");
    }
    if (!s_.inventory.erase(a.item)) throw IllegalActionError("item-held", a.item + " is not held");
    s_.item_locations[a.item] = s_.position;
  }

  void handle(const act::RequestHelp& a) {
    const auto& maps = s_.world->maps;
    if (a.map == "vertical") throw IllegalActionError("help-map", "the vertical map has no help button");
    if (a.map != maps.interactive.id) throw UnknownIdError("unknown map '" + a.map + "'");
    if (!maps.interactive.help_button) throw IllegalActionError("help-map", "this map has no help button");
    if (s_.inside()) throw IllegalActionError("help-outdoors", "help arrows are only shown on the campus");
    const Locator goal = destination(s_);
    if (goal.graph != world::kCampusGraph || goal == s_.position) {
      throw IllegalActionError("help-destination", "already at the destination");
    }
    const auto& g = s_.world->campus();
    const NodeIndex next =
        world::help_arrow(g, s_.position.node, goal.node, s_.config.barrier.misdirection_rate, s_.arrow_rng);
    ++s_.help_uses;
    s_.arrow = HelpArrow{s_.position, campus_node(next)};
    emit(ev::ArrowShown{g.id(s_.position.node), g.id(next)});
  }

  void handle(const act::ReadSign& a) {
    emit(ev::SignRendered{a.sign, read_sign(s_, a.sign)});
  }

  void handle(const act::EnterBuilding& a) {
    const Building* b = s_.world->building(a.building);
    if (b == nullptr) throw UnknownIdError("unknown building '" + a.building + "'");
    if (s_.position != campus_node(b->entrance_node)) {
      throw IllegalActionError("building-entrance", "the player is not at the entrance of " + b->name);
    }
    // Wrong building or tutorial still running: the doors stay shut and the
    // entrance sign carries the warning.
    if (b->id != s_.active_target || s_.stage == Stage::Tutorial || !b->has_interior()) return;
    const bool advancing = (s_.stage == Stage::Journey1 && b->role == BuildingRole::MaterialsTask) ||
                           (s_.stage == Stage::Journey2 && b->role == BuildingRole::ExamTask);
    s_.position = *b->entry();
    s_.arrow.reset();
    if (advancing) transition(*next_stage(s_.stage));
  }

  void handle(const act::ExitBuilding&) {
    const Building* b = s_.world->building_of(s_.position.graph);
    if (b == nullptr) throw IllegalActionError("inside-building", "the player is not inside a building");
    if (s_.position != *b->entry()) {
      throw IllegalActionError("building-exit", "the exit is at the entrance hall");
    }
    s_.position = campus_node(b->entrance_node);
    s_.arrow.reset();
    if (s_.stage == Stage::AgathaChristie && b->role == BuildingRole::MaterialsTask && has_materials(s_)) {
      transition(Stage::Journey2);
    }
  }

  void handle(const act::ClimbStairs& a) {
    const Building* b = s_.world->building_of(s_.position.graph);
    if (b == nullptr) throw IllegalActionError("inside-building", "there are no stairs outside");
    const auto* floor = b->floor_of(s_.position.graph);
    if (!floor->stair_node || *floor->stair_node != s_.position.node) {
      throw IllegalActionError("stairs", "the player is not at the staircase");
    }
    const int level = floor->level + (a.direction == StairDirection::Up ? 1 : -1);
    const auto* target = b->floor_at(level);
    if (target == nullptr || !target->stair_node) {
      throw IllegalActionError("stairs", "no floor " + std::to_string(level) + " in " + b->name);
    }
    move_to(Locator{target->graph, *target->stair_node});
  }

  SessionState& s_;
  std::vector<Event>& out_;
};

}  // namespace

bool has_materials(const SessionState& state) {
  return state.inventory.count(std::string(kNotebook)) && state.inventory.count(std::string(kPen));
}

SessionState new_session(std::shared_ptr<const world::WorldDef> world, const SessionConfig& config,
                         std::uint64_t seed, std::string session_id,
                         std::shared_ptr<const text::HomophoneLexicon> lexicon) {
  config.validate();
  if (!world) throw std::invalid_argument("world is required");
  SessionState s;
  s.session_id = session_id.empty() ? "s-" + std::to_string(derive_seed(seed, "session-id") % 1'000'000'000ULL)
                                    : std::move(session_id);
  s.seed = seed;
  s.world = std::move(world);
  s.lexicon = lexicon ? std::move(lexicon)
                      : std::shared_ptr<const text::HomophoneLexicon>(
                            std::shared_ptr<const text::HomophoneLexicon>{}, &text::HomophoneLexicon::bundled());
  s.config = config;
  s.config.barrier.seed = derive_seed(derive_seed(seed, "text"), config.barrier.seed);
  s.arrow_rng = Rng(derive_seed(seed, "arrows"));
  s.position = campus_node(s.world->campus_entrance);
  s.active_target = materials_building(s).id;
  s.item_locations = materials_building(s).item_locations;
  s.timers = {{Stage::AgathaChristie, config.agatha_timer}, {Stage::GalileoGalilei, config.galileo_timer}};
  return s;
}

void apply_action_in_place(SessionState& state, const Action& action, std::vector<Event>& out) {
  // Commit only on success so a rejected action leaves no trace.
  SessionState next = state;
  std::vector<Event> events;
  Mutator(next, events).apply(action);
  state = std::move(next);
  out.insert(out.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
}

void advance_ticks(SessionState& state, std::int64_t ticks, std::vector<Event>& out) {
  Mutator m(state, out);
  for (std::int64_t i = 0; i < ticks && !state.finished(); ++i) m.step_one_tick();
}

StepResult apply_action(const SessionState& state, const Action& action) {
  StepResult r{state, {}};
  Mutator(r.state, r.events).apply(action);
  return r;
}

StepResult tick(const SessionState& state, Millis dt) {
  if (dt.count() < 0) throw std::invalid_argument("dt must be non-negative");
  StepResult r{state, {}};
  if (state.finished()) return r;
  const Millis total = r.state.pending + dt;
  const auto ticks = total / text::kTickDuration;
  r.state.pending = total % text::kTickDuration;
  advance_ticks(r.state, ticks, r.events);
  return r;
}

std::string sign_text(const SessionState& state, const world::Sign& sign) {
  if (sign.kind == world::SignKind::Entrance && sign.dynamic_rule == "wrong-building-warning" &&
      sign.building) {
    if (const auto* b = state.world->building(*sign.building)) {
      return world::entrance_sign_text(*state.world, *b, state.active_target);
    }
  }
  return text::render_at_tick(sign.base_text, state.config.barrier, sign.barrier, state.tick, *state.lexicon)
      .rendered;
}

std::string read_sign(const SessionState& state, std::string_view sign_id) {
  const auto* sign = state.world->sign(sign_id);
  if (sign == nullptr) throw UnknownIdError("unknown sign '" + std::string(sign_id) + "'");
  const auto& visible = visible_signs(state);
  if (std::find(visible.begin(), visible.end(), sign) == visible.end()) {
    throw IllegalActionError("reading-radius", "sign '" + sign->id + "' is out of reading range");
  }
  return sign_text(state, *sign);
}

std::vector<const world::Sign*> visible_signs(const SessionState& state) {
  std::vector<const world::Sign*> out;
  const auto& here = state.world->position(state.position);
  for (const auto& sign : state.world->signs) {
    if (sign.at.graph != state.position.graph) continue;
    if ((state.world->position(sign.at) - here).norm() <= state.config.reading_radius) out.push_back(&sign);
  }
  return out;
}

Locator destination(const SessionState& state) {
  const auto& w = *state.world;
  const auto& materials = materials_building(state);
  const auto& exam = exam_building(state);
  const auto inside = [&](const Building& b) { return w.building_of(state.position.graph) == &b; };
  switch (state.stage) {
    case Stage::Tutorial: return w.station_with_button("tutorial-map")->at;
    case Stage::Journey1: return campus_node(materials.entrance_node);
    case Stage::AgathaChristie:
      if (!inside(materials)) return campus_node(materials.entrance_node);
      for (const auto& [item, at] : state.item_locations) {
        if (materials.item_locations.count(item) && !state.inventory.count(item) &&
            w.building_of(at.graph) == &materials) {
          return at;
        }
      }
      return *materials.entry();
    case Stage::Journey2: return campus_node(exam.entrance_node);
    case Stage::GalileoGalilei:
      return inside(exam) ? *exam.exam_room : campus_node(exam.entrance_node);
    case Stage::ExamClassroom:
    case Stage::Completed:
      return inside(exam) ? *exam.seat_zone : campus_node(exam.entrance_node);
  }
  return state.position;
}

Locator stage_entry_point(const SessionState& state) {
  switch (state.stage) {
    case Stage::AgathaChristie: return *materials_building(state).entry();
    case Stage::GalileoGalilei:
    case Stage::ExamClassroom: return *exam_building(state).entry();
    default: return campus_node(state.world->campus_entrance);
  }
}

const world::Beacon* active_beacon(const SessionState& state, world::BeaconKind kind) {
  for (const auto& b : state.world->beacons) {
    if (b.kind == kind && std::find(b.stages.begin(), b.stages.end(), state.stage) != b.stages.end()) {
      return &b;
    }
  }
  return nullptr;
}

std::optional<Millis> active_timer(const SessionState& state) {
  if (category(state.stage) != StageCategory::MainBuildingTask) return std::nullopt;
  return state.timers.at(state.stage);
}

std::map<std::string, std::string> map_labels(const SessionState& state) {
  std::map<std::string, std::string> labels;
  const auto kind = state.stage == Stage::Tutorial ? text::BarrierKind::None : text::BarrierKind::LetterMovement;
  for (const auto& b : state.world->buildings) {
    labels[b.id] = text::render_at_tick(b.name, state.config.barrier, kind, state.tick, *state.lexicon).rendered;
  }
  return labels;
}

}  // namespace campus::engine
