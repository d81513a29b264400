#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "campus/rng.hpp"
#include "campus/world.hpp"

namespace campus::world {

inline constexpr std::string_view kWrongBuildingWarning = "You are not in the correct building.";

// Entrance sign text for `building` while `active_target` is the task
// building. Throws UnknownIdError if `active_target` is not a building.
std::string entrance_sign_text(const WorldDef& world, const Building& building,
                               std::string_view active_target);

// Next node suggested by the help arrow. With probability 1 - rate this is
// the lowest-id neighbor on a shortest (hop-count) path; otherwise it is
// drawn uniformly from the neighbors that are on no shortest path. When every
// neighbor is optimal (always the case for degree-1 nodes) the optimal one is
// returned.
//
// Throws UnknownIdError for out-of-range nodes and std::invalid_argument when
// current == destination or current is isolated.
NodeIndex help_arrow(const NavGraph& graph, NodeIndex current, NodeIndex destination,
                     double rate, Rng& rng);

struct NpcPosition {
  std::size_t route = 0;
  Vec2 position;
};

// Every NPC walks its cyclic route at constant speed starting at the first
// node. Pure function of tick.
std::vector<NpcPosition> npc_positions(const WorldDef& world, std::int64_t tick);

// Total length of a route cycle in world units.
double route_length(const WorldDef& world, const NpcRoute& route);

// --- map payloads ----------------------------------------------------------

struct MapMarker {
  std::string kind;  // "player" | "destination"
  Vec2 position;
};

struct VerticalMapPayload {
  std::vector<MapMarker> markers;  // player + destination, no names
};

struct NamedFootprint {
  std::string building;
  std::string label;
  Polygon outline;
};

struct InteractiveMapPayload {
  std::string map_id;
  std::vector<NamedFootprint> buildings;
  MapMarker player;
  bool help_button = true;
};

VerticalMapPayload vertical_map(const WorldDef& world, Vec2 player, Vec2 destination);

// `labels` supplies the on-map label per building (possibly barrier-rendered);
// buildings missing from it are labelled with their name.
InteractiveMapPayload interactive_map(const WorldDef& world, Vec2 player,
                                      const std::map<std::string, std::string>& labels = {});

}  // namespace campus::world
