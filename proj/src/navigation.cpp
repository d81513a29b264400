#include "campus/navigation.hpp"

#include <cmath>
#include <stdexcept>

#include "campus/errors.hpp"

namespace campus::world {

std::string entrance_sign_text(const WorldDef& world, const Building& building,
                               std::string_view active_target) {
  if (world.building(active_target) == nullptr) {
    throw UnknownIdError("unknown target building '" + std::string(active_target) + "'");
  }
  std::string base = building.name;
  for (const auto& s : world.signs) {
    if (s.kind == SignKind::Entrance && s.building == building.id) {
      base = s.base_text;
      break;
    }
  }
  if (building.id == active_target) return base;
  return base + "\n" + std::string(kWrongBuildingWarning);
}

NodeIndex help_arrow(const NavGraph& graph, NodeIndex current, NodeIndex destination,
                     double rate, Rng& rng) {
  if (current >= graph.size() || destination >= graph.size()) {
    throw UnknownIdError("help arrow: node index out of range");
  }
  if (current == destination) throw std::invalid_argument("help arrow: already at destination");
  const auto neighbors = graph.neighbors(current);
  if (neighbors.empty()) throw std::invalid_argument("help arrow: node has no neighbors");

  const auto dist = graph.hop_distances(destination);
  const int here = dist[current];
  std::optional<NodeIndex> best;
  std::vector<NodeIndex> wrong;
  for (NodeIndex n : neighbors) {
    if (here > 0 && dist[n] == here - 1) {
      if (!best) best = n;  // neighbors are ascending, so the first hit has the lowest id
    } else {
      wrong.push_back(n);
    }
  }
  if (!best) {
    // Destination unreachable from here; there is no right direction to give.
    return neighbors[rng.uniform_index(neighbors.size())];
  }
  if (wrong.empty() || !rng.bernoulli(rate)) return *best;
  return wrong[rng.uniform_index(wrong.size())];
}

double route_length(const WorldDef& world, const NpcRoute& route) {
  double total = 0.0;
  const auto& g = world.campus();
  for (std::size_t k = 0; k < route.nodes.size(); ++k) {
    total += g.edge_length(route.nodes[k], route.nodes[(k + 1) % route.nodes.size()]);
  }
  return total;
}

std::vector<NpcPosition> npc_positions(const WorldDef& world, std::int64_t tick) {
  if (tick < 0) throw std::invalid_argument("tick must be non-negative");
  const auto& g = world.campus();
  const double seconds = static_cast<double>(tick) * text::kTickDuration.count() / 1000.0;
  std::vector<NpcPosition> out;
  out.reserve(world.npc_routes.size());
  for (std::size_t r = 0; r < world.npc_routes.size(); ++r) {
    const auto& route = world.npc_routes[r];
    const double period = route_length(world, route);
    double along = std::fmod(route.speed * seconds, period);
    Vec2 pos = g.position(route.nodes.front());
    for (std::size_t k = 0; k < route.nodes.size(); ++k) {
      const auto a = route.nodes[k];
      const auto b = route.nodes[(k + 1) % route.nodes.size()];
      const double len = g.edge_length(a, b);
      if (along < len) {
        pos = g.position(a) + (g.position(b) - g.position(a)) * (along / len);
        break;
      }
      along -= len;
    }
    out.push_back({r, pos});
  }
  return out;
}

VerticalMapPayload vertical_map(const WorldDef& world, Vec2 player, Vec2 destination) {
  VerticalMapPayload payload;
  for (const auto& kind : world.maps.vertical.markers) {
    payload.markers.push_back({kind, kind == "player" ? player : destination});
  }
  return payload;
}

InteractiveMapPayload interactive_map(const WorldDef& world, Vec2 player,
                                      const std::map<std::string, std::string>& labels) {
  InteractiveMapPayload payload;
  payload.map_id = world.maps.interactive.id;
  payload.help_button = world.maps.interactive.help_button;
  payload.player = {"player", player};
  for (const auto& b : world.buildings) {
    const auto fp = world.maps.interactive.footprints.find(b.id);
    const auto label = labels.find(b.id);
    payload.buildings.push_back({b.id, label == labels.end() ? b.name : label->second,
                                 fp == world.maps.interactive.footprints.end() ? b.footprint : fp->second});
  }
  return payload;
}

}  // namespace campus::world
