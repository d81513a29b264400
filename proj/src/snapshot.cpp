#include "campus/snapshot.hpp"

#include "campus/navigation.hpp"

namespace campus::snapshot {

using nlohmann::ordered_json;
using world::Locator;
using world::Vec2;

namespace {

ordered_json point(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }

ordered_json polygon(const world::Polygon& p) {
  ordered_json out = ordered_json::array();
  for (const auto& v : p) out.push_back(point(v));
  return out;
}

ordered_json locator_json(const world::WorldDef& w, Locator at) {
  const auto* b = w.building_of(at.graph);
  const auto& pos = w.position(at);
  ordered_json j{{"area", b ? b->id : "campus"}};
  j["floor"] = b ? ordered_json(b->floor_of(at.graph)->level) : ordered_json(nullptr);
  j["graph"] = at.graph;
  j["node"] = w.node_id(at);
  j["x"] = pos.x();
  j["y"] = pos.y();
  return j;
}

std::string_view sign_kind(world::SignKind k) {
  switch (k) {
    case world::SignKind::Instruction: return "instruction";
    case world::SignKind::Entrance: return "entrance";
    case world::SignKind::Directional: return "directional";
  }
  return "instruction";
}

ordered_json beacon_json(const world::WorldDef& w, const world::Beacon* b) {
  if (b == nullptr) return nullptr;
  return {{"id", b->id}, {"at", locator_json(w, b->at)}};
}

}  // namespace

Vec2 campus_projection(const world::WorldDef& world, Locator at) {
  if (at.graph == world::kCampusGraph) return world.campus().position(at.node);
  return world.campus().position(world.building_of(at.graph)->entrance_node);
}

ordered_json make_snapshot(const engine::SessionState& s) {
  const auto& w = *s.world;
  ordered_json j;
  j["session_id"] = s.session_id;
  j["tick"] = s.tick;
  j["stage"] = to_string(s.stage);
  j["category"] = to_string(category(s.stage));
  j["position"] = locator_json(w, s.position);

  ordered_json signs = ordered_json::array();
  for (const auto* sign : engine::visible_signs(s)) {
    signs.push_back({{"id", sign->id},
                     {"kind", sign_kind(sign->kind)},
                     {"barrier", text::to_string(sign->barrier)},
                     {"node", w.node_id(sign->at)},
                     {"text", engine::sign_text(s, *sign)}});
  }
  j["visible_signs"] = std::move(signs);
  j["beacons"] = {{"waypoint", beacon_json(w, engine::active_beacon(s, world::BeaconKind::Waypoint))},
                  {"challenge", beacon_json(w, engine::active_beacon(s, world::BeaconKind::Challenge))}};

  const Vec2 player = campus_projection(w, s.position);
  const Vec2 dest = campus_projection(w, engine::destination(s));
  ordered_json vertical_markers = ordered_json::array();
  for (const auto& m : world::vertical_map(w, player, dest).markers) {
    vertical_markers.push_back({{"kind", m.kind}, {"position", point(m.position)}});
  }
  const auto imap = world::interactive_map(w, player, engine::map_labels(s));
  ordered_json footprints = ordered_json::array();
  for (const auto& b : imap.buildings) {
    footprints.push_back({{"building", b.building}, {"label", b.label}, {"outline", polygon(b.outline)}});
  }
  j["maps"] = {
      {"vertical", {{"show_names", w.maps.vertical.show_names}, {"markers", std::move(vertical_markers)}}},
      {"interactive",
       {{"id", imap.map_id},
        {"help_button", imap.help_button},
        {"buildings", std::move(footprints)},
        {"player", point(imap.player.position)}}},
  };

  j["inventory"] = s.inventory;
  j["backpack_equipped"] = s.backpack_equipped;
  ordered_json items = ordered_json::array();
  for (const auto& [item, at] : s.item_locations) {
    if (at.graph == s.position.graph) items.push_back({{"item", item}, {"node", w.node_id(at)}});
  }
  j["items_here"] = std::move(items);

  if (const auto t = engine::active_timer(s)) {
    j["timer"] = {{"stage", to_string(s.stage)}, {"remaining_ms", t->count()}};
  } else {
    j["timer"] = nullptr;
  }
  j["outcome"] = engine::to_string(s.outcome);
  j["expiry_count"] = s.expiry_count;
  j["help_uses"] = s.help_uses;
  if (s.arrow) {
    j["arrow"] = {{"from", locator_json(w, s.arrow->from)}, {"to", locator_json(w, s.arrow->to)}};
  } else {
    j["arrow"] = nullptr;
  }

  ordered_json npcs = ordered_json::array();
  for (const auto& n : world::npc_positions(w, s.tick)) {
    npcs.push_back({{"route", w.npc_routes[n.route].id}, {"position", point(n.position)}});
  }
  j["npcs"] = std::move(npcs);

  const auto& g = w.graph(s.position.graph);
  ordered_json neighbors = ordered_json::array();
  for (auto n : g.neighbors(s.position.node)) neighbors.push_back(g.id(n));
  j["neighbors"] = std::move(neighbors);
  return j;
}

ordered_json world_layout(const world::WorldDef& w) {
  ordered_json graphs = ordered_json::array();
  for (world::GraphIndex gi = 0; gi < w.graphs.size(); ++gi) {
    const auto& g = w.graphs[gi];
    ordered_json nodes = ordered_json::array();
    ordered_json edges = ordered_json::array();
    for (world::NodeIndex n = 0; n < g.size(); ++n) {
      nodes.push_back({{"id", g.id(n)}, {"x", g.position(n).x()}, {"y", g.position(n).y()}});
      for (auto m : g.neighbors(n)) {
        if (n < m) edges.push_back({g.id(n), g.id(m)});
      }
    }
    const auto* b = w.building_of(gi);
    ordered_json entry{{"graph", gi}, {"area", b ? b->id : "campus"}};
    entry["floor"] = b ? ordered_json(b->floor_of(gi)->level) : ordered_json(nullptr);
    entry["nodes"] = std::move(nodes);
    entry["edges"] = std::move(edges);
    graphs.push_back(std::move(entry));
  }
  ordered_json buildings = ordered_json::array();
  for (const auto& b : w.buildings) {
    buildings.push_back({{"id", b.id},
                         {"entrance_node", w.campus().id(b.entrance_node)},
                         {"footprint", polygon(b.footprint)},
                         {"floors", b.floors.size()}});
  }
  ordered_json stations = ordered_json::array();
  for (const auto& st : w.maps.interactive.stations) {
    stations.push_back({{"id", st.id}, {"node", w.node_id(st.at)}, {"button", st.button}});
  }
  return {{"id", w.id},
          {"campus_entrance", w.campus().id(w.campus_entrance)},
          {"graphs", std::move(graphs)},
          {"buildings", std::move(buildings)},
          {"map_stations", std::move(stations)}};
}

}  // namespace campus::snapshot
