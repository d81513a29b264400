#include "campus/world.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "campus/bundled_data.hpp"
#include "campus/errors.hpp"

namespace campus::world {

using nlohmann::json;

// ---------------------------------------------------------------------------
// NavGraph

NavGraph::NavGraph(std::vector<Node> nodes,
                   const std::vector<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) {
      throw std::invalid_argument("duplicate node id '" + nodes_[i].id + "'");
    }
  }
  adjacency_.resize(nodes_.size());
  for (const auto& [a, b] : edges) {
    const auto ia = find(a);
    const auto ib = find(b);
    if (!ia || !ib) throw std::invalid_argument("edge " + a + "-" + b + " names an unknown node");
    if (*ia == *ib) throw std::invalid_argument("self-loop at '" + a + "'");
    adjacency_[*ia].push_back(*ib);
    adjacency_[*ib].push_back(*ia);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::optional<NodeIndex> NavGraph::find(std::string_view id) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const Node& n, std::string_view key) { return n.id < key; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

bool NavGraph::adjacent(NodeIndex a, NodeIndex b) const {
  const auto& list = adjacency_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

std::size_t NavGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

std::vector<int> NavGraph::hop_distances(NodeIndex source) const {
  std::vector<int> dist(nodes_.size(), -1);
  std::deque<NodeIndex> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const NodeIndex n = frontier.front();
    frontier.pop_front();
    for (NodeIndex m : adjacency_[n]) {
      if (dist[m] < 0) {
        dist[m] = dist[n] + 1;
        frontier.push_back(m);
      }
    }
  }
  return dist;
}

bool NavGraph::connected() const {
  if (nodes_.empty()) return true;
  const auto dist = hop_distances(0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

// ---------------------------------------------------------------------------
// WorldDef lookups

const Floor* Building::floor_at(int level) const {
  for (const auto& f : floors) {
    if (f.level == level) return &f;
  }
  return nullptr;
}

const Floor* Building::floor_of(GraphIndex graph) const {
  for (const auto& f : floors) {
    if (f.graph == graph) return &f;
  }
  return nullptr;
}

std::optional<Locator> Building::entry() const {
  for (const auto& f : floors) {
    if (f.entry_node) return Locator{f.graph, *f.entry_node};
  }
  return std::nullopt;
}

const Building* WorldDef::building(std::string_view id) const {
  for (const auto& b : buildings) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const Building& WorldDef::building_with_role(BuildingRole role) const {
  for (const auto& b : buildings) {
    if (b.role == role) return b;
  }
  throw UnknownIdError("world has no building with the requested task role");
}

const Building* WorldDef::building_of(GraphIndex graph) const {
  if (graph == kCampusGraph) return nullptr;
  for (const auto& b : buildings) {
    if (b.floor_of(graph) != nullptr) return &b;
  }
  return nullptr;
}

const Sign* WorldDef::sign(std::string_view id) const {
  for (const auto& s : signs) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const MapStation* WorldDef::station_with_button(std::string_view button) const {
  for (const auto& s : maps.interactive.stations) {
    if (s.button == button) return &s;
  }
  return nullptr;
}

std::optional<Locator> WorldDef::locate(std::string_view node_id) const {
  for (GraphIndex g = 0; g < graphs.size(); ++g) {
    if (auto n = graphs[g].find(node_id)) return Locator{g, *n};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Loader

namespace {

// Typed field access that reports the document path on failure.
class Reader {
 public:
  static const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + "." + key, "missing required key");
    return *it;
  }

  static const json* optional_field(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  static std::string string(const json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected a string");
    return v.get<std::string>();
  }

  static double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    return v.get<double>();
  }

  static bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw SchemaError(path, "expected a boolean");
    return v.get<bool>();
  }

  static const json& array(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array");
    return v;
  }

  static std::string str(const json& obj, const std::string& key, const std::string& path) {
    return string(field(obj, key, path), path + "." + key);
  }

  static Vec2 point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [x, y]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  static Polygon polygon(const json& v, const std::string& path) {
    Polygon out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i) {
      out.push_back(point(v[i], path + "[" + std::to_string(i) + "]"));
    }
    if (out.size() < 3) throw SchemaError(path, "polygon needs at least 3 vertices");
    return out;
  }
};

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

struct RawGraph {
  std::vector<NavGraph::Node> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> tags;  // parallel to nodes (joined)
};

RawGraph read_graph(const json& nodes, const json& edges, const std::string& nodes_path,
                    const std::string& edges_path) {
  RawGraph raw;
  Reader::array(nodes, nodes_path);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto path = idx(nodes_path, i);
    const auto& n = nodes[i];
    raw.nodes.push_back({Reader::str(n, "id", path),
                         {Reader::number(Reader::field(n, "x", path), path + ".x"),
                          Reader::number(Reader::field(n, "y", path), path + ".y")}});
    std::string tags;
    if (const auto* t = Reader::optional_field(n, "tags")) {
      for (std::size_t k = 0; k < Reader::array(*t, path + ".tags").size(); ++k) {
        tags += Reader::string((*t)[k], idx(path + ".tags", k)) + ",";
      }
    }
    raw.tags.push_back(tags);
  }
  Reader::array(edges, edges_path);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto path = idx(edges_path, i);
    if (!edges[i].is_array() || edges[i].size() != 2) throw SchemaError(path, "expected [a, b]");
    raw.edges.emplace_back(Reader::string(edges[i][0], path + "[0]"),
                           Reader::string(edges[i][1], path + "[1]"));
  }
  return raw;
}

class Validator {
 public:
  void fail(std::string rule, std::string path, std::string message) {
    violations_.push_back({std::move(rule), std::move(path), std::move(message)});
  }
  bool ok() const { return violations_.empty(); }
  std::vector<RuleViolation> take() { return std::move(violations_); }

  // Checks the per-graph invariants; returns a built graph when they hold.
  std::optional<NavGraph> graph(const RawGraph& raw, const std::string& nodes_path,
                                const std::string& edges_path, std::set<std::string>& global_ids) {
    bool sound = true;
    std::set<std::string> ids;
    std::set<std::pair<double, double>> positions;
    for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
      const auto& n = raw.nodes[i];
      if (!ids.insert(n.id).second || !global_ids.insert(n.id).second) {
        fail("node-id-unique", idx(nodes_path, i), "duplicate node id '" + n.id + "'");
        sound = false;
      }
      if (!positions.insert({n.position.x(), n.position.y()}).second) {
        fail("node-position-unique", idx(nodes_path, i),
             "node '" + n.id + "' shares its position with another node");
      }
    }
    std::map<std::string, Vec2> where;
    for (const auto& n : raw.nodes) where.emplace(n.id, n.position);
    for (std::size_t i = 0; i < raw.edges.size(); ++i) {
      const auto& [a, b] = raw.edges[i];
      const auto path = idx(edges_path, i);
      const auto ia = where.find(a);
      const auto ib = where.find(b);
      if (ia == where.end() || ib == where.end()) {
        fail("edge-endpoint-exists", path, "edge " + a + "-" + b + " names an unknown node");
        sound = false;
        continue;
      }
      if (a == b) {
        fail("no-self-loop", path, "self-loop at '" + a + "'");
        sound = false;
        continue;
      }
      if ((ia->second - ib->second).norm() <= 0.0) {
        fail("edge-length-positive", path, "edge " + a + "-" + b + " has zero length");
      }
    }
    if (!sound) return std::nullopt;
    return NavGraph(raw.nodes, raw.edges);
  }

 private:
  std::vector<RuleViolation> violations_;
};

bool same_vertex_set(const Polygon& a, const Polygon& b) {
  auto key = [](const Polygon& p) {
    std::set<std::pair<double, double>> s;
    for (const auto& v : p) s.insert({v.x(), v.y()});
    return s;
  };
  return key(a) == key(b);
}

BuildingRole parse_role(const std::string& s, const std::string& path) {
  if (s == "shell") return BuildingRole::Shell;
  if (s == "materials-task") return BuildingRole::MaterialsTask;
  if (s == "exam-task") return BuildingRole::ExamTask;
  throw SchemaError(path, "unknown building role '" + s + "'");
}

SignKind parse_sign_kind(const std::string& s, const std::string& path) {
  if (s == "instruction") return SignKind::Instruction;
  if (s == "entrance") return SignKind::Entrance;
  if (s == "directional") return SignKind::Directional;
  throw SchemaError(path, "unknown sign kind '" + s + "'");
}

BeaconKind parse_beacon_kind(const std::string& s, const std::string& path) {
  if (s == "waypoint") return BeaconKind::Waypoint;
  if (s == "challenge") return BeaconKind::Challenge;
  throw SchemaError(path, "unknown beacon kind '" + s + "'");
}

constexpr std::size_t kBuildingCount = 7;
constexpr std::array<std::string_view, 2> kRequiredBuildings{"Agatha Christie", "Galileo Galilei"};

}  // namespace

WorldDef load_world(std::string_view document, std::string world_id) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  for (const char* key : {"buildings", "nodes", "edges", "signs", "beacons", "npc_routes", "maps"}) {
    Reader::field(doc, key, "$");
  }

  WorldDef world;
  world.id = std::move(world_id);
  Validator check;
  std::set<std::string> global_ids;

  // Campus graph.
  const RawGraph campus_raw = read_graph(doc["nodes"], doc["edges"], "nodes", "edges");
  auto campus = check.graph(campus_raw, "nodes", "edges", global_ids);
  if (campus && !campus->connected()) {
    check.fail("graph-connected", "edges", "campus graph is not connected");
  }
  world.graphs.push_back(campus ? std::move(*campus) : NavGraph{});
  const bool campus_ok = campus.has_value();

  std::vector<std::size_t> entrances;
  for (std::size_t i = 0; i < campus_raw.tags.size(); ++i) {
    if (campus_raw.tags[i].find("campus-entrance,") != std::string::npos) entrances.push_back(i);
  }
  if (entrances.size() != 1) {
    check.fail("campus-entrance", "nodes", "exactly one node must carry the campus-entrance tag");
  } else if (campus_ok) {
    world.campus_entrance = *world.campus().find(campus_raw.nodes[entrances.front()].id);
  }

  auto campus_node = [&](const std::string& id) -> std::optional<NodeIndex> {
    if (!campus_ok) return std::nullopt;
    return world.campus().find(id);
  };

  // Buildings and interiors.
  const auto& buildings = Reader::array(doc["buildings"], "buildings");
  if (buildings.size() != kBuildingCount) {
    check.fail("building-count", "buildings",
               "expected exactly 7 buildings, found " + std::to_string(buildings.size()));
  }
  std::set<std::string> names, ids;
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const auto path = idx("buildings", i);
    const auto& b = buildings[i];
    Building building;
    building.id = Reader::str(b, "id", path);
    building.name = Reader::str(b, "name", path);
    building.role = parse_role(Reader::str(b, "role", path), path + ".role");
    building.footprint = Reader::polygon(Reader::field(b, "footprint", path), path + ".footprint");
    if (!ids.insert(building.id).second) {
      check.fail("building-id-unique", path + ".id", "duplicate building id '" + building.id + "'");
    }
    if (!names.insert(building.name).second) {
      check.fail("building-name-unique", path + ".name",
                 "duplicate building name '" + building.name + "'");
    }
    const auto entrance_id = Reader::str(b, "entrance_node", path);
    if (auto n = campus_node(entrance_id)) {
      building.entrance_node = *n;
    } else if (campus_ok) {
      check.fail("entrance-node-exists", path + ".entrance_node",
                 "entrance node '" + entrance_id + "' is not in the campus graph");
    }

    if (const auto* interior = Reader::optional_field(b, "interior")) {
      const auto ipath = path + ".interior";
      const auto& floors = Reader::array(Reader::field(*interior, "floors", ipath), ipath + ".floors");
      for (std::size_t f = 0; f < floors.size(); ++f) {
        const auto fpath = idx(ipath + ".floors", f);
        const auto& fl = floors[f];
        const RawGraph raw = read_graph(Reader::field(fl, "nodes", fpath), Reader::field(fl, "edges", fpath),
                                        fpath + ".nodes", fpath + ".edges");
        auto graph = check.graph(raw, fpath + ".nodes", fpath + ".edges", global_ids);
        if (!graph) continue;
        Floor floor;
        floor.level = static_cast<int>(Reader::number(Reader::field(fl, "level", fpath), fpath + ".level"));
        floor.graph = static_cast<GraphIndex>(world.graphs.size());
        if (!graph->connected()) {
          check.fail("floor-connected", fpath, "floor graph is not connected to its stair node");
        }
        if (const auto* e = Reader::optional_field(fl, "entry")) {
          floor.entry_node = graph->find(Reader::string(*e, fpath + ".entry"));
          if (!floor.entry_node) check.fail("floor-entry", fpath + ".entry", "entry node is not on this floor");
        }
        if (const auto* s = Reader::optional_field(fl, "stairs")) {
          floor.stair_node = graph->find(Reader::string(*s, fpath + ".stairs"));
          if (!floor.stair_node) check.fail("floor-stairs", fpath + ".stairs", "stair node is not on this floor");
        }
        if (const auto* rooms = Reader::optional_field(fl, "rooms")) {
          for (std::size_t r = 0; r < Reader::array(*rooms, fpath + ".rooms").size(); ++r) {
            const auto room = Reader::string((*rooms)[r], idx(fpath + ".rooms", r));
            if (auto n = graph->find(room)) {
              floor.rooms.push_back(*n);
            } else {
              check.fail("room-exists", idx(fpath + ".rooms", r), "room '" + room + "' is not on this floor");
            }
          }
        }
        world.graphs.push_back(std::move(*graph));
        building.floors.push_back(std::move(floor));
      }
      if (building.floors.size() > 1) {
        for (std::size_t f = 0; f < building.floors.size(); ++f) {
          if (!building.floors[f].stair_node) {
            check.fail("floor-stairs", idx(ipath + ".floors", f), "multi-floor building needs a stair node on every floor");
          }
        }
      }
      if (!building.floors.empty() && !building.entry()) {
        check.fail("floor-entry", ipath, "interior has no entry node");
      }

      auto interior_node = [&](const std::string& id, const std::string& p,
                               const char* rule) -> std::optional<Locator> {
        std::vector<Locator> hits;
        for (const auto& fl : building.floors) {
          if (auto n = world.graphs[fl.graph].find(id)) hits.push_back({fl.graph, *n});
        }
        if (hits.size() != 1) {
          check.fail(rule, p, "'" + id + "' must lie on exactly one floor of " + building.name);
          return std::nullopt;
        }
        return hits.front();
      };
      if (const auto* e = Reader::optional_field(*interior, "exam_room")) {
        building.exam_room = interior_node(Reader::string(*e, ipath + ".exam_room"), ipath + ".exam_room",
                                           "exam-room-single-floor");
      }
      if (const auto* z = Reader::optional_field(*interior, "seat_zone")) {
        building.seat_zone = interior_node(Reader::string(*z, ipath + ".seat_zone"), ipath + ".seat_zone",
                                           "seat-zone-exists");
      }
      if (const auto* items = Reader::optional_field(*interior, "items")) {
        if (!items->is_object()) throw SchemaError(ipath + ".items", "expected an object");
        for (const auto& [item, room] : items->items()) {
          const auto p = ipath + ".items." + item;
          if (auto at = interior_node(Reader::string(room, p), p, "item-location")) {
            building.item_locations.emplace(item, *at);
          }
        }
      }
    }
    world.buildings.push_back(std::move(building));
  }
  for (auto required : kRequiredBuildings) {
    if (!names.count(std::string(required))) {
      check.fail("required-building", "buildings", "missing building '" + std::string(required) + "'");
    }
  }
  const auto role_count = [&](BuildingRole r) {
    return std::count_if(world.buildings.begin(), world.buildings.end(),
                         [r](const Building& b) { return b.role == r; });
  };
  if (role_count(BuildingRole::MaterialsTask) != 1 || role_count(BuildingRole::ExamTask) != 1) {
    check.fail("task-buildings", "buildings",
               "exactly one materials-task and one exam-task building are required");
  }
  for (std::size_t i = 0; i < world.buildings.size(); ++i) {
    const auto& b = world.buildings[i];
    const auto path = idx("buildings", i);
    if (b.role == BuildingRole::MaterialsTask &&
        (!b.item_locations.count("notebook") || !b.item_locations.count("pen"))) {
      check.fail("item-location", path, "materials building must hold the notebook and the pen");
    }
    if (b.role == BuildingRole::ExamTask && (!b.exam_room || !b.seat_zone)) {
      check.fail("exam-room-single-floor", path, "exam building needs an exam room and a seat zone");
    }
    if (b.role != BuildingRole::Shell && !b.has_interior()) {
      check.fail("task-buildings", path, "task building needs an interior");
    }
  }

  // Signs.
  const auto& signs = Reader::array(doc["signs"], "signs");
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const auto path = idx("signs", i);
    const auto& s = signs[i];
    Sign sign;
    sign.id = Reader::str(s, "id", path);
    sign.kind = parse_sign_kind(Reader::str(s, "kind", path), path + ".kind");
    sign.base_text = Reader::str(s, "text", path);
    try {
      sign.barrier = text::barrier_kind_from_string(Reader::str(s, "barrier", path));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path + ".barrier", e.what());
    }
    if (const auto* r = Reader::optional_field(s, "dynamic_rule")) sign.dynamic_rule = Reader::string(*r, path + ".dynamic_rule");
    if (const auto* b = Reader::optional_field(s, "building")) sign.building = Reader::string(*b, path + ".building");
    const auto node = Reader::str(s, "node", path);
    if (auto at = world.locate(node)) {
      sign.at = *at;
    } else {
      check.fail("sign-node-exists", path + ".node", "sign node '" + node + "' does not exist");
    }
    if (sign.kind == SignKind::Entrance) {
      const Building* b = sign.building ? world.building(*sign.building) : nullptr;
      if (b == nullptr) {
        check.fail("entrance-sign-names-building", path + ".building", "entrance sign must reference a building");
      } else if (sign.base_text.find(b->name) == std::string::npos) {
        check.fail("entrance-sign-names-building", path + ".text",
                   "entrance sign text must carry the name '" + b->name + "'");
      }
    }
    world.signs.push_back(std::move(sign));
  }

  // Beacons.
  const auto& beacons = Reader::array(doc["beacons"], "beacons");
  std::map<Stage, int> waypoints_per_stage;
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    const auto path = idx("beacons", i);
    const auto& b = beacons[i];
    Beacon beacon;
    beacon.id = Reader::str(b, "id", path);
    beacon.kind = parse_beacon_kind(Reader::str(b, "kind", path), path + ".kind");
    const auto node = Reader::str(b, "node", path);
    if (auto at = world.locate(node)) {
      beacon.at = *at;
    } else {
      check.fail("beacon-node-exists", path + ".node", "beacon node '" + node + "' does not exist");
    }
    const auto& stages = Reader::array(Reader::field(b, "stages", path), path + ".stages");
    for (std::size_t k = 0; k < stages.size(); ++k) {
      const auto name = Reader::string(stages[k], idx(path + ".stages", k));
      const auto stage = stage_from_string(name);
      if (!stage) throw SchemaError(idx(path + ".stages", k), "unknown stage '" + name + "'");
      beacon.stages.push_back(*stage);
      if (beacon.kind == BeaconKind::Waypoint && ++waypoints_per_stage[*stage] > 1) {
        check.fail("waypoint-per-stage", path, "more than one waypoint beacon lit during " + name);
      }
    }
    world.beacons.push_back(std::move(beacon));
  }

  // NPC routes.
  const auto& routes = Reader::array(doc["npc_routes"], "npc_routes");
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const auto path = idx("npc_routes", i);
    const auto& r = routes[i];
    NpcRoute route;
    route.id = Reader::str(r, "id", path);
    if (const auto* sp = Reader::optional_field(r, "speed")) route.speed = Reader::number(*sp, path + ".speed");
    if (route.speed <= 0.0) check.fail("npc-route-cycle", path + ".speed", "speed must be positive");
    const auto& nodes = Reader::array(Reader::field(r, "nodes", path), path + ".nodes");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto id = Reader::string(nodes[k], idx(path + ".nodes", k));
      if (auto n = campus_node(id)) {
        route.nodes.push_back(*n);
      } else if (campus_ok) {
        check.fail("npc-route-cycle", idx(path + ".nodes", k), "route node '" + id + "' is not on the campus");
      }
    }
    if (route.nodes.size() == nodes.size() && campus_ok) {
      if (route.nodes.size() < 2) {
        check.fail("npc-route-cycle", path + ".nodes", "route needs at least two nodes");
      } else {
        for (std::size_t k = 0; k < route.nodes.size(); ++k) {
          const auto a = route.nodes[k];
          const auto b = route.nodes[(k + 1) % route.nodes.size()];
          if (!world.campus().adjacent(a, b)) {
            check.fail("npc-route-cycle", idx(path + ".nodes", k), "consecutive route nodes are not adjacent");
          }
        }
      }
    }
    world.npc_routes.push_back(std::move(route));
  }

  // Maps.
  const auto& maps = doc["maps"];
  const auto& vertical = Reader::field(maps, "vertical", "maps");
  const auto& markers = Reader::array(Reader::field(vertical, "markers", "maps.vertical"), "maps.vertical.markers");
  for (std::size_t k = 0; k < markers.size(); ++k) {
    world.maps.vertical.markers.push_back(Reader::string(markers[k], idx("maps.vertical.markers", k)));
  }
  world.maps.vertical.show_names =
      Reader::boolean(Reader::field(vertical, "show_names", "maps.vertical"), "maps.vertical.show_names");
  const std::vector<std::string> expected_markers{"player", "destination"};
  if (world.maps.vertical.markers != expected_markers || world.maps.vertical.show_names) {
    check.fail("vertical-map-cardinality", "maps.vertical",
               "vertical map must expose exactly the player and destination markers and no names");
  }

  const auto& interactive = Reader::field(maps, "interactive", "maps");
  auto& im = world.maps.interactive;
  im.id = Reader::str(interactive, "id", "maps.interactive");
  im.show_names = Reader::boolean(Reader::field(interactive, "show_names", "maps.interactive"),
                                  "maps.interactive.show_names");
  im.help_button = Reader::boolean(Reader::field(interactive, "help_button", "maps.interactive"),
                                   "maps.interactive.help_button");
  const auto& footprints = Reader::field(interactive, "footprints", "maps.interactive");
  if (!footprints.is_object()) throw SchemaError("maps.interactive.footprints", "expected an object");
  for (const auto& [bid, poly] : footprints.items()) {
    im.footprints.emplace(bid, Reader::polygon(poly, "maps.interactive.footprints." + bid));
  }
  bool covers = im.show_names && im.footprints.size() == kBuildingCount &&
                world.buildings.size() == kBuildingCount;
  for (const auto& b : world.buildings) {
    const auto it = im.footprints.find(b.id);
    if (it == im.footprints.end()) {
      covers = false;
      continue;
    }
    if (same_vertex_set(it->second, b.footprint)) {
      check.fail("footprint-distorted", "maps.interactive.footprints." + b.id,
                 "map footprint of " + b.name + " matches its true footprint");
    }
  }
  if (!covers) {
    check.fail("interactive-map-cardinality", "maps.interactive",
               "interactive map must show all 7 buildings with names");
  }
  if (const auto* stations = Reader::optional_field(interactive, "stations")) {
    for (std::size_t k = 0; k < Reader::array(*stations, "maps.interactive.stations").size(); ++k) {
      const auto path = idx("maps.interactive.stations", k);
      MapStation st;
      st.id = Reader::str((*stations)[k], "id", path);
      st.button = Reader::str((*stations)[k], "button", path);
      const auto node = Reader::str((*stations)[k], "node", path);
      if (auto at = world.locate(node)) {
        st.at = *at;
      } else {
        check.fail("station-node-exists", path + ".node", "map station node '" + node + "' does not exist");
      }
      im.stations.push_back(std::move(st));
    }
  }
  if (!world.station_with_button("tutorial-map")) {
    check.fail("tutorial-map", "maps.interactive.stations", "a station with the tutorial-map button is required");
  }

  if (!check.ok()) throw InvariantError(check.take());
  return world;
}

WorldDef load_world_file(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path file = path;
  if (fs::is_directory(file)) file /= "world.json";
  std::ifstream in(file);
  if (!in) throw SchemaError(path, "cannot open world document");
  std::stringstream buffer;
  buffer << in.rdbuf();
  // worlds/<id>/world.json takes its id from the directory; other files from their stem.
  const fs::path norm = file.lexically_normal();
  std::string id = norm.filename() == "world.json" && norm.has_parent_path()
                       ? norm.parent_path().filename().string()
                       : norm.stem().string();
  if (id.empty()) id = "default";
  return load_world(buffer.str(), id);
}

const WorldDef& default_world() {
  static const WorldDef world = load_world(bundled::default_world(), "default");
  return world;
}

}  // namespace campus::world
