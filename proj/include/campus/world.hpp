#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "campus/stage.hpp"
#include "campus/text_barriers.hpp"

namespace campus::world {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;
using NodeIndex = std::uint32_t;
using GraphIndex = std::uint32_t;

inline constexpr GraphIndex kCampusGraph = 0;

// Undirected graph over named 2D points. Nodes are stored sorted by id, so
// NodeIndex order is node-id order and "lowest node-id" tie-breaks reduce to
// comparing indices. Neighbor lists are ascending.
class NavGraph {
 public:
  struct Node {
    std::string id;
    Vec2 position;
  };

  NavGraph() = default;

  // Ids must be unique and every edge must name two distinct known nodes;
  // throws std::invalid_argument otherwise. Duplicate edges are merged.
  NavGraph(std::vector<Node> nodes, const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return nodes_.size(); }
  const std::string& id(NodeIndex n) const { return nodes_[n].id; }
  const Vec2& position(NodeIndex n) const { return nodes_[n].position; }
  std::span<const NodeIndex> neighbors(NodeIndex n) const { return adjacency_[n]; }
  std::optional<NodeIndex> find(std::string_view id) const;
  bool adjacent(NodeIndex a, NodeIndex b) const;
  double edge_length(NodeIndex a, NodeIndex b) const { return (position(a) - position(b)).norm(); }
  std::size_t edge_count() const;

  // Unweighted hop distance from `source` to every node; -1 when unreachable.
  std::vector<int> hop_distances(NodeIndex source) const;
  bool connected() const;

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<NodeIndex>> adjacency_;
};

// A node in one of the world's graphs (the campus or one building floor).
struct Locator {
  GraphIndex graph = kCampusGraph;
  NodeIndex node = 0;

  friend auto operator<=>(const Locator&, const Locator&) = default;
};

struct Floor {
  int level = 0;
  GraphIndex graph = 0;
  std::optional<NodeIndex> entry_node;  // where the player appears on entering
  std::optional<NodeIndex> stair_node;
  std::vector<NodeIndex> rooms;
};

enum class BuildingRole { Shell, MaterialsTask, ExamTask };

struct Building {
  std::string id;
  std::string name;
  BuildingRole role = BuildingRole::Shell;
  NodeIndex entrance_node = 0;  // campus graph
  Polygon footprint;
  std::vector<Floor> floors;
  std::optional<Locator> exam_room;
  std::optional<Locator> seat_zone;
  std::map<std::string, Locator> item_locations;

  bool has_interior() const { return !floors.empty(); }
  const Floor* floor_at(int level) const;
  const Floor* floor_of(GraphIndex graph) const;
  std::optional<Locator> entry() const;
};

enum class SignKind { Instruction, Entrance, Directional };

struct Sign {
  std::string id;
  SignKind kind = SignKind::Instruction;
  Locator at;
  std::string base_text;
  text::BarrierKind barrier = text::BarrierKind::None;
  std::optional<std::string> dynamic_rule;  // e.g. "wrong-building-warning"
  std::optional<std::string> building;      // entrance signs only
};

enum class BeaconKind { Waypoint, Challenge };

struct Beacon {
  std::string id;
  BeaconKind kind = BeaconKind::Waypoint;
  Locator at;
  std::vector<Stage> stages;  // stages during which this beacon is lit
};

struct MapStation {
  std::string id;
  Locator at;
  std::string button;
};

struct VerticalMapDef {
  std::vector<std::string> markers;  // "player", "destination"
  bool show_names = false;
};

struct InteractiveMapDef {
  std::string id;
  bool show_names = true;
  bool help_button = true;
  std::map<std::string, Polygon> footprints;  // building id -> distorted outline
  std::vector<MapStation> stations;
};

struct MapViews {
  VerticalMapDef vertical;
  InteractiveMapDef interactive;
};

struct NpcRoute {
  std::string id;
  std::vector<NodeIndex> nodes;  // campus cycle; last node links back to the first
  double speed = 1.0;            // world units per second
};

struct WorldDef {
  std::string id;
  std::vector<NavGraph> graphs;  // [0] is the campus
  NodeIndex campus_entrance = 0;
  std::vector<Building> buildings;
  std::vector<Sign> signs;
  std::vector<Beacon> beacons;
  std::vector<NpcRoute> npc_routes;
  MapViews maps;

  const NavGraph& campus() const { return graphs[kCampusGraph]; }
  const NavGraph& graph(GraphIndex g) const { return graphs.at(g); }

  const Building* building(std::string_view id) const;
  const Building& building_with_role(BuildingRole role) const;
  // Building whose interior contains `graph`; nullptr for the campus.
  const Building* building_of(GraphIndex graph) const;
  const Sign* sign(std::string_view id) const;
  const MapStation* station_with_button(std::string_view button) const;

  // Resolves a node id across every graph.
  std::optional<Locator> locate(std::string_view node_id) const;
  const std::string& node_id(Locator at) const { return graph(at.graph).id(at.node); }
  const Vec2& position(Locator at) const { return graph(at.graph).position(at.node); }
};

// --- loading ---------------------------------------------------------------

// Parses and validates a world document. Throws SchemaError for malformed
// documents and InvariantError listing every violated rule.
WorldDef load_world(std::string_view document, std::string world_id = "default");
WorldDef load_world_file(const std::string& path);
// The default world compiled into the library.
const WorldDef& default_world();

}  // namespace campus::world
