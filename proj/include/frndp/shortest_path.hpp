#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frndp/network.hpp"

namespace frndp {

/// Shortest routes from every node to its nearest exit (super-sink Dijkstra on
/// the reversed graph). Exits are terminal: routes never pass through one.
struct ExitTree {
  std::vector<double> dist;  // +inf when no exit is reachable
  std::vector<ArcId> next;   // first arc of the route, -1 at exits and unreachable nodes

  bool reaches_exit(NodeId v) const;
};

/// `usable` may be empty (all arcs usable). Equal-length alternatives resolve
/// to the successor with the smallest node id.
ExitTree shortest_tree_to_exits(const RoadNetwork& net, std::span<const double> arc_cost,
                                std::span<const std::uint8_t> usable = {});

/// Route from `from` along the tree; empty for exits.
Path tree_path(const RoadNetwork& net, const ExitTree& tree, NodeId from);

/// Forward Dijkstra from `source` to the nearest exit, restricted to usable
/// arcs and avoiding blocked nodes. Ties go to the smaller predecessor id.
std::optional<Path> shortest_exit_path(const RoadNetwork& net, NodeId source,
                                       std::span<const double> arc_cost,
                                       std::span<const std::uint8_t> usable = {},
                                       std::span<const std::uint8_t> blocked_nodes = {});

std::vector<double> free_flow_costs(const RoadNetwork& net);

}  // namespace frndp
