#include "frndp/shortest_path.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace frndp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_length(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool arc_usable(std::span<const std::uint8_t> usable, ArcId a) {
  return usable.empty() || usable[static_cast<std::size_t>(a)] != 0;
}

using Entry = std::pair<double, NodeId>;
using MinQueue = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

}  // namespace

bool ExitTree::reaches_exit(NodeId v) const {
  return std::isfinite(dist[static_cast<std::size_t>(v)]);
}

ExitTree shortest_tree_to_exits(const RoadNetwork& net, std::span<const double> arc_cost,
                                std::span<const std::uint8_t> usable) {
  const std::size_t n = net.num_nodes();
  ExitTree tree{std::vector<double>(n, kInf), std::vector<ArcId>(n, -1)};
  std::vector<bool> done(n, false);
  MinQueue queue;
  for (NodeId e : net.exits()) {
    tree.dist[static_cast<std::size_t>(e)] = 0.0;
    queue.emplace(0.0, e);
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[static_cast<std::size_t>(v)]) continue;
    done[static_cast<std::size_t>(v)] = true;
    for (ArcId a : net.in_arcs(v)) {
      if (!arc_usable(usable, a)) continue;
      const NodeId u = net.arc(a).from;
      const auto ui = static_cast<std::size_t>(u);
      if (net.is_exit(u) || done[ui]) continue;
      const double candidate = d + arc_cost[static_cast<std::size_t>(a)];
      const double current = tree.dist[ui];
      const bool better = candidate < current && !same_length(candidate, current);
      const bool tie = same_length(candidate, current) && tree.next[ui] >= 0 &&
                       v < net.arc(tree.next[ui]).to;
      if (better || tie) {
        tree.dist[ui] = std::min(candidate, current);
        tree.next[ui] = a;
        queue.emplace(tree.dist[ui], u);
      }
    }
  }
  return tree;
}

Path tree_path(const RoadNetwork& net, const ExitTree& tree, NodeId from) {
  Path path;
  NodeId at = from;
  while (!net.is_exit(at)) {
    const ArcId a = tree.next[static_cast<std::size_t>(at)];
    if (a < 0) return {};
    path.push_back(a);
    at = net.arc(a).to;
  }
  return path;
}

std::optional<Path> shortest_exit_path(const RoadNetwork& net, NodeId source,
                                       std::span<const double> arc_cost,
                                       std::span<const std::uint8_t> usable,
                                       std::span<const std::uint8_t> blocked_nodes) {
  const std::size_t n = net.num_nodes();
  std::vector<double> dist(n, kInf);
  std::vector<ArcId> prev(n, -1);
  std::vector<bool> done(n, false);
  MinQueue queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    const auto vi = static_cast<std::size_t>(v);
    if (done[vi]) continue;
    done[vi] = true;
    if (net.is_exit(v) && v != source) {
      Path path;
      for (NodeId at = v; at != source;) {
        const ArcId a = prev[static_cast<std::size_t>(at)];
        path.push_back(a);
        at = net.arc(a).from;
      }
      return Path(path.rbegin(), path.rend());
    }
    for (ArcId a : net.out_arcs(v)) {
      if (!arc_usable(usable, a)) continue;
      const NodeId w = net.arc(a).to;
      const auto wi = static_cast<std::size_t>(w);
      if (done[wi]) continue;
      if (!blocked_nodes.empty() && blocked_nodes[wi]) continue;
      const double candidate = d + arc_cost[static_cast<std::size_t>(a)];
      const bool better = candidate < dist[wi] && !same_length(candidate, dist[wi]);
      const bool tie = same_length(candidate, dist[wi]) && prev[wi] >= 0 &&
                       v < net.arc(prev[wi]).from;
      if (better || tie) {
        dist[wi] = std::min(candidate, dist[wi]);
        prev[wi] = a;
        queue.emplace(dist[wi], w);
      }
    }
  }
  return std::nullopt;
}

std::vector<double> free_flow_costs(const RoadNetwork& net) {
  std::vector<double> cost(net.num_arcs());
  for (std::size_t a = 0; a < cost.size(); ++a)
    cost[a] = net.arc(static_cast<ArcId>(a)).free_flow_time;
  return cost;
}

}  // namespace frndp
