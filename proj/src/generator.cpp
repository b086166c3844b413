#include "frndp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "frndp/error.hpp"

namespace frndp {

namespace {

bool interior_reaches_exit(const std::vector<Node>& nodes,
                           const std::vector<std::vector<int>>& adjacency) {
  std::vector<bool> reached(nodes.size(), false);
  std::queue<int> frontier;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].role == NodeRole::Exit) {
      reached[i] = true;
      frontier.push(static_cast<int>(i));
    }
  }
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adjacency[static_cast<std::size_t>(v)]) {
      if (!reached[static_cast<std::size_t>(w)]) {
        reached[static_cast<std::size_t>(w)] = true;
        frontier.push(w);
      }
    }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool r) { return r; });
}

}  // namespace

RoadNetwork generate_random_instance(const GeneratorParams& params) {
  if (params.n < 2) throw InfeasibleParameters("generator needs n >= 2");
  if (!(params.p > 0.0) || params.p > 1.0) throw InfeasibleParameters("generator needs 0 < p <= 1");
  if (params.fr_count && (*params.fr_count < 0 || *params.fr_count > params.n))
    throw InfeasibleParameters("fr_count must lie in [0, n]");

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> capacity_draw(params.capacity_mean, params.capacity_sd);
  std::normal_distribution<double> demand_draw(params.demand_mean, params.demand_sd);

  const int num_exits = (params.n + 9) / 10;
  const int total = params.n + num_exits;

  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    std::vector<Node> nodes(static_cast<std::size_t>(total));
    for (int i = 0; i < params.n; ++i) {
      Node& node = nodes[static_cast<std::size_t>(i)];
      node.x = unit(rng);
      node.y = unit(rng);
      node.demand = std::round(std::max(params.truncation_floor, demand_draw(rng)));
      node.role = NodeRole::Interior;
    }
    for (int e = 0; e < num_exits; ++e) {
      Node& node = nodes[static_cast<std::size_t>(params.n + e)];
      const double along = unit(rng);
      switch (static_cast<int>(unit(rng) * 4.0)) {
        case 0: node.x = along; node.y = 0.0; break;
        case 1: node.x = 1.0; node.y = along; break;
        case 2: node.x = along; node.y = 1.0; break;
        default: node.x = 0.0; node.y = along; break;
      }
      node.role = NodeRole::Exit;
    }

    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) {
      for (int j = i + 1; j < total; ++j) {
        const Node& a = nodes[static_cast<std::size_t>(i)];
        const Node& b = nodes[static_cast<std::size_t>(j)];
        const double distance = std::hypot(a.x - b.x, a.y - b.y);
        const double probability = params.p * std::exp(-distance / params.decay_length);
        if (unit(rng) >= probability) continue;
        const double capacity = std::max(params.truncation_floor, capacity_draw(rng));
        const double time = std::max(params.min_free_flow, distance * params.time_per_distance);
        arcs.push_back({i, j, capacity, time, params.lanes});
        arcs.push_back({j, i, capacity, time, params.lanes});
        adjacency[static_cast<std::size_t>(i)].push_back(j);
        adjacency[static_cast<std::size_t>(j)].push_back(i);
      }
    }

    std::vector<NodeId> fr_nodes(static_cast<std::size_t>(params.n));
    std::iota(fr_nodes.begin(), fr_nodes.end(), 0);
    if (params.fr_count) {
      std::shuffle(fr_nodes.begin(), fr_nodes.end(), rng);
      fr_nodes.resize(static_cast<std::size_t>(*params.fr_count));
      std::sort(fr_nodes.begin(), fr_nodes.end());
    }

    if (!interior_reaches_exit(nodes, adjacency)) continue;
    return RoadNetwork(std::move(nodes), std::move(arcs), std::move(fr_nodes));
  }
  throw InfeasibleParameters("infeasible parameter regime: no instance with every node "
                             "connected to an exit after " +
                             std::to_string(params.max_attempts) + " attempts");
}

}  // namespace frndp
