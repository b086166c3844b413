#include "frndp/bnb.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <limits>
#include <map>

#include "frndp/error.hpp"
#include "frndp/shortest_path.hpp"

namespace frndp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::optional<PrimalResult> heuristic_design(const RoadNetwork& net, const BnbNode& node) {
  auto cost = free_flow_costs(net);
  std::vector<std::uint8_t> usable(net.num_arcs(), 1);
  for (ArcId a : node.fixed_on) cost[static_cast<std::size_t>(a)] = 0.0;
  for (ArcId a : node.fixed_off) usable[static_cast<std::size_t>(a)] = 0;

  PrimalResult result;
  for (NodeId k : net.fr_nodes()) {
    auto path = shortest_exit_path(net, k, cost, usable);
    if (!path) return std::nullopt;
    result.paths.push_back(std::move(*path));
  }
  result.design = FrDesign::from_paths(net, result.paths);
  for (ArcId a : node.fixed_on) result.design.force_reserved(a);
  return result;
}

std::optional<PrimalResult> primal_heuristic(const RoadNetwork& net, const BnbNode& node,
                                             const UeOptions& ue) {
  auto result = heuristic_design(net, node);
  if (!result) return result;
  try {
    result->ue = solve_ue(apply_reservation(net, result->design), ue, node.parent_flows.get());
  } catch (const DisconnectedSource&) {
  }
  return result;
}

std::optional<BranchChoice> select_branch_link(const RoadNetwork& net, const BnbNode& node,
                                               const std::vector<Path>& paths) {
  const std::size_t targets = net.fr_nodes().size();
  for (std::size_t step = 0; step < targets; ++step) {
    const std::size_t t = (node.branch_target + step) % targets;
    const Path& path = paths[t];
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      if (!node.fixed_on.count(*it) && !node.fixed_off.count(*it)) return BranchChoice{*it, t};
  }
  return std::nullopt;
}

double so_dual_bound(const RoadNetwork& net, const BnbNode& node, const UeOptions& options) {
  std::vector<std::uint8_t> reserved(net.num_arcs(), 0);
  for (ArcId a : node.fixed_on) reserved[static_cast<std::size_t>(a)] = 1;
  try {
    const auto so = solve_so(apply_reservation(net, reserved), options);
    return std::max(0.0, so.lower_bound);
  } catch (const DisconnectedSource&) {
    return std::numeric_limits<double>::infinity();
  }
}

BnbResult bnb_solve(const RoadNetwork& net, const BnbOptions& options) {
  const auto start = Clock::now();
  BnbResult result;
  result.objective = std::numeric_limits<double>::infinity();

  // The same design recurs across nodes (the "reserve" child of an arc already
  // on the route); its objective is solved once.
  std::map<std::string, std::optional<UeResult>> evaluated;

  std::deque<BnbNode> queue{BnbNode{}};
  while (!queue.empty()) {
    if (result.nodes_explored > 0 && seconds_since(start) >= options.time_limit) break;
    BnbNode node = std::move(queue.front());
    queue.pop_front();
    ++result.nodes_explored;

    if (options.use_bounds && result.incumbent &&
        so_dual_bound(net, node, options.ue) >= result.objective) {
      ++result.fathomed_bound;
      continue;
    }

    auto primal = heuristic_design(net, node);
    if (!primal) {
      ++result.fathomed_infeasible;
      continue;
    }
    const auto key = primal->design.key();
    auto it = evaluated.find(key);
    if (it == evaluated.end()) {
      std::optional<UeResult> ue;
      try {
        ue = solve_ue(apply_reservation(net, primal->design), options.ue, node.parent_flows.get());
      } catch (const DisconnectedSource&) {
      }
      it = evaluated.emplace(key, std::move(ue)).first;
    }
    const auto& ue = it->second;
    if (ue && ue->total_time < result.objective) {
      result.incumbent = primal->design;
      result.objective = ue->total_time;
      result.flows = ue->flows;
      result.trace.push_back({seconds_since(start), result.objective, result.nodes_explored});
    }

    const auto branch = select_branch_link(net, node, primal->paths);
    if (!branch) continue;
    auto flows = ue ? std::make_shared<const FlowAssignment>(ue->flows) : node.parent_flows;
    BnbNode reserve{node.fixed_on, node.fixed_off, flows, node.depth + 1, branch->target};
    reserve.fixed_on.insert(branch->arc);
    BnbNode skip{node.fixed_on, node.fixed_off, flows, node.depth + 1, branch->target};
    skip.fixed_off.insert(branch->arc);
    queue.push_back(std::move(reserve));
    queue.push_back(std::move(skip));
  }
  result.search_objective = result.objective;
  if (result.incumbent) {
    // Report the cold solve so the objective does not depend on the warm-start path.
    const auto cold = solve_ue(apply_reservation(net, *result.incumbent), options.ue);
    result.objective = cold.total_time;
    result.flows = cold.flows;
  }
  result.exhausted = queue.empty();
  result.proven_optimal = result.exhausted && options.use_bounds;
  result.wall_time = seconds_since(start);
  return result;
}

void write_incumbent_csv(const BnbResult& result, const std::filesystem::path& file,
                         bool include_times) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << (include_times ? "wall_time_s," : "") << "objective,nodes_explored\n";
  out.precision(10);
  for (const auto& p : result.trace) {
    if (include_times) out << p.wall_time << ',';
    out << p.objective << ',' << p.nodes_explored << '\n';
  }
}

}  // namespace frndp
