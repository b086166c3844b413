#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "frndp/assignment.hpp"
#include "frndp/network.hpp"

namespace frndp {

struct BnbNode {
  std::set<ArcId> fixed_on;   // must be reserved
  std::set<ArcId> fixed_off;  // must stay public
  std::shared_ptr<const FlowAssignment> parent_flows;
  int depth = 0;
  std::size_t branch_target = 0;  // index into fr_nodes() to branch on next
};

struct PrimalResult {
  FrDesign design;
  std::vector<Path> paths;      // one per FR target
  std::optional<UeResult> ue;   // absent when the design strands evacuees
};

/// Routes and design of the primal heuristic without the UE solve.
std::optional<PrimalResult> heuristic_design(const RoadNetwork& net, const BnbNode& node);

/// Per FR target, the shortest route to an exit avoiding fixed_off arcs with
/// fixed_on arcs at zero length; the design reserves those routes plus every
/// fixed_on arc. Evaluated by solve_ue warm-started from the parent flows.
/// std::nullopt when some target cannot reach an exit (node is fathomed).
std::optional<PrimalResult> primal_heuristic(const RoadNetwork& net, const BnbNode& node,
                                             const UeOptions& ue = {});

struct BranchChoice {
  ArcId arc = 0;
  std::size_t target = 0;  // index into fr_nodes()
};

/// First unfixed arc on a target's route counted from the exit end, starting
/// with `node.branch_target` and moving through fr_nodes() order.
/// std::nullopt when every arc of every route is fixed.
std::optional<BranchChoice> select_branch_link(const RoadNetwork& net, const BnbNode& node,
                                               const std::vector<Path>& paths);

/// System-optimal total time with only fixed_on reservations applied: a lower
/// bound for every design in the subtree. +inf when those reservations
/// already strand evacuees.
double so_dual_bound(const RoadNetwork& net, const BnbNode& node, const UeOptions& options = {});

struct BnbOptions {
  double time_limit = 300.0;  // seconds; the root is always processed
  bool use_bounds = false;
  UeOptions ue;
};

struct IncumbentPoint {
  double wall_time = 0.0;
  double objective = 0.0;
  std::size_t nodes_explored = 0;
};

struct BnbResult {
  std::optional<FrDesign> incumbent;
  double objective = 0.0;         // cold solve_ue total time at the incumbent
  double search_objective = 0.0;  // warm-started value that won the search
  FlowAssignment flows;
  std::size_t nodes_explored = 0;
  std::size_t fathomed_infeasible = 0;
  std::size_t fathomed_bound = 0;
  bool exhausted = false;       // queue emptied before the time limit
  bool proven_optimal = false;  // exhausted with bounds enabled
  double wall_time = 0.0;
  std::vector<IncumbentPoint> trace;
};

/// Breadth-first branch and bound over lane fixings; "reserve" child first.
/// Node designs are evaluated warm-started from the parent's flows.
BnbResult bnb_solve(const RoadNetwork& net, const BnbOptions& options = {});

/// CSV: wall_time_s,objective,nodes_explored.
void write_incumbent_csv(const BnbResult& result, const std::filesystem::path& file,
                         bool include_times = true);

}  // namespace frndp
