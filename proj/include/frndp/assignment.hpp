#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frndp/network.hpp"

namespace frndp {

/// Per-arc evacuee flow x_ij.
using FlowAssignment = std::vector<double>;

inline constexpr double kBprAlpha = 0.15;
inline constexpr double kBprBeta = 4.0;

/// BPR link time T (1 + 0.15 (f/c)^4). Throws std::logic_error on a closed arc.
double bpr_time(double flow, double free_flow_time, double capacity);
double bpr_time(const EffectiveNetwork& net, ArcId arc, double flow);

/// Sum over open arcs of the integral of the BPR time from 0 to x.
double beckmann_objective(const EffectiveNetwork& net, std::span<const double> flows);
/// Sum over arcs of x * t(x).
double total_evac_time(const EffectiveNetwork& net, std::span<const double> flows);

struct UeResult {
  FlowAssignment flows;
  double total_time = 0.0;
  double beckmann_value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective after the start point and after every accepted step
  /// (Beckmann for solve_ue, total time for solve_so).
  std::vector<double> objective_history;
  /// Best Frank-Wolfe lower bound on the minimized objective.
  double lower_bound = 0.0;
};

struct UeOptions {
  double rel_tol = 1e-3;
  int max_iterations = 10000;
  /// Line search stops halving below this step.
  double min_step = 1.0 / (1 << 20);
  /// When set, the relative-improvement test is replaced by
  /// (objective - lower bound) / objective < gap_tol.
  std::optional<double> gap_tol;
};

/// Frank-Wolfe user equilibrium: all-or-nothing loads on current shortest
/// routes, halving line search on the Beckmann objective, stop when the
/// relative improvement drops below rel_tol. Throws DisconnectedSource.
UeResult solve_ue(const EffectiveNetwork& net, const UeOptions& options,
                  const FlowAssignment* warm_start = nullptr);
inline UeResult solve_ue(const EffectiveNetwork& net, double rel_tol = 1e-3,
                         const FlowAssignment* warm_start = nullptr) {
  UeOptions options;
  options.rel_tol = rel_tol;
  return solve_ue(net, options, warm_start);
}

/// System optimum: same loop on marginal costs, minimizing total time.
UeResult solve_so(const EffectiveNetwork& net, const UeOptions& options,
                  const FlowAssignment* warm_start = nullptr);
inline UeResult solve_so(const EffectiveNetwork& net, double rel_tol = 1e-3) {
  UeOptions options;
  options.rel_tol = rel_tol;
  return solve_so(net, options);
}

/// Process-wide tally over every solve_ue / solve_so run, for checking
/// that no Frank-Wolfe step ever raised its objective.
struct AssignmentMonitor {
  std::uint64_t runs = 0;
  std::uint64_t steps = 0;
  std::uint64_t increases = 0;
};
AssignmentMonitor assignment_monitor();
void reset_assignment_monitor();

/// All-or-nothing load of every demand on its shortest exit route under `cost`.
FlowAssignment all_or_nothing(const EffectiveNetwork& net, std::span<const double> cost);

/// max_i |out(i) - in(i) - d_i| / max(d_i, 1) over non-exit nodes.
double conservation_residual(const RoadNetwork& net, std::span<const double> demands,
                             std::span<const double> flows);

template <class T>
struct PathFlow {
  NodeId source = 0;
  Path arcs;
  T amount{};
};

/// Splits arc flows into source-to-exit path flows. Each non-exit node i
/// supplies demands[i]; circulations left over are discarded.
std::vector<PathFlow<double>> decompose_flows(const RoadNetwork& net,
                                              std::span<const double> demands,
                                              std::span<const double> flows,
                                              double eps = 1e-9);
std::vector<PathFlow<int>> decompose_flows(const RoadNetwork& net, std::span<const int> demands,
                                           std::span<const int> flows);

std::vector<double> node_demands(const RoadNetwork& net);

}  // namespace frndp
