#include "frndp/assignment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frndp/error.hpp"
#include "frndp/shortest_path.hpp"

namespace frndp {

namespace {

std::atomic<std::uint64_t> g_runs{0}, g_steps{0}, g_increases{0};

void record_history(std::span<const double> history) {
  std::uint64_t increases = 0;
  for (std::size_t i = 1; i < history.size(); ++i) increases += history[i] > history[i - 1];
  g_runs.fetch_add(1, std::memory_order_relaxed);
  g_steps.fetch_add(history.empty() ? 0 : history.size() - 1, std::memory_order_relaxed);
  g_increases.fetch_add(increases, std::memory_order_relaxed);
}

enum class Criterion { Beckmann, TotalTime };

double ratio4(double flow, double capacity) {
  const double r = flow / capacity;
  const double r2 = r * r;
  return r2 * r2;
}

void require_open(const EffectiveNetwork& net, ArcId a, double flow) {
  if (net.closed(a) && flow != 0.0)
    throw std::logic_error("flow " + std::to_string(flow) + " on closed arc " + std::to_string(a));
}

double objective(const EffectiveNetwork& net, std::span<const double> flows, Criterion kind) {
  return kind == Criterion::Beckmann ? beckmann_objective(net, flows) : total_evac_time(net, flows);
}

/// Gradient of the criterion: link time for Beckmann, marginal time for total time.
std::vector<double> gradient(const EffectiveNetwork& net, std::span<const double> flows,
                             Criterion kind) {
  std::vector<double> cost(flows.size(), std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < flows.size(); ++a) {
    const auto id = static_cast<ArcId>(a);
    if (net.closed(id)) continue;
    const double T = net.base().arc(id).free_flow_time;
    const double r4 = ratio4(flows[a], net.capacity(id));
    cost[a] = kind == Criterion::Beckmann ? T * (1.0 + kBprAlpha * r4)
                                          : T * (1.0 + kBprAlpha * (kBprBeta + 1.0) * r4);
  }
  return cost;
}

std::vector<std::uint8_t> open_mask(const EffectiveNetwork& net) {
  std::vector<std::uint8_t> mask(net.base().num_arcs());
  for (std::size_t a = 0; a < mask.size(); ++a) mask[a] = net.open(static_cast<ArcId>(a)) ? 1 : 0;
  return mask;
}

ExitTree open_tree(const EffectiveNetwork& net, std::span<const double> cost) {
  const auto mask = open_mask(net);
  return shortest_tree_to_exits(net.base(), cost, mask);
}

void check_sources(const EffectiveNetwork& net, const ExitTree& tree) {
  for (NodeId s : net.base().sources())
    if (!tree.reaches_exit(s)) throw DisconnectedSource(s);
}

FlowAssignment load_tree(const RoadNetwork& net, const ExitTree& tree,
                         std::span<const double> supply) {
  std::vector<NodeId> order;
  for (NodeId v = 0; v < static_cast<NodeId>(net.num_nodes()); ++v)
    if (!net.is_exit(v) && supply[static_cast<std::size_t>(v)] > 0.0) order.push_back(v);
  // Nodes on the routes of sources, sorted far-to-near so loads accumulate.
  std::vector<double> load(supply.begin(), supply.end());
  std::vector<NodeId> all(net.num_nodes());
  std::iota(all.begin(), all.end(), 0);
  std::vector<NodeId> reachable;
  for (NodeId v : all)
    if (!net.is_exit(v) && tree.reaches_exit(v)) reachable.push_back(v);
  std::stable_sort(reachable.begin(), reachable.end(), [&](NodeId a, NodeId b) {
    return tree.dist[static_cast<std::size_t>(a)] > tree.dist[static_cast<std::size_t>(b)];
  });
  for (NodeId v : order)
    if (!tree.reaches_exit(v)) throw DisconnectedSource(v);

  FlowAssignment flows(net.num_arcs(), 0.0);
  for (NodeId v : reachable) {
    const double amount = load[static_cast<std::size_t>(v)];
    if (amount == 0.0) continue;
    const ArcId a = tree.next[static_cast<std::size_t>(v)];
    flows[static_cast<std::size_t>(a)] += amount;
    const NodeId head = net.arc(a).to;
    if (!net.is_exit(head)) load[static_cast<std::size_t>(head)] += amount;
  }
  return flows;
}

/// Keeps warm-start path flows whose arcs are all open; demand stranded on
/// closed arcs (or unaccounted for) is re-routed all-or-nothing.
FlowAssignment project_warm_start(const EffectiveNetwork& net, const FlowAssignment& warm) {
  const RoadNetwork& base = net.base();
  const auto demands = node_demands(base);
  FlowAssignment flows(base.num_arcs(), 0.0);
  std::vector<double> routed(base.num_nodes(), 0.0);
  if (warm.size() == base.num_arcs()) {
    std::vector<double> clean(warm.begin(), warm.end());
    for (double& x : clean) x = std::max(0.0, x);
    for (const auto& pf : decompose_flows(base, demands, clean)) {
      const bool open = std::all_of(pf.arcs.begin(), pf.arcs.end(),
                                    [&](ArcId a) { return net.open(a); });
      if (!open) continue;
      for (ArcId a : pf.arcs) flows[static_cast<std::size_t>(a)] += pf.amount;
      routed[static_cast<std::size_t>(pf.source)] += pf.amount;
    }
  }
  std::vector<double> stranded(base.num_nodes(), 0.0);
  bool any = false;
  for (NodeId s : base.sources()) {
    const auto si = static_cast<std::size_t>(s);
    stranded[si] = std::max(0.0, demands[si] - routed[si]);
    any = any || stranded[si] > 0.0;
  }
  if (any) {
    const auto tree = open_tree(net, gradient(net, flows, Criterion::Beckmann));
    const auto extra = load_tree(base, tree, stranded);
    for (std::size_t a = 0; a < flows.size(); ++a) flows[a] += extra[a];
  }
  return flows;
}

UeResult frank_wolfe(const EffectiveNetwork& net, const UeOptions& options,
                     const FlowAssignment* warm_start, Criterion kind) {
  const RoadNetwork& base = net.base();
  UeResult result;
  result.flows.assign(base.num_arcs(), 0.0);
  if (base.total_demand() <= 0.0) {
    result.converged = true;
    result.objective_history.push_back(0.0);
    record_history(result.objective_history);
    return result;
  }

  const auto free_tree = open_tree(net, free_flow_costs(base));
  check_sources(net, free_tree);

  FlowAssignment x = warm_start != nullptr ? project_warm_start(net, *warm_start)
                                           : load_tree(base, free_tree, node_demands(base));
  double value = objective(net, x, kind);
  result.objective_history.push_back(value);
  result.lower_bound = -std::numeric_limits<double>::infinity();

  const auto demands = node_demands(base);
  FlowAssignment trial(x.size());
  while (result.iterations < options.max_iterations) {
    const auto cost = gradient(net, x, kind);
    const auto target = load_tree(base, open_tree(net, cost), demands);
    double gap = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a)
      if (net.open(static_cast<ArcId>(a))) gap += cost[a] * (x[a] - target[a]);
    result.lower_bound = std::max(result.lower_bound, value - gap);

    if (options.gap_tol && value - result.lower_bound < *options.gap_tol * std::abs(value)) {
      result.converged = true;
      break;
    }

    double step = 1.0;
    double next_value = value;
    for (; step >= options.min_step; step *= 0.5) {
      for (std::size_t a = 0; a < x.size(); ++a) trial[a] = x[a] + step * (target[a] - x[a]);
      next_value = objective(net, trial, kind);
      if (next_value < value) break;
    }
    if (step < options.min_step) {
      result.converged = true;
      break;
    }
    x.swap(trial);
    const double improvement = (value - next_value) / std::max(std::abs(value), 1e-12);
    value = next_value;
    result.objective_history.push_back(value);
    ++result.iterations;
    if (!options.gap_tol && improvement < options.rel_tol) {
      result.converged = true;
      break;
    }
  }

  result.flows = std::move(x);
  result.total_time = total_evac_time(net, result.flows);
  result.beckmann_value = beckmann_objective(net, result.flows);
  result.lower_bound = std::min(result.lower_bound, value);
  record_history(result.objective_history);
  return result;
}

}  // namespace

AssignmentMonitor assignment_monitor() {
  return {g_runs.load(), g_steps.load(), g_increases.load()};
}

void reset_assignment_monitor() {
  g_runs = 0;
  g_steps = 0;
  g_increases = 0;
}

namespace {

template <class T>
std::vector<PathFlow<T>> decompose(const RoadNetwork& net, std::span<const T> demands,
                                   std::span<const T> flows, T eps) {
  std::vector<T> remaining(flows.begin(), flows.end());
  std::vector<PathFlow<T>> result;
  std::vector<int> position(net.num_nodes(), -1);
  for (NodeId s = 0; s < static_cast<NodeId>(net.num_nodes()); ++s) {
    if (net.is_exit(s)) continue;
    T supply = demands[static_cast<std::size_t>(s)];
    std::size_t guard = 0;
    while (supply > eps && guard++ < 4 * net.num_arcs() + 16) {
      std::vector<NodeId> walk{s};
      Path arcs;
      std::fill(position.begin(), position.end(), -1);
      position[static_cast<std::size_t>(s)] = 0;
      NodeId at = s;
      bool stuck = false;
      while (!net.is_exit(at)) {
        ArcId chosen = -1;
        for (ArcId a : net.out_arcs(at)) {
          if (remaining[static_cast<std::size_t>(a)] > eps) {
            chosen = a;
            break;
          }
        }
        if (chosen < 0) {
          stuck = true;
          break;
        }
        const NodeId head = net.arc(chosen).to;
        const int seen = position[static_cast<std::size_t>(head)];
        if (seen >= 0) {
          // Cancel the circulation closed by this arc.
          T bottleneck = remaining[static_cast<std::size_t>(chosen)];
          for (std::size_t i = static_cast<std::size_t>(seen); i < arcs.size(); ++i)
            bottleneck = std::min(bottleneck, remaining[static_cast<std::size_t>(arcs[i])]);
          remaining[static_cast<std::size_t>(chosen)] -= bottleneck;
          for (std::size_t i = static_cast<std::size_t>(seen); i < arcs.size(); ++i)
            remaining[static_cast<std::size_t>(arcs[i])] -= bottleneck;
          for (std::size_t i = static_cast<std::size_t>(seen) + 1; i < walk.size(); ++i)
            position[static_cast<std::size_t>(walk[i])] = -1;
          walk.resize(static_cast<std::size_t>(seen) + 1);
          arcs.resize(static_cast<std::size_t>(seen));
          at = head;
          continue;
        }
        position[static_cast<std::size_t>(head)] = static_cast<int>(walk.size());
        walk.push_back(head);
        arcs.push_back(chosen);
        at = head;
      }
      if (stuck) break;
      T amount = supply;
      for (ArcId a : arcs) amount = std::min(amount, remaining[static_cast<std::size_t>(a)]);
      for (ArcId a : arcs) remaining[static_cast<std::size_t>(a)] -= amount;
      supply -= amount;
      result.push_back({s, std::move(arcs), amount});
    }
  }
  return result;
}

}  // namespace

double bpr_time(double flow, double free_flow_time, double capacity) {
  if (!(capacity > 0.0)) throw std::logic_error("BPR time queried on a closed arc");
  return free_flow_time * (1.0 + kBprAlpha * ratio4(flow, capacity));
}

double bpr_time(const EffectiveNetwork& net, ArcId arc, double flow) {
  return bpr_time(flow, net.base().arc(arc).free_flow_time, net.capacity(arc));
}

double beckmann_objective(const EffectiveNetwork& net, std::span<const double> flows) {
  double total = 0.0;
  for (std::size_t a = 0; a < flows.size(); ++a) {
    const auto id = static_cast<ArcId>(a);
    require_open(net, id, flows[a]);
    if (net.closed(id)) continue;
    const double x = flows[a];
    const double T = net.base().arc(id).free_flow_time;
    total += T * x * (1.0 + kBprAlpha / (kBprBeta + 1.0) * ratio4(x, net.capacity(id)));
  }
  return total;
}

double total_evac_time(const EffectiveNetwork& net, std::span<const double> flows) {
  double total = 0.0;
  for (std::size_t a = 0; a < flows.size(); ++a) {
    const auto id = static_cast<ArcId>(a);
    require_open(net, id, flows[a]);
    if (net.closed(id) || flows[a] == 0.0) continue;
    total += flows[a] * bpr_time(net, id, flows[a]);
  }
  return total;
}

UeResult solve_ue(const EffectiveNetwork& net, const UeOptions& options,
                  const FlowAssignment* warm_start) {
  return frank_wolfe(net, options, warm_start, Criterion::Beckmann);
}

UeResult solve_so(const EffectiveNetwork& net, const UeOptions& options,
                  const FlowAssignment* warm_start) {
  return frank_wolfe(net, options, warm_start, Criterion::TotalTime);
}

FlowAssignment all_or_nothing(const EffectiveNetwork& net, std::span<const double> cost) {
  const auto tree = open_tree(net, cost);
  return load_tree(net.base(), tree, node_demands(net.base()));
}

double conservation_residual(const RoadNetwork& net, std::span<const double> demands,
                             std::span<const double> flows) {
  double worst = 0.0;
  for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i) {
    if (net.is_exit(i)) continue;
    double balance = 0.0;
    for (ArcId a : net.out_arcs(i)) balance += flows[static_cast<std::size_t>(a)];
    for (ArcId a : net.in_arcs(i)) balance -= flows[static_cast<std::size_t>(a)];
    const double d = demands[static_cast<std::size_t>(i)];
    worst = std::max(worst, std::abs(balance - d) / std::max(d, 1.0));
  }
  return worst;
}

std::vector<PathFlow<double>> decompose_flows(const RoadNetwork& net,
                                              std::span<const double> demands,
                                              std::span<const double> flows, double eps) {
  return decompose<double>(net, demands, flows, eps);
}

std::vector<PathFlow<int>> decompose_flows(const RoadNetwork& net, std::span<const int> demands,
                                           std::span<const int> flows) {
  return decompose<int>(net, demands, flows, 0);
}

std::vector<double> node_demands(const RoadNetwork& net) {
  std::vector<double> demands(net.num_nodes(), 0.0);
  for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i)
    demands[static_cast<std::size_t>(i)] = net.demand(i);
  return demands;
}

}  // namespace frndp
