#include "frndp/gaga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "frndp/error.hpp"

namespace frndp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (purpose, index) from the one user seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(base ^ splitmix(stream)) + index);
}

enum Stream : std::uint64_t { kPathStream = 1, kSeedStream = 2, kInnerStream = 3 };

std::string format_tol(double tol) {
  const double e = std::log10(tol);
  if (std::abs(e - std::round(e)) < 1e-12) return "1e" + std::to_string(static_cast<int>(std::round(e)));
  std::ostringstream out;
  out << tol;
  return out.str();
}

// Integral of the BPR time on one arc.
double arc_beckmann(const EffectiveNetwork& net, std::size_t a, int flow) {
  if (flow == 0) return 0.0;
  const double T = net.base().arc(static_cast<ArcId>(a)).free_flow_time;
  const double c = net.capacity(static_cast<ArcId>(a));
  const double x = flow;
  return T * x + kBprAlpha * T * std::pow(x, 5) / (5.0 * std::pow(c, 4));
}

bool path_open(const EffectiveNetwork& net, const Path& path) {
  return std::all_of(path.begin(), path.end(), [&](ArcId a) { return net.open(a); });
}

void load_units(const EffectiveNetwork& net, NodeId source, const std::vector<Path>& candidates,
                int units, std::mt19937_64& rng, std::vector<int>& flows) {
  std::vector<const Path*> open;
  for (const auto& p : candidates)
    if (path_open(net, p)) open.push_back(&p);
  if (open.empty())
    throw NoPathError("no open sampled path for source " + std::to_string(source));
  std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
  for (int u = 0; u < units; ++u)
    for (ArcId a : *open[pick(rng)]) ++flows[static_cast<std::size_t>(a)];
}

const std::vector<Path>& paths_for(const PathCache& paths, NodeId node) {
  static const std::vector<Path> none;
  auto it = paths.find(node);
  return it == paths.end() ? none : it->second;
}

}  // namespace

std::string setting_name(const GagaConfig& config) {
  std::string name = config.normalized ? "Normalized" : "Unnormalized";
  if (config.inner_tolerance)
    name += (config.normalized ? ", Tol=" : ", Tol = ") + format_tol(*config.inner_tolerance);
  return name;
}

NormalizedNetwork normalize_demands(const RoadNetwork& net) {
  double max_demand = 0.0;
  for (const auto& n : net.nodes()) max_demand = std::max(max_demand, n.demand);
  if (max_demand <= 0.0) throw std::invalid_argument("cannot normalize a network without demand");
  const double s = 100.0 / max_demand;
  std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  for (auto& n : nodes) n.demand = std::round(s * n.demand);
  std::vector<Arc> arcs(net.arcs().begin(), net.arcs().end());
  for (auto& a : arcs) a.capacity *= s;
  std::vector<NodeId> fr(net.fr_nodes().begin(), net.fr_nodes().end());
  return {RoadNetwork(std::move(nodes), std::move(arcs), std::move(fr)), s};
}

std::vector<int> integer_demands(const RoadNetwork& net) {
  std::vector<int> out(net.num_nodes(), 0);
  for (NodeId i : net.sources()) out[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(net.demand(i)));
  return out;
}

PathCache generate_paths(const RoadNetwork& net, std::span<const NodeId> nodes,
                         const GagaConfig& config, PathGenStats* stats) {
  PathCache cache;
  for (NodeId k : nodes) {
    if (cache.count(k)) continue;
    if (config.backend == PathBackend::SimulatedAnnealing) {
      const auto qubo = build_path_qubo(net, k, config.forbid_cycles);
      try {
        cache[k] = sample_feasible(net, qubo, config.n_samples, config.n_paths,
                                   derive_seed(config.rng_seed, kPathStream, static_cast<std::uint64_t>(k)),
                                   config.schedule)
                       .paths;
        continue;
      } catch (const NoPathError&) {
        // The annealer can miss every zero-energy state on larger QUBOs.
        if (stats) ++stats->yen_fallbacks;
      }
    }
    cache[k] = yen_k_shortest(net, k, config.n_paths).paths;
  }
  return cache;
}

GraverSet build_inner_basis(const RoadNetwork& net, const PathCache& paths,
                            std::span<const NodeId> sources) {
  std::vector<IntVector> pool;
  for (NodeId k : sources) {
    std::vector<IntVector> indicators;
    for (const auto& p : paths_for(paths, k)) indicators.push_back(path_indicator(net, p));
    auto diffs = lattice_from_differences(indicators);
    pool.insert(pool.end(), diffs.begin(), diffs.end());
  }
  return conformal_filter(net.num_arcs(), std::move(pool));
}

std::vector<int> build_inner_seed(const EffectiveNetwork& net, const PathCache& paths,
                                  std::span<const int> demands, std::mt19937_64& rng) {
  std::vector<int> flows(net.base().num_arcs(), 0);
  for (std::size_t k = 0; k < demands.size(); ++k) {
    if (demands[k] <= 0) continue;
    const auto node = static_cast<NodeId>(k);
    load_units(net, node, paths_for(paths, node), demands[k], rng, flows);
  }
  return flows;
}

InnerResult inner_gama_ue(const EffectiveNetwork& net, const GraverSet& basis,
                          std::vector<int> start, const InnerOptions& options) {
  InnerResult result;
  result.flows = std::move(start);
  auto& x = result.flows;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] < 0) throw std::invalid_argument("inner start has a negative flow");
    if (x[a] > 0 && net.closed(static_cast<ArcId>(a)))
      throw std::invalid_argument("inner start loads a closed arc");
    result.beckmann += arc_beckmann(net, a, x[a]);
  }

  // Change in Beckmann for x + sign*g, or nullopt if the point is infeasible.
  auto delta = [&](const IntVector& g, int sign) -> std::optional<double> {
    double d = 0.0;
    for (const auto& [a, v] : g.entries()) {
      const int next = x[a] + sign * v;
      if (next < 0 || (next > 0 && net.closed(static_cast<ArcId>(a)))) return std::nullopt;
      d += arc_beckmann(net, a, next) - arc_beckmann(net, a, x[a]);
    }
    return d;
  };

  while (result.steps < options.max_steps) {
    ++result.passes;
    const double pass_start = result.beckmann;
    bool moved = false;
    for (const auto& g : basis) {
      for (int sign : {1, -1}) {
        while (result.steps < options.max_steps) {
          const auto d = delta(g, sign);
          if (!d || *d >= 0.0) break;
          for (const auto& [a, v] : g.entries()) x[a] += sign * v;
          result.beckmann += *d;
          ++result.steps;
          moved = true;
        }
      }
    }
    if (!moved) break;
    if (options.tolerance && pass_start > 0.0 &&
        (pass_start - result.beckmann) / pass_start < *options.tolerance)
      break;
  }
  return result;
}

GagaEvaluator::GagaEvaluator(const RoadNetwork& net, const GraverSet& inner_basis,
                             const PathCache& paths, InnerOptions options, std::uint64_t seed,
                             InnerStats* stats)
    : net_(&net),
      basis_(&inner_basis),
      paths_(&paths),
      options_(options),
      demands_(integer_demands(net)),
      rng_(seed),
      stats_(stats) {}

std::vector<int> GagaEvaluator::start_point(const EffectiveNetwork& eff) {
  if (!incumbent_) return build_inner_seed(eff, *paths_, demands_, rng_);
  // Keep every source whose current routes stay open; re-seed the rest.
  std::vector<int> flows(net_->num_arcs(), 0);
  std::set<NodeId> reseed;
  const auto routes = decompose_flows(*net_, demands_, *incumbent_);
  for (const auto& pf : routes)
    if (!path_open(eff, pf.arcs)) reseed.insert(pf.source);
  std::vector<int> routed(net_->num_nodes(), 0);
  for (const auto& pf : routes) {
    if (reseed.count(pf.source)) continue;
    routed[static_cast<std::size_t>(pf.source)] += pf.amount;
    for (ArcId a : pf.arcs) flows[static_cast<std::size_t>(a)] += pf.amount;
  }
  for (std::size_t k = 0; k < demands_.size(); ++k) {
    const int missing = demands_[k] - routed[k];
    if (missing > 0)
      load_units(eff, static_cast<NodeId>(k), paths_for(*paths_, static_cast<NodeId>(k)), missing,
                 rng_, flows);
  }
  return flows;
}

std::optional<double> GagaEvaluator::evaluate(const FrDesign& design) {
  const auto key = design.key();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second.value;
  const auto start = Clock::now();
  const auto eff = apply_reservation(*net_, design);
  Entry entry;
  try {
    auto inner = inner_gama_ue(eff, *basis_, start_point(eff), options_);
    const std::vector<double> as_double(inner.flows.begin(), inner.flows.end());
    entry.value = total_evac_time(eff, as_double);
    entry.flows = std::move(inner.flows);
    if (stats_) stats_->steps += inner.steps;
  } catch (const NoPathError&) {
  }
  if (stats_) {
    stats_->seconds += seconds_since(start);
    ++stats_->solves;
  }
  return cache_.emplace(key, std::move(entry)).first->second.value;
}

void GagaEvaluator::accept(const FrDesign& design) {
  if (const auto* f = flows(design)) incumbent_ = *f;
}

const std::vector<int>* GagaEvaluator::flows(const FrDesign& design) const {
  auto it = cache_.find(design.key());
  return it == cache_.end() || !it->second.value ? nullptr : &it->second.flows;
}

GagaResult run_gaga(const RoadNetwork& net, const GagaConfig& config, const GagaInputs& inputs) {
  if (config.M == 0 && !inputs.seeds) throw std::invalid_argument("M must be >= 1");
  const auto start = Clock::now();
  GagaResult result;

  std::optional<NormalizedNetwork> scaled;
  if (config.normalized) scaled = normalize_demands(net);
  const RoadNetwork& work = scaled ? scaled->net : net;
  result.scale = scaled ? scaled->scale : 1.0;

  // Paths are topology-only, so one cache serves targets and sources.
  auto phase = Clock::now();
  std::vector<NodeId> nodes(net.fr_nodes().begin(), net.fr_nodes().end());
  nodes.insert(nodes.end(), work.sources().begin(), work.sources().end());
  if (inputs.paths) {
    result.paths = *inputs.paths;
  } else {
    PathGenStats stats;
    result.paths = generate_paths(net, nodes, config, &stats);
    result.yen_fallbacks = stats.yen_fallbacks;
  }
  for (NodeId k : nodes)
    if (paths_for(result.paths, k).empty())
      throw NoPathError("no path from node " + std::to_string(k) + " to an exit");
  result.times.paths = seconds_since(phase);

  phase = Clock::now();
  std::vector<std::vector<Path>> target_paths;
  for (NodeId k : net.fr_nodes()) target_paths.push_back(paths_for(result.paths, k));
  const auto outer = build_outer_basis(net, target_paths);
  const auto inner = build_inner_basis(net, result.paths, work.sources());
  result.outer_basis_size = outer.size();
  result.inner_basis_size = inner.size();
  result.times.graver = seconds_since(phase);

  const auto seeds = inputs.seeds ? *inputs.seeds
                                  : build_seeds(net, target_paths, config.M,
                                                derive_seed(config.rng_seed, kSeedStream, 0));

  phase = Clock::now();
  InnerStats stats;
  const InnerOptions inner_options{config.inner_tolerance, config.inner_max_steps};
  auto factory = [&](std::size_t index) {
    return std::make_unique<GagaEvaluator>(work, inner, result.paths, inner_options,
                                           derive_seed(config.rng_seed, kInnerStream, index), &stats);
  };
  MultiSeedOptions walk_options;
  if (config.time_budget) walk_options.total_budget = std::max(0.0, *config.time_budget - seconds_since(start));
  auto walks = multi_seed_solve(net, seeds, outer, factory, walk_options);
  result.times.walk = seconds_since(phase);
  result.times.inner_walk = stats.seconds;
  result.inner_steps = stats.steps;
  result.seeds_completed = walks.seeds_completed;
  result.partial = walks.partial;
  if (!walks.incumbent()) throw InfeasibleParameters("no seed design could be evaluated");
  result.gaga_only_objective = walks.incumbent()->objective / result.scale;

  phase = Clock::now();
  std::map<std::string, std::pair<double, FlowAssignment>> refined;
  std::optional<std::size_t> best;
  for (auto& walk : walks.per_seed) {
    SeedOutcome outcome{std::move(walk), std::nullopt};
    if (outcome.walk.seed_feasible) {
      const auto key = outcome.walk.design.key();
      auto it = refined.find(key);
      if (it == refined.end()) {
        try {
          auto ue = solve_ue(apply_reservation(net, outcome.walk.design), config.ue);
          it = refined.emplace(key, std::make_pair(ue.total_time, std::move(ue.flows))).first;
        } catch (const DisconnectedSource&) {
          // Rounded demands can hide a source that the original network strands.
        }
      }
      if (it != refined.end()) outcome.refined = it->second.first;
    }
    result.seeds.push_back(std::move(outcome));
    const auto& last = result.seeds.back();
    if (last.refined && (!best || *last.refined < *result.seeds[*best].refined))
      best = result.seeds.size() - 1;
  }
  result.times.leblanc = seconds_since(phase);
  if (!best) throw InfeasibleParameters("no walk result survives the Frank-Wolfe refinement");

  result.best_design = result.seeds[*best].walk.design;
  result.objective = *result.seeds[*best].refined;
  result.best_flows = refined.at(result.best_design.key()).second;
  return result;
}

}  // namespace frndp
