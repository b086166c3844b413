#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "frndp/assignment.hpp"
#include "frndp/gama.hpp"
#include "frndp/graver.hpp"
#include "frndp/network.hpp"
#include "frndp/pathgen.hpp"

namespace frndp {

enum class PathBackend { SimulatedAnnealing, Yens };

struct GagaConfig {
  std::size_t n_paths = 25;
  int n_samples = 10000;
  std::size_t M = 10;
  /// Stop the inner walk once a pass improves Beckmann by less than this
  /// fraction. Absent: run to a fixed point.
  std::optional<double> inner_tolerance;
  bool normalized = false;
  PathBackend backend = PathBackend::SimulatedAnnealing;
  std::uint64_t rng_seed = 0;
  /// Wall-clock budget in seconds for path generation, bases and walks.
  std::optional<double> time_budget;
  AnnealSchedule schedule;
  bool forbid_cycles = true;
  std::size_t inner_max_steps = 1'000'000;
  /// Frank-Wolfe settings of the final refinement.
  UeOptions ue;
};

/// Row label used in result tables, e.g. "Normalized, Tol=1e-3".
std::string setting_name(const GagaConfig& config);

/// Integer-demand copy scaled so the largest demand is 100:
/// d' = round(s d), c' = s c with s = 100 / max d.
struct NormalizedNetwork {
  RoadNetwork net;
  double scale = 1.0;
};
/// Throws std::invalid_argument when no node has positive demand.
NormalizedNetwork normalize_demands(const RoadNetwork& net);

/// Demands rounded to integers, indexed by node.
std::vector<int> integer_demands(const RoadNetwork& net);

struct PathGenStats {
  std::size_t yen_fallbacks = 0;  // nodes where annealing found no path
};

/// Paths for each listed node with the configured backend.
PathCache generate_paths(const RoadNetwork& net, std::span<const NodeId> nodes,
                         const GagaConfig& config, PathGenStats* stats = nullptr);

/// Partial basis over arc flows: same-source path differences pooled over
/// all sources, then filtered.
GraverSet build_inner_basis(const RoadNetwork& net, const PathCache& paths,
                            std::span<const NodeId> sources);

/// Integer start point: each of the d_k units of source k goes to a
/// uniformly drawn sampled path avoiding closed arcs. Throws NoPathError if a
/// source with demand has no such path.
std::vector<int> build_inner_seed(const EffectiveNetwork& net, const PathCache& paths,
                                  std::span<const int> demands, std::mt19937_64& rng);

struct InnerOptions {
  std::optional<double> tolerance;
  std::size_t max_steps = 1'000'000;
};

struct InnerResult {
  std::vector<int> flows;
  double beckmann = 0.0;
  std::size_t steps = 0;
  std::size_t passes = 0;
};

/// Integer augmentation on the Beckmann objective. Each pass scans the basis
/// (+g then -g) and repeats a direction while it strictly improves; stops
/// after a pass without a move, or when the pass gained less than the
/// tolerance. Steps that make a flow negative or load a closed arc are skipped.
InnerResult inner_gama_ue(const EffectiveNetwork& net, const GraverSet& basis,
                          std::vector<int> start, const InnerOptions& options = {});

/// Shared counters for the inner level across evaluators.
struct InnerStats {
  double seconds = 0.0;
  std::size_t steps = 0;
  std::size_t solves = 0;
};

/// Design objective from the inner walk: total evacuation time of its
/// integer flows. Warm-starts from the flows of the last accepted design;
/// sources whose routes got closed are re-seeded.
class GagaEvaluator : public DesignEvaluator {
 public:
  GagaEvaluator(const RoadNetwork& net, const GraverSet& inner_basis, const PathCache& paths,
                InnerOptions options, std::uint64_t seed, InnerStats* stats = nullptr);

  std::optional<double> evaluate(const FrDesign& design) override;
  void accept(const FrDesign& design) override;
  /// Inner flows of an evaluated design, if any.
  const std::vector<int>* flows(const FrDesign& design) const;

 private:
  std::vector<int> start_point(const EffectiveNetwork& eff);

  const RoadNetwork* net_;
  const GraverSet* basis_;
  const PathCache* paths_;
  InnerOptions options_;
  std::vector<int> demands_;
  std::mt19937_64 rng_;
  InnerStats* stats_;
  struct Entry {
    std::optional<double> value;
    std::vector<int> flows;
  };
  std::map<std::string, Entry> cache_;
  std::optional<std::vector<int>> incumbent_;
};

struct PhaseTimes {
  double paths = 0.0;
  double graver = 0.0;
  double walk = 0.0;
  double leblanc = 0.0;
  double inner_walk = 0.0;  // part of `walk`
};

/// Replace generated inputs, e.g. to reproduce a hand-built run.
struct GagaInputs {
  std::optional<PathCache> paths;
  std::optional<std::vector<FrDesign>> seeds;
};

struct SeedOutcome {
  WalkResult walk;
  std::optional<double> refined;  // Frank-Wolfe total time of walk.design
};

struct GagaResult {
  FrDesign best_design;
  double objective = 0.0;            // refined total time of best_design
  double gaga_only_objective = 0.0;  // best inner-walk objective, original units
  FlowAssignment best_flows;
  std::vector<SeedOutcome> seeds;
  PhaseTimes times;
  std::size_t seeds_completed = 0;
  bool partial = false;
  double scale = 1.0;
  std::size_t outer_basis_size = 0;
  std::size_t inner_basis_size = 0;
  std::size_t inner_steps = 0;
  std::size_t yen_fallbacks = 0;
  PathCache paths;
};

/// Paths -> partial bases -> M seeded outer walks with the inner walk as
/// evaluator -> Frank-Wolfe refinement of every walk's final design; the
/// reported design has the lowest refined time. Throws NoPathError when a
/// target or source has no path and InfeasibleParameters when no seed
/// survives evaluation.
GagaResult run_gaga(const RoadNetwork& net, const GagaConfig& config, const GagaInputs& inputs = {});

}  // namespace frndp
