#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frndp/assignment.hpp"
#include "frndp/graver.hpp"
#include "frndp/network.hpp"

namespace frndp {

/// Objective of an FR design. std::nullopt marks a design the inner level
/// cannot evaluate (e.g. it strands evacuees); the walk treats it as rejected.
class DesignEvaluator {
 public:
  virtual ~DesignEvaluator() = default;
  virtual std::optional<double> evaluate(const FrDesign& design) = 0;
  /// The walk moved to `design` (already evaluated).
  virtual void accept(const FrDesign& /*design*/) {}
};

/// Cold solve_ue total time, cached by the reserved-lane bit string.
class UeEvaluator : public DesignEvaluator {
 public:
  explicit UeEvaluator(const RoadNetwork& net, UeOptions options = {});
  std::optional<double> evaluate(const FrDesign& design) override;
  std::size_t solves() const { return solves_; }

 private:
  const RoadNetwork* net_;
  UeOptions options_;
  std::map<std::string, std::optional<double>> cache_;
  std::size_t solves_ = 0;
};

/// y_ij indicator of a path as a vector over arcs.
IntVector path_indicator(const RoadNetwork& net, const Path& path);

/// Partial Graver basis over the y_ijk space (target-major blocks of |A|):
/// differences of each target's sampled paths, embedded in its block,
/// pooled and filtered once.
GraverSet build_outer_basis(const RoadNetwork& net, std::span<const std::vector<Path>> target_paths);

/// M designs, each combining one uniformly drawn path per target.
/// `target_paths` is aligned with net.fr_nodes(). Throws NoPathError for a
/// target without paths and std::invalid_argument for M == 0.
std::vector<FrDesign> build_seeds(const RoadNetwork& net,
                                  std::span<const std::vector<Path>> target_paths, std::size_t M,
                                  std::uint64_t seed);

enum class CandidateStatus { OutOfBounds, Unbalanced, Rejected, NotImproving, Improved };
std::string to_string(CandidateStatus status);

struct WalkStep {
  std::size_t direction = 0;  // index into the basis scan order
  int sign = 1;
  CandidateStatus status = CandidateStatus::OutOfBounds;
  std::optional<double> objective;
};

struct ProgressPoint {
  std::size_t step = 0;  // accepted steps so far
  double objective = 0.0;
  double wall_time = 0.0;
};

struct WalkResult {
  FrDesign design;
  double objective = 0.0;
  bool seed_feasible = true;  // false when the evaluator rejected the seed
  std::size_t accepted_steps = 0;
  std::size_t evaluations = 0;
  double wall_time = 0.0;
  bool completed = true;  // false when the time budget cut the walk short
  std::vector<WalkStep> trace;
  std::vector<ProgressPoint> progress;
};

struct WalkOptions {
  std::optional<double> time_budget;  // seconds for this walk
  bool record_trace = true;
};

/// First-improvement augmentation with step size 1: scan directions in basis
/// order trying +g then -g, move on the first strictly improving balanced
/// binary candidate and restart the scan; stop after a full scan without
/// improvement.
WalkResult outer_walk(const RoadNetwork& net, const FrDesign& seed, const GraverSet& basis,
                      DesignEvaluator& evaluator, const WalkOptions& options = {});

struct MultiSeedOptions {
  std::optional<double> per_seed_budget;
  std::optional<double> total_budget;
  bool record_trace = true;
};

struct MultiSeedResult {
  std::vector<WalkResult> per_seed;         // only seeds that were started
  std::optional<std::size_t> best;          // index into per_seed
  std::size_t seeds_completed = 0;
  bool partial = false;

  const WalkResult* incumbent() const { return best ? &per_seed[*best] : nullptr; }
};

using EvaluatorFactory = std::function<std::unique_ptr<DesignEvaluator>(std::size_t seed_index)>;

/// Independent walk per seed, each with its own evaluator; the incumbent is
/// the lowest objective, ties to the lower seed index.
MultiSeedResult multi_seed_solve(const RoadNetwork& net, std::span<const FrDesign> seeds,
                                 const GraverSet& basis, const EvaluatorFactory& factory,
                                 const MultiSeedOptions& options = {});

/// CSV: seed,step,objective,wall_time_s.
void write_progress_csv(const MultiSeedResult& result, const std::filesystem::path& file,
                        bool include_times = true);

}  // namespace frndp
