#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "frndp/network.hpp"

namespace frndp {

/// Binary quadratic model whose energy is the squared residual ||A x - b||^2
/// of a flow-balance system, so feasible selections sit at energy exactly 0.
struct QuboProblem {
  NodeId target = 0;
  std::size_t num_arc_vars = 0;        // variables [0, num_arc_vars) select arcs
  std::vector<ArcId> var_arc;          // arc of each arc variable
  std::vector<NodeId> aux_node;        // node of each auxiliary (slack) variable
  std::vector<std::vector<int>> A;     // rows x num_vars
  std::vector<int> b;
  std::vector<double> Q;               // dense symmetric, row-major num_vars^2
  double offset = 0.0;

  std::size_t num_vars() const { return var_arc.size() + aux_node.size(); }
  double q(std::size_t i, std::size_t j) const { return Q[i * num_vars() + j]; }

  /// x^T Q x + offset.
  double energy(std::span<const std::uint8_t> x) const;
  /// ||A x - b||^2 computed directly from the rows.
  long long residual(std::span<const std::uint8_t> x) const;

  /// Arc-indexed selection (size num_arcs) decoded from a variable assignment.
  std::vector<std::uint8_t> decode(std::span<const std::uint8_t> x, std::size_t num_arcs) const;
  /// Variable assignment with the given arcs on and slack set to satisfy the
  /// one-out-arc rows where possible.
  std::vector<std::uint8_t> encode(const Path& path) const;
};

/// Flow-balance QUBO for paths from `k` to the exits: out(i) - in(i) = [i == k]
/// at every non-exit node. Arcs leaving an exit are not variables (exits are
/// terminal). With `forbid_cycles`, adds sum_j y_ij + a_i = 1 per non-exit
/// node, i.e. at most one outgoing arc.
QuboProblem build_path_qubo(const RoadNetwork& net, NodeId k, bool forbid_cycles);

struct AnnealSchedule {
  int sweeps = 1000;
  /// Probability of accepting a typical uphill move at the start.
  double initial_acceptance = 0.9;
  /// Probability of accepting a +1 energy move at the end.
  double final_acceptance = 1e-3;
};

/// Single-flip Metropolis annealing from a uniformly random start with
/// geometric cooling. Returns one assignment per sample.
std::vector<std::vector<std::uint8_t>> simulated_annealing(const QuboProblem& qubo,
                                                           int n_samples, std::uint64_t seed,
                                                           const AnnealSchedule& schedule = {});

struct PathSample {
  NodeId source = 0;
  std::vector<Path> paths;
};

/// Annealer samples -> zero-energy filter -> simple path extraction ->
/// dedupe -> the n_paths shortest by free-flow time (ties by arc sequence).
/// Throws NoPathError when no sample reaches energy 0; std::invalid_argument
/// when n_samples < 1.
PathSample sample_feasible(const RoadNetwork& net, const QuboProblem& qubo, int n_samples,
                           std::size_t n_paths, std::uint64_t seed,
                           const AnnealSchedule& schedule = {});

/// Shortest free-flow route from k to an exit using only the selected arcs.
/// Throws NoPathError if the selection does not connect k to an exit.
Path extract_simple_path(const RoadNetwork& net, std::span<const std::uint8_t> arc_set, NodeId k);

/// Yen's K loopless shortest paths from k to the exit set, nondecreasing in
/// free-flow length; ties by arc sequence. `usable` restricts the arcs.
/// Throws NoPathError if k cannot reach an exit.
PathSample yen_k_shortest(const RoadNetwork& net, NodeId k, std::size_t K,
                          std::span<const std::uint8_t> usable = {});

/// Orders paths by (free-flow time, arc sequence) and drops duplicates.
void sort_paths(const RoadNetwork& net, std::vector<Path>& paths);

/// Paths per source node, reusable across solver configurations.
using PathCache = std::map<NodeId, std::vector<Path>>;

void save_path_cache(const PathCache& cache, const std::filesystem::path& file);
/// Throws SchemaError on malformed files.
PathCache load_path_cache(const std::filesystem::path& file);

}  // namespace frndp
