#pragma once

#include <cstdint>
#include <optional>

#include "frndp/network.hpp"

namespace frndp {

struct GeneratorParams {
  int n = 10;        // interior nodes
  double p = 0.5;    // base edge probability
  std::uint64_t seed = 0;

  // Edge probability is p * exp(-distance / decay_length).
  double decay_length = 0.5;
  double capacity_mean = 50.0;
  double capacity_sd = 20.0;
  double demand_mean = 100.0;
  double demand_sd = 10.0;
  // Normal draws are clamped from below at this value.
  double truncation_floor = 1.0;
  int lanes = 2;
  // Free-flow time is Euclidean length times this factor, clamped at min_free_flow.
  double time_per_distance = 1.0;
  double min_free_flow = 1e-2;
  // Number of interior nodes that need an FR path; all interior nodes when unset.
  std::optional<int> fr_count;
  int max_attempts = 1000;
};

/// Random geometric instance: n interior nodes in the unit square, ceil(n/10)
/// exits on its boundary (ids n, n+1, ...), both arc directions per edge.
/// Redraws until every interior node can reach an exit; throws
/// InfeasibleParameters after max_attempts draws.
RoadNetwork generate_random_instance(const GeneratorParams& params);

inline RoadNetwork generate_random_instance(int n, double p, std::uint64_t seed) {
  GeneratorParams params;
  params.n = n;
  params.p = p;
  params.seed = seed;
  return generate_random_instance(params);
}

}  // namespace frndp
