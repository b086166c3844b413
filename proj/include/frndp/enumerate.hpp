#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "frndp/assignment.hpp"
#include "frndp/network.hpp"

namespace frndp {

/// Every simple path from k to an exit (exits terminal), ordered by
/// free-flow time then arc sequence. Throws SizeLimitExceeded beyond `cap`.
std::vector<Path> all_simple_exit_paths(const RoadNetwork& net, NodeId k, std::size_t cap);

struct EnumeratedDesign {
  FrDesign design;
  std::optional<double> objective;  // absent when the design strands evacuees
};

/// All distinct FR designs built from one simple path per target, each with
/// its UE total time, in path-combination order. Throws SizeLimitExceeded
/// when more than `cap` designs exist.
std::vector<EnumeratedDesign> enumerate_designs(const RoadNetwork& net, std::size_t cap,
                                                const UeOptions& ue = {});

/// Lowest objective among evaluated designs, if any.
const EnumeratedDesign* best_design(const std::vector<EnumeratedDesign>& designs);

}  // namespace frndp
