#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frndp/instance_io.hpp"
#include "frndp/network.hpp"

namespace frndp::testing {

inline RoadNetwork load_n4() { return load_instance(std::string(FRNDP_DATA_DIR) + "/n4.json"); }

// N4 arc order: 0:(0,1) 1:(0,2) 2:(0,3) 3:(1,2) 4:(1,3) 5:(2,3).
inline std::vector<std::uint8_t> n4_reserved(std::initializer_list<int> arcs) {
  std::vector<std::uint8_t> reserved(6, 0);
  for (int a : arcs) reserved[static_cast<std::size_t>(a)] = 1;
  return reserved;
}

// Reference FR designs.
inline std::vector<std::uint8_t> n4_id1() { return n4_reserved({2}); }        // (3,0)
inline std::vector<std::uint8_t> n4_id2() { return n4_reserved({0, 4}); }     // (3,1,0)
inline std::vector<std::uint8_t> n4_id3() { return n4_reserved({1, 5}); }     // (3,2,0)
inline std::vector<std::uint8_t> n4_id4() { return n4_reserved({0, 3, 5}); }  // (3,2,1,0)

/// Two nodes joined by two parallel routes 0->1->3 and 0->2->3 where the
/// second legs have huge capacity, so each route behaves like a single link.
inline RoadNetwork two_route_network(double demand, double c1, double c2, double t1 = 1.0,
                                     double t2 = 1.0) {
  std::vector<Node> nodes{{0, 0, demand, NodeRole::Interior},
                          {0, 0, 0, NodeRole::Interior},
                          {0, 0, 0, NodeRole::Interior},
                          {0, 0, 0, NodeRole::Exit}};
  std::vector<Arc> arcs{{0, 1, c1, t1, 1}, {0, 2, c2, t2, 1}, {1, 3, 1e9, 1e-9, 1},
                        {2, 3, 1e9, 1e-9, 1}};
  return RoadNetwork(std::move(nodes), std::move(arcs), {0});
}

}  // namespace frndp::testing
