#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "frndp/network.hpp"

namespace frndp {

/// Instance documents:
///
///   { "nodes":    [{"id": 0, "x": 0.1, "y": 0.4, "demand": 100, "role": "interior"}, ...],
///     "arcs":     [{"from": 0, "to": 1, "capacity": 25, "free_flow_time": 1, "lanes": 1}, ...],
///     "fr_nodes": [0, ...] }
///
/// One arc entry per direction. Node ids must be a permutation of 0..n-1.
/// Exit nodes are also the first-responder entry points.
RoadNetwork instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const RoadNetwork& net);

RoadNetwork load_instance(const std::filesystem::path& path);
void save_instance(const RoadNetwork& net, const std::filesystem::path& path);

}  // namespace frndp
