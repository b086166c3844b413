#include "frndp/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "frndp/error.hpp"

namespace frndp {

namespace {

std::string arc_location(std::size_t index) { return "arcs[" + std::to_string(index) + "]"; }

}  // namespace

RoadNetwork::RoadNetwork(std::vector<Node> nodes, std::vector<Arc> arcs,
                         std::vector<NodeId> fr_nodes)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)), fr_nodes_(std::move(fr_nodes)) {
  const auto n = static_cast<NodeId>(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!std::isfinite(node.demand) || node.demand < 0.0)
      throw SchemaError(where + ".demand", "demand must be finite and >= 0");
    if (node.role == NodeRole::Exit && node.demand != 0.0)
      throw SchemaError(where + ".demand", "exit nodes carry no demand");
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    const Arc& arc = arcs_[a];
    const std::string where = arc_location(a);
    if (arc.from < 0 || arc.from >= n) throw SchemaError(where + ".from", "unknown node");
    if (arc.to < 0 || arc.to >= n) throw SchemaError(where + ".to", "unknown node");
    if (arc.from == arc.to) throw SchemaError(where, "self loop");
    if (!(arc.capacity > 0.0) || !std::isfinite(arc.capacity))
      throw SchemaError(where + ".capacity", "capacity must be > 0");
    if (!(arc.free_flow_time > 0.0) || !std::isfinite(arc.free_flow_time))
      throw SchemaError(where + ".free_flow_time", "free-flow time must be > 0");
    if (arc.lanes < 1) throw SchemaError(where + ".lanes", "lanes must be >= 1");
    if (!seen.emplace(arc.from, arc.to).second)
      throw SchemaError(where, "duplicate arc (" + std::to_string(arc.from) + "," +
                                   std::to_string(arc.to) + ")");
  }

  std::set<NodeId> fr_seen;
  for (std::size_t i = 0; i < fr_nodes_.size(); ++i) {
    const NodeId k = fr_nodes_[i];
    const std::string where = "fr_nodes[" + std::to_string(i) + "]";
    if (k < 0 || k >= n) throw SchemaError(where, "unknown node");
    if (nodes_[static_cast<std::size_t>(k)].role == NodeRole::Exit)
      throw SchemaError(where, "FR targets must not be exit nodes");
    if (!fr_seen.insert(k).second) throw SchemaError(where, "duplicate FR target");
  }

  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    out_[static_cast<std::size_t>(arcs_[a].from)].push_back(static_cast<ArcId>(a));
    in_[static_cast<std::size_t>(arcs_[a].to)].push_back(static_cast<ArcId>(a));
  }
  reverse_.resize(arcs_.size());
  for (std::size_t a = 0; a < arcs_.size(); ++a)
    reverse_[a] = find_arc(arcs_[a].to, arcs_[a].from);

  for (NodeId i = 0; i < n; ++i) {
    if (is_exit(i))
      exits_.push_back(i);
    else if (demand(i) > 0.0)
      sources_.push_back(i);
  }
}

std::optional<ArcId> RoadNetwork::find_arc(NodeId from, NodeId to) const {
  for (ArcId a : out_arcs(from))
    if (arc(a).to == to) return a;
  return std::nullopt;
}

double RoadNetwork::total_demand() const {
  double total = 0.0;
  for (const Node& node : nodes_) total += node.demand;
  return total;
}

// ---------------------------------------------------------------------------

FrDesign::FrDesign(std::size_t num_arcs, std::size_t num_targets)
    : targets_(num_targets, std::vector<std::uint8_t>(num_arcs, 0)), reserved_(num_arcs, 0) {}

FrDesign FrDesign::from_paths(const RoadNetwork& net, std::span<const Path> paths) {
  FrDesign design(net.num_arcs(), paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k)
    for (ArcId a : paths[k]) design.set_target_arc(k, a, true);
  design.recompute_reserved();
  return design;
}

void FrDesign::set_target_arc(std::size_t k, ArcId a, bool on) {
  targets_[k][static_cast<std::size_t>(a)] = on ? 1 : 0;
  if (on) reserved_[static_cast<std::size_t>(a)] = 1;
}

void FrDesign::force_reserved(ArcId a) { reserved_[static_cast<std::size_t>(a)] = 1; }

void FrDesign::recompute_reserved() {
  std::fill(reserved_.begin(), reserved_.end(), 0);
  for (const auto& target : targets_)
    for (std::size_t a = 0; a < target.size(); ++a) reserved_[a] |= target[a];
}

std::vector<int> FrDesign::flatten() const {
  std::vector<int> flat;
  flat.reserve(targets_.size() * reserved_.size());
  for (const auto& target : targets_) flat.insert(flat.end(), target.begin(), target.end());
  return flat;
}

FrDesign FrDesign::unflatten(std::span<const int> flat, std::size_t num_arcs,
                             std::size_t num_targets) {
  FrDesign design(num_arcs, num_targets);
  for (std::size_t k = 0; k < num_targets; ++k)
    for (std::size_t a = 0; a < num_arcs; ++a)
      design.targets_[k][a] = flat[k * num_arcs + a] != 0 ? 1 : 0;
  design.recompute_reserved();
  return design;
}

std::string FrDesign::key() const {
  std::string key(reserved_.size(), '0');
  for (std::size_t a = 0; a < reserved_.size(); ++a)
    if (reserved_[a]) key[a] = '1';
  return key;
}

bool FrDesign::is_feasible(const RoadNetwork& net) const {
  if (targets_.size() != net.fr_nodes().size() || reserved_.size() != net.num_arcs())
    return false;
  for (std::size_t k = 0; k < targets_.size(); ++k) {
    const auto& y = targets_[k];
    for (std::size_t a = 0; a < y.size(); ++a)
      if (y[a] > reserved_[a]) return false;
    const NodeId target = net.fr_nodes()[k];
    for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i) {
      if (net.is_exit(i)) continue;
      int balance = 0;
      for (ArcId a : net.out_arcs(i)) balance += y[static_cast<std::size_t>(a)];
      for (ArcId a : net.in_arcs(i)) balance -= y[static_cast<std::size_t>(a)];
      if (balance != (i == target ? 1 : 0)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

EffectiveNetwork::EffectiveNetwork(const RoadNetwork& base)
    : base_(&base), capacity_(base.num_arcs()) {
  for (std::size_t a = 0; a < base.num_arcs(); ++a)
    capacity_[a] = base.arc(static_cast<ArcId>(a)).capacity;
}

EffectiveNetwork::EffectiveNetwork(const RoadNetwork& base, std::vector<double> capacity)
    : base_(&base), capacity_(std::move(capacity)) {}

std::size_t EffectiveNetwork::num_closed() const {
  return static_cast<std::size_t>(
      std::count_if(capacity_.begin(), capacity_.end(), [](double c) { return c <= 0.0; }));
}

EffectiveNetwork apply_reservation(const RoadNetwork& net, std::span<const std::uint8_t> reserved) {
  std::vector<double> capacity(net.num_arcs());
  for (std::size_t a = 0; a < net.num_arcs(); ++a) {
    const auto id = static_cast<ArcId>(a);
    const Arc& arc = net.arc(id);
    bool lane_taken = reserved[a] != 0;
    if (auto rev = net.reverse(id)) lane_taken = lane_taken || reserved[static_cast<std::size_t>(*rev)] != 0;
    capacity[a] = lane_taken ? arc.capacity * static_cast<double>(arc.lanes - 1) / arc.lanes
                             : arc.capacity;
  }
  return EffectiveNetwork(net, std::move(capacity));
}

EffectiveNetwork apply_reservation(const RoadNetwork& net, const FrDesign& design) {
  return apply_reservation(net, design.reserved());
}

BalanceSystem balance_system(const RoadNetwork& net, NodeId target) {
  BalanceSystem system;
  for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i) {
    if (net.is_exit(i)) continue;
    std::vector<int> row(net.num_arcs(), 0);
    for (ArcId a : net.out_arcs(i)) row[static_cast<std::size_t>(a)] += 1;
    for (ArcId a : net.in_arcs(i)) row[static_cast<std::size_t>(a)] -= 1;
    system.row_nodes.push_back(i);
    system.matrix.push_back(std::move(row));
    system.rhs.push_back(i == target ? 1 : 0);
  }
  return system;
}

std::vector<NodeId> path_nodes(const RoadNetwork& net, const Path& path) {
  std::vector<NodeId> nodes;
  if (path.empty()) return nodes;
  nodes.push_back(net.arc(path.front()).from);
  for (ArcId a : path) nodes.push_back(net.arc(a).to);
  return nodes;
}

double path_free_flow_time(const RoadNetwork& net, const Path& path) {
  double total = 0.0;
  for (ArcId a : path) total += net.arc(a).free_flow_time;
  return total;
}

bool is_simple_exit_path(const RoadNetwork& net, NodeId source, const Path& path) {
  if (path.empty() || net.arc(path.front()).from != source) return false;
  std::set<NodeId> visited{source};
  NodeId at = source;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Arc& arc = net.arc(path[i]);
    if (arc.from != at) return false;
    at = arc.to;
    if (!visited.insert(at).second) return false;
    if (net.is_exit(at) && i + 1 != path.size()) return false;
  }
  return net.is_exit(at);
}

}  // namespace frndp
