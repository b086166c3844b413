#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frndp {

using NodeId = int;
using ArcId = int;

/// A directed path as an ordered list of arc ids.
using Path = std::vector<ArcId>;

enum class NodeRole { Interior, Exit };

struct Node {
  double x = 0.0;
  double y = 0.0;
  double demand = 0.0;  // vehicles leaving from this node
  NodeRole role = NodeRole::Interior;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  double capacity = 0.0;        // vehicles per unit time
  double free_flow_time = 0.0;  // time units
  int lanes = 1;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Immutable road network. Node ids are the dense range [0, num_nodes).
/// Exit nodes double as first-responder entry points.
class RoadNetwork {
 public:
  /// Validates every invariant; throws SchemaError naming the violation.
  RoadNetwork(std::vector<Node> nodes, std::vector<Arc> arcs,
              std::vector<NodeId> fr_nodes);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_arcs() const { return arcs_.size(); }

  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const Arc& arc(ArcId id) const { return arcs_[static_cast<std::size_t>(id)]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Arc> arcs() const { return arcs_; }

  std::span<const ArcId> out_arcs(NodeId id) const { return out_[static_cast<std::size_t>(id)]; }
  std::span<const ArcId> in_arcs(NodeId id) const { return in_[static_cast<std::size_t>(id)]; }

  bool is_exit(NodeId id) const { return node(id).role == NodeRole::Exit; }
  double demand(NodeId id) const { return node(id).demand; }

  /// First-responder targets F, in instance-file order.
  std::span<const NodeId> fr_nodes() const { return fr_nodes_; }
  /// Exit / entry nodes E, ascending.
  std::span<const NodeId> exits() const { return exits_; }
  /// Evacuee sources S: non-exit nodes with positive demand, ascending.
  std::span<const NodeId> sources() const { return sources_; }

  std::optional<ArcId> find_arc(NodeId from, NodeId to) const;
  /// The arc (j,i) for arc (i,j), if present.
  std::optional<ArcId> reverse(ArcId id) const { return reverse_[static_cast<std::size_t>(id)]; }

  double total_demand() const;

  friend bool operator==(const RoadNetwork& a, const RoadNetwork& b) {
    return a.nodes_ == b.nodes_ && a.arcs_ == b.arcs_ && a.fr_nodes_ == b.fr_nodes_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<NodeId> fr_nodes_;
  std::vector<NodeId> exits_;
  std::vector<NodeId> sources_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
  std::vector<std::optional<ArcId>> reverse_;
};

/// Binary lane-reservation decision. `target_arcs(k)` is y_ijk for the k-th
/// entry of fr_nodes(); `reserved()` is y_ij.
class FrDesign {
 public:
  FrDesign() = default;
  FrDesign(std::size_t num_arcs, std::size_t num_targets);

  /// One path per FR target (aligned with net.fr_nodes()), y_ij = OR of paths.
  static FrDesign from_paths(const RoadNetwork& net, std::span<const Path> paths);

  std::size_t num_arcs() const { return reserved_.size(); }
  std::size_t num_targets() const { return targets_.size(); }

  std::span<const std::uint8_t> reserved() const { return reserved_; }
  std::span<const std::uint8_t> target_arcs(std::size_t k) const { return targets_[k]; }

  void set_target_arc(std::size_t k, ArcId a, bool on);
  /// Marks a lane reserved without attributing it to a target (y_ij > OR_k y_ijk).
  void force_reserved(ArcId a);
  /// Recomputes y_ij as the OR over targets, dropping forced reservations.
  void recompute_reserved();

  /// y_ijk flattened as k * num_arcs + arc.
  std::vector<int> flatten() const;
  static FrDesign unflatten(std::span<const int> flat, std::size_t num_arcs,
                            std::size_t num_targets);

  /// Bit-string of y_ij, usable as a map key.
  std::string key() const;

  /// Flow balance out(i) - in(i) = [i == k] for every non-exit i and target k,
  /// plus y_ijk <= y_ij.
  bool is_feasible(const RoadNetwork& net) const;

  friend bool operator==(const FrDesign&, const FrDesign&) = default;

 private:
  std::vector<std::vector<std::uint8_t>> targets_;
  std::vector<std::uint8_t> reserved_;
};

/// Capacities seen by evacuees once FR lanes are reserved.
class EffectiveNetwork {
 public:
  /// Unreserved view of `base`. `base` must outlive this object.
  explicit EffectiveNetwork(const RoadNetwork& base);
  EffectiveNetwork(const RoadNetwork& base, std::vector<double> capacity);

  const RoadNetwork& base() const { return *base_; }
  double capacity(ArcId a) const { return capacity_[static_cast<std::size_t>(a)]; }
  std::span<const double> capacities() const { return capacity_; }
  bool closed(ArcId a) const { return capacity(a) <= 0.0; }
  bool open(ArcId a) const { return !closed(a); }
  std::size_t num_closed() const;

 private:
  const RoadNetwork* base_;
  std::vector<double> capacity_;
};

/// c'_ij = c_ij (l_ij - 1) / l_ij when a lane of (i,j) or (j,i) is reserved.
EffectiveNetwork apply_reservation(const RoadNetwork& net, std::span<const std::uint8_t> reserved);
EffectiveNetwork apply_reservation(const RoadNetwork& net, const FrDesign& design);

/// Flow-balance row structure shared by FR designs, evacuee flows and the
/// path QUBO: one row per non-exit node, +1 on out-arcs, -1 on in-arcs.
struct BalanceSystem {
  std::vector<NodeId> row_nodes;             // non-exit nodes, ascending
  std::vector<std::vector<int>> matrix;      // rows x num_arcs
  std::vector<int> rhs;                      // delta_ik for the chosen target
};

BalanceSystem balance_system(const RoadNetwork& net, NodeId target);

/// Node sequence of a path, starting at its tail.
std::vector<NodeId> path_nodes(const RoadNetwork& net, const Path& path);
double path_free_flow_time(const RoadNetwork& net, const Path& path);
/// True when the arcs chain head-to-tail, visit no node twice and end at an exit.
bool is_simple_exit_path(const RoadNetwork& net, NodeId source, const Path& path);

}  // namespace frndp
