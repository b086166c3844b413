#include "frndp/instance_io.hpp"

#include <fstream>
#include <set>
#include <vector>

#include "frndp/error.hpp"

namespace frndp {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + "." + key, "missing field");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& value = require(obj, key, where);
  if (!value.is_number()) throw SchemaError(where + "." + key, "expected a number");
  return value.get<double>();
}

long long integer(const json& obj, const char* key, const std::string& where) {
  const json& value = require(obj, key, where);
  if (!value.is_number_integer()) throw SchemaError(where + "." + key, "expected an integer");
  return value.get<long long>();
}

}  // namespace

RoadNetwork instance_from_json(const json& doc) {
  const json& nodes_doc = require(doc, "nodes", "instance");
  if (!nodes_doc.is_array()) throw SchemaError("instance.nodes", "expected an array");
  const std::size_t n = nodes_doc.size();

  std::vector<Node> nodes(n);
  std::vector<bool> filled(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const json& entry = nodes_doc[i];
    const long long id = integer(entry, "id", where);
    if (id < 0 || static_cast<std::size_t>(id) >= n || filled[static_cast<std::size_t>(id)])
      throw SchemaError(where + ".id", "ids must be a permutation of 0..n-1");
    filled[static_cast<std::size_t>(id)] = true;

    Node node;
    node.x = number(entry, "x", where);
    node.y = number(entry, "y", where);
    node.demand = number(entry, "demand", where);
    const json& role = require(entry, "role", where);
    if (role == "interior")
      node.role = NodeRole::Interior;
    else if (role == "exit")
      node.role = NodeRole::Exit;
    else
      throw SchemaError(where + ".role", "expected \"interior\" or \"exit\"");
    nodes[static_cast<std::size_t>(id)] = node;
  }

  const json& arcs_doc = require(doc, "arcs", "instance");
  if (!arcs_doc.is_array()) throw SchemaError("instance.arcs", "expected an array");
  std::vector<Arc> arcs;
  arcs.reserve(arcs_doc.size());
  for (std::size_t a = 0; a < arcs_doc.size(); ++a) {
    const std::string where = "arcs[" + std::to_string(a) + "]";
    const json& entry = arcs_doc[a];
    Arc arc;
    arc.from = static_cast<NodeId>(integer(entry, "from", where));
    arc.to = static_cast<NodeId>(integer(entry, "to", where));
    arc.capacity = number(entry, "capacity", where);
    arc.free_flow_time = number(entry, "free_flow_time", where);
    arc.lanes = static_cast<int>(integer(entry, "lanes", where));
    arcs.push_back(arc);
  }

  const json& fr_doc = require(doc, "fr_nodes", "instance");
  if (!fr_doc.is_array()) throw SchemaError("instance.fr_nodes", "expected an array");
  std::vector<NodeId> fr_nodes;
  for (std::size_t i = 0; i < fr_doc.size(); ++i) {
    if (!fr_doc[i].is_number_integer())
      throw SchemaError("fr_nodes[" + std::to_string(i) + "]", "expected an integer");
    fr_nodes.push_back(fr_doc[i].get<NodeId>());
  }

  return RoadNetwork(std::move(nodes), std::move(arcs), std::move(fr_nodes));
}

json instance_to_json(const RoadNetwork& net) {
  json doc;
  json nodes = json::array();
  for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i) {
    const Node& node = net.node(i);
    nodes.push_back({{"id", i},
                     {"x", node.x},
                     {"y", node.y},
                     {"demand", node.demand},
                     {"role", node.role == NodeRole::Exit ? "exit" : "interior"}});
  }
  json arcs = json::array();
  for (const Arc& arc : net.arcs()) {
    arcs.push_back({{"from", arc.from},
                    {"to", arc.to},
                    {"capacity", arc.capacity},
                    {"free_flow_time", arc.free_flow_time},
                    {"lanes", arc.lanes}});
  }
  doc["nodes"] = std::move(nodes);
  doc["arcs"] = std::move(arcs);
  doc["fr_nodes"] = std::vector<NodeId>(net.fr_nodes().begin(), net.fr_nodes().end());
  return doc;
}

RoadNetwork load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const RoadNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << instance_to_json(net).dump(2) << '\n';
}

}  // namespace frndp
