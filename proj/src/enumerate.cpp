#include "frndp/enumerate.hpp"

#include <map>
#include <string>

#include "frndp/error.hpp"
#include "frndp/pathgen.hpp"

namespace frndp {

namespace {

// Intermediate path unions may outnumber the final designs; bound the work.
constexpr std::size_t kPartialFactor = 64;

void dfs(const RoadNetwork& net, NodeId v, std::vector<std::uint8_t>& visited, Path& stack,
         std::vector<Path>& out, std::size_t cap) {
  for (ArcId a : net.out_arcs(v)) {
    const NodeId w = net.arc(a).to;
    if (visited[static_cast<std::size_t>(w)]) continue;
    stack.push_back(a);
    if (net.is_exit(w)) {
      out.push_back(stack);
      if (out.size() > cap)
        throw SizeLimitExceeded("more than " + std::to_string(cap) + " simple paths");
    } else {
      visited[static_cast<std::size_t>(w)] = 1;
      dfs(net, w, visited, stack, out, cap);
      visited[static_cast<std::size_t>(w)] = 0;
    }
    stack.pop_back();
  }
}

}  // namespace

std::vector<Path> all_simple_exit_paths(const RoadNetwork& net, NodeId k, std::size_t cap) {
  std::vector<Path> out;
  if (net.is_exit(k)) return out;
  std::vector<std::uint8_t> visited(net.num_nodes(), 0);
  visited[static_cast<std::size_t>(k)] = 1;
  Path stack;
  dfs(net, k, visited, stack, out, cap);
  sort_paths(net, out);
  return out;
}

std::vector<EnumeratedDesign> enumerate_designs(const RoadNetwork& net, std::size_t cap,
                                                const UeOptions& ue) {
  const std::size_t partial_cap = cap * kPartialFactor;
  // Designs depend only on the union of paths, so partial unions are deduped
  // by their reserved-lane key, keeping the first path combination.
  std::vector<std::vector<Path>> combos{{}};
  for (NodeId k : net.fr_nodes()) {
    const auto paths = all_simple_exit_paths(net, k, partial_cap);
    if (paths.empty()) throw NoPathError("FR target " + std::to_string(k) + " cannot reach an exit");
    std::vector<std::vector<Path>> next;
    std::map<std::string, bool> seen;
    for (const auto& combo : combos)
      for (const auto& p : paths) {
        auto extended = combo;
        extended.push_back(p);
        std::string key(net.num_arcs(), '0');
        for (const auto& q : extended)
          for (ArcId a : q) key[static_cast<std::size_t>(a)] = '1';
        if (!seen.emplace(key, true).second) continue;
        next.push_back(std::move(extended));
        if (next.size() > partial_cap)
          throw SizeLimitExceeded("design enumeration exceeds " + std::to_string(partial_cap) +
                                  " partial designs");
      }
    combos = std::move(next);
  }
  if (combos.size() > cap)
    throw SizeLimitExceeded(std::to_string(combos.size()) + " FR designs exceed the cap of " +
                            std::to_string(cap));

  std::vector<EnumeratedDesign> out;
  out.reserve(combos.size());
  for (const auto& combo : combos) {
    EnumeratedDesign entry{FrDesign::from_paths(net, combo), std::nullopt};
    try {
      entry.objective = solve_ue(apply_reservation(net, entry.design), ue).total_time;
    } catch (const DisconnectedSource&) {
    }
    out.push_back(std::move(entry));
  }
  return out;
}

const EnumeratedDesign* best_design(const std::vector<EnumeratedDesign>& designs) {
  const EnumeratedDesign* best = nullptr;
  for (const auto& d : designs)
    if (d.objective && (!best || *d.objective < *best->objective)) best = &d;
  return best;
}

}  // namespace frndp
