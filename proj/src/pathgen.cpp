#include "frndp/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "frndp/error.hpp"
#include "frndp/shortest_path.hpp"

namespace frndp {

double QuboProblem::energy(std::span<const std::uint8_t> x) const {
  const std::size_t n = num_vars();
  double e = offset;
  for (std::size_t i = 0; i < n; ++i) {
    if (!x[i]) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (x[j]) e += Q[i * n + j];
  }
  return e;
}

long long QuboProblem::residual(std::span<const std::uint8_t> x) const {
  long long total = 0;
  for (std::size_t r = 0; r < A.size(); ++r) {
    long long lhs = -b[r];
    for (std::size_t v = 0; v < A[r].size(); ++v)
      if (x[v]) lhs += A[r][v];
    total += lhs * lhs;
  }
  return total;
}

std::vector<std::uint8_t> QuboProblem::decode(std::span<const std::uint8_t> x,
                                              std::size_t num_arcs) const {
  std::vector<std::uint8_t> arcs(num_arcs, 0);
  for (std::size_t v = 0; v < num_arc_vars; ++v)
    if (x[v]) arcs[static_cast<std::size_t>(var_arc[v])] = 1;
  return arcs;
}

std::vector<std::uint8_t> QuboProblem::encode(const Path& path) const {
  std::vector<std::uint8_t> x(num_vars(), 0);
  for (ArcId a : path) {
    const auto it = std::find(var_arc.begin(), var_arc.end(), a);
    if (it != var_arc.end()) x[static_cast<std::size_t>(it - var_arc.begin())] = 1;
  }
  // Slack rows come after the balance rows, one per auxiliary variable.
  const std::size_t first_slack_row = A.size() - aux_node.size();
  for (std::size_t s = 0; s < aux_node.size(); ++s) {
    int used = 0;
    for (std::size_t v = 0; v < num_arc_vars; ++v) used += A[first_slack_row + s][v] * x[v];
    x[num_arc_vars + s] = used == 0 ? 1 : 0;
  }
  return x;
}

QuboProblem build_path_qubo(const RoadNetwork& net, NodeId k, bool forbid_cycles) {
  if (net.is_exit(k)) throw std::invalid_argument("path QUBO target must not be an exit");
  QuboProblem qubo;
  qubo.target = k;
  std::vector<int> arc_var(net.num_arcs(), -1);
  for (ArcId a = 0; a < static_cast<ArcId>(net.num_arcs()); ++a) {
    if (net.is_exit(net.arc(a).from)) continue;
    arc_var[static_cast<std::size_t>(a)] = static_cast<int>(qubo.var_arc.size());
    qubo.var_arc.push_back(a);
  }
  qubo.num_arc_vars = qubo.var_arc.size();
  std::vector<NodeId> interior;
  for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i)
    if (!net.is_exit(i)) interior.push_back(i);
  if (forbid_cycles) qubo.aux_node = interior;
  const std::size_t n = qubo.num_vars();

  for (NodeId i : interior) {
    std::vector<int> row(n, 0);
    for (ArcId a : net.out_arcs(i)) row[static_cast<std::size_t>(arc_var[static_cast<std::size_t>(a)])] += 1;
    for (ArcId a : net.in_arcs(i))
      if (const int v = arc_var[static_cast<std::size_t>(a)]; v >= 0) row[static_cast<std::size_t>(v)] -= 1;
    qubo.A.push_back(std::move(row));
    qubo.b.push_back(i == k ? 1 : 0);
  }
  for (std::size_t s = 0; s < qubo.aux_node.size(); ++s) {
    std::vector<int> row(n, 0);
    for (ArcId a : net.out_arcs(qubo.aux_node[s]))
      row[static_cast<std::size_t>(arc_var[static_cast<std::size_t>(a)])] = 1;
    row[qubo.num_arc_vars + s] = 1;
    qubo.A.push_back(std::move(row));
    qubo.b.push_back(1);
  }

  // ||Ax - b||^2 = x^T (A^T A) x - 2 b^T A x + b^T b, and x_i^2 = x_i.
  qubo.Q.assign(n * n, 0.0);
  for (std::size_t r = 0; r < qubo.A.size(); ++r) {
    const auto& row = qubo.A[r];
    std::vector<std::size_t> support;
    for (std::size_t v = 0; v < n; ++v)
      if (row[v] != 0) support.push_back(v);
    for (std::size_t i : support) {
      for (std::size_t j : support) qubo.Q[i * n + j] += row[i] * row[j];
      qubo.Q[i * n + i] -= 2.0 * qubo.b[r] * row[i];
    }
    qubo.offset += qubo.b[r] * qubo.b[r];
  }
  return qubo;
}

std::vector<std::vector<std::uint8_t>> simulated_annealing(const QuboProblem& qubo,
                                                           int n_samples, std::uint64_t seed,
                                                           const AnnealSchedule& schedule) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (schedule.sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  const std::size_t n = qubo.num_vars();
  // Off-diagonal couplings in compressed rows.
  std::vector<std::size_t> row_start{0};
  std::vector<std::uint32_t> nbr;
  std::vector<double> weight;
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = qubo.q(i, i);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && qubo.q(i, j) != 0.0) {
        nbr.push_back(static_cast<std::uint32_t>(j));
        weight.push_back(qubo.q(i, j));
      }
    row_start.push_back(nbr.size());
  }
  auto local_field = [&](std::size_t i, const std::vector<std::uint8_t>& x) {
    double h = 0.0;
    for (std::size_t e = row_start[i]; e < row_start[i + 1]; ++e) h += weight[e] * x[nbr[e]];
    return h;
  };

  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto coin = [&rng] { return (rng() >> 63) != 0; };

  // Typical uphill move from random states sets the starting temperature.
  double uphill = 0.0;
  int uphill_count = 0;
  for (int probe = 0; probe < 8; ++probe) {
    std::vector<std::uint8_t> x(n);
    for (auto& bit : x) bit = coin() ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = local_field(i, x);
      const double delta = (x[i] ? -1.0 : 1.0) * (diag[i] + 2.0 * h);
      if (delta > 0.0) {
        uphill += delta;
        ++uphill_count;
      }
    }
  }
  const double t_end = 1.0 / std::log(1.0 / schedule.final_acceptance);
  const double t_start =
      std::max(t_end, (uphill_count > 0 ? uphill / uphill_count : 1.0) /
                          std::log(1.0 / schedule.initial_acceptance));
  const double cooling =
      schedule.sweeps > 1 ? std::pow(t_end / t_start, 1.0 / (schedule.sweeps - 1)) : 1.0;
  std::vector<double> temperatures(static_cast<std::size_t>(schedule.sweeps));
  temperatures[0] = t_start;
  for (std::size_t s = 1; s < temperatures.size(); ++s) temperatures[s] = temperatures[s - 1] * cooling;

  // exp(-37) is below the resolution of a uniform double, so larger uphill
  // moves are rejected without a draw. Integer coefficients (the balance
  // QUBOs) give integer moves, whose acceptance odds are tabulated per sweep.
  constexpr double kMaxExponent = 37.0;
  constexpr std::size_t kMaxTable = 4096;
  bool integral = true;
  for (double q : qubo.Q) integral = integral && q == std::round(q);
  std::vector<std::vector<double>> accept_table;
  if (integral) {
    accept_table.resize(temperatures.size());
    for (std::size_t s = 0; s < temperatures.size(); ++s) {
      const auto size = static_cast<std::size_t>(
          std::min<double>(kMaxTable, std::floor(kMaxExponent * temperatures[s]) + 1));
      accept_table[s].resize(size);
      for (std::size_t d = 0; d < size; ++d)
        accept_table[s][d] = std::exp(-static_cast<double>(d) / temperatures[s]);
    }
  }

  std::vector<std::vector<std::uint8_t>> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  std::vector<double> field(n);
  for (int s = 0; s < n_samples; ++s) {
    std::vector<std::uint8_t> x(n);
    for (auto& bit : x) bit = coin() ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) field[i] = local_field(i, x);
    for (std::size_t sweep = 0; sweep < temperatures.size(); ++sweep) {
      const double temperature = temperatures[sweep];
      const double reject_above = kMaxExponent * temperature;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = (x[i] ? -1.0 : 1.0) * (diag[i] + 2.0 * field[i]);
        if (delta > 0.0) {
          if (delta > reject_above) continue;
          const auto d = static_cast<std::size_t>(delta);
          const double odds = integral && d < accept_table[sweep].size()
                                  ? accept_table[sweep][d]
                                  : std::exp(-delta / temperature);
          if (unit() >= odds) continue;
        }
        const double change = x[i] ? -1.0 : 1.0;
        x[i] ^= 1;
        for (std::size_t e = row_start[i]; e < row_start[i + 1]; ++e) field[nbr[e]] += weight[e] * change;
      }
    }
    samples.push_back(std::move(x));
  }
  return samples;
}

void sort_paths(const RoadNetwork& net, std::vector<Path>& paths) {
  std::vector<std::pair<double, Path>> keyed;
  keyed.reserve(paths.size());
  for (auto& p : paths) keyed.emplace_back(path_free_flow_time(net, p), std::move(p));
  std::sort(keyed.begin(), keyed.end());
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.second == b.second; }),
              keyed.end());
  paths.clear();
  for (auto& [length, p] : keyed) paths.push_back(std::move(p));
}

Path extract_simple_path(const RoadNetwork& net, std::span<const std::uint8_t> arc_set, NodeId k) {
  auto path = shortest_exit_path(net, k, free_flow_costs(net), arc_set);
  if (!path) throw NoPathError("no path in selection from node " + std::to_string(k));
  return *path;
}

PathSample sample_feasible(const RoadNetwork& net, const QuboProblem& qubo, int n_samples,
                           std::size_t n_paths, std::uint64_t seed,
                           const AnnealSchedule& schedule) {
  PathSample sample{qubo.target, {}};
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& x : simulated_annealing(qubo, n_samples, seed, schedule)) {
    if (qubo.residual(x) != 0) continue;
    auto arcs = qubo.decode(x, net.num_arcs());
    if (!seen.insert(arcs).second) continue;
    sample.paths.push_back(extract_simple_path(net, arcs, qubo.target));
  }
  if (sample.paths.empty())
    throw NoPathError("no feasible sample for node " + std::to_string(qubo.target));
  sort_paths(net, sample.paths);
  if (sample.paths.size() > n_paths) sample.paths.resize(n_paths);
  return sample;
}

PathSample yen_k_shortest(const RoadNetwork& net, NodeId k, std::size_t K,
                          std::span<const std::uint8_t> usable) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  const auto cost = free_flow_costs(net);
  std::vector<std::uint8_t> base_mask(net.num_arcs(), 1);
  if (!usable.empty()) std::copy(usable.begin(), usable.end(), base_mask.begin());

  PathSample result{k, {}};
  auto first = shortest_exit_path(net, k, cost, base_mask);
  if (!first) throw NoPathError("node " + std::to_string(k) + " cannot reach an exit");
  result.paths.push_back(*first);

  std::set<std::pair<double, Path>> candidates;
  while (result.paths.size() < K) {
    const Path& last = result.paths.back();
    const auto nodes = path_nodes(net, last);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const Path root(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(i));
      auto mask = base_mask;
      for (const Path& p : result.paths)
        if (p.size() > i && std::equal(root.begin(), root.end(), p.begin()))
          mask[static_cast<std::size_t>(p[i])] = 0;
      std::vector<std::uint8_t> blocked(net.num_nodes(), 0);
      for (std::size_t r = 0; r < i; ++r) blocked[static_cast<std::size_t>(nodes[r])] = 1;
      auto spur = shortest_exit_path(net, nodes[i], cost, mask, blocked);
      if (!spur) continue;
      Path candidate = root;
      candidate.insert(candidate.end(), spur->begin(), spur->end());
      candidates.emplace(path_free_flow_time(net, candidate), std::move(candidate));
    }
    bool added = false;
    while (!candidates.empty()) {
      auto best = candidates.extract(candidates.begin()).value().second;
      if (std::find(result.paths.begin(), result.paths.end(), best) != result.paths.end())
        continue;
      result.paths.push_back(std::move(best));
      added = true;
      break;
    }
    if (!added) break;
  }
  return result;
}

void save_path_cache(const PathCache& cache, const std::filesystem::path& file) {
  nlohmann::json paths = nlohmann::json::object();
  for (const auto& [node, list] : cache) paths[std::to_string(node)] = list;
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << nlohmann::json{{"paths", paths}}.dump(1) << '\n';
}

PathCache load_path_cache(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(file.string(), e.what());
  }
  if (!doc.contains("paths") || !doc["paths"].is_object())
    throw SchemaError("paths", "expected an object keyed by node id");
  PathCache cache;
  for (const auto& [key, list] : doc["paths"].items()) {
    try {
      cache[std::stoi(key)] = list.get<std::vector<Path>>();
    } catch (const std::exception& e) {
      throw SchemaError("paths." + key, e.what());
    }
  }
  return cache;
}

}  // namespace frndp
