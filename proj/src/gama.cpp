#include "frndp/gama.hpp"

#include <chrono>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "frndp/error.hpp"

namespace frndp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

UeEvaluator::UeEvaluator(const RoadNetwork& net, UeOptions options)
    : net_(&net), options_(options) {}

std::optional<double> UeEvaluator::evaluate(const FrDesign& design) {
  const auto key = design.key();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::optional<double> value;
  try {
    ++solves_;
    value = solve_ue(apply_reservation(*net_, design), options_).total_time;
  } catch (const DisconnectedSource&) {
  }
  cache_.emplace(key, value);
  return value;
}

std::string to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::OutOfBounds: return "out_of_bounds";
    case CandidateStatus::Unbalanced: return "unbalanced";
    case CandidateStatus::Rejected: return "rejected";
    case CandidateStatus::NotImproving: return "not_improving";
    case CandidateStatus::Improved: return "improved";
  }
  return "unknown";
}

IntVector path_indicator(const RoadNetwork& net, const Path& path) {
  std::vector<int> dense(net.num_arcs(), 0);
  for (ArcId a : path) dense[static_cast<std::size_t>(a)] = 1;
  return IntVector::from_dense(dense);
}

GraverSet build_outer_basis(const RoadNetwork& net, std::span<const std::vector<Path>> target_paths) {
  const std::size_t arcs = net.num_arcs();
  const std::size_t dim = arcs * target_paths.size();
  std::vector<IntVector> pool;
  for (std::size_t t = 0; t < target_paths.size(); ++t) {
    std::vector<IntVector> indicators;
    for (const Path& p : target_paths[t]) indicators.push_back(path_indicator(net, p));
    for (const auto& d : lattice_from_differences(indicators)) pool.push_back(d.embed(t * arcs, dim));
  }
  return conformal_filter(dim, std::move(pool));
}

std::vector<FrDesign> build_seeds(const RoadNetwork& net,
                                  std::span<const std::vector<Path>> target_paths, std::size_t M,
                                  std::uint64_t seed) {
  if (M == 0) throw std::invalid_argument("M must be >= 1");
  const auto targets = net.fr_nodes();
  if (target_paths.size() != targets.size())
    throw std::invalid_argument("one path list per FR target expected");
  for (std::size_t t = 0; t < targets.size(); ++t)
    if (target_paths[t].empty())
      throw NoPathError("no paths for node " + std::to_string(targets[t]));
  std::mt19937_64 rng(seed);
  std::vector<FrDesign> seeds;
  seeds.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    std::vector<Path> chosen;
    for (const auto& paths : target_paths) {
      std::uniform_int_distribution<std::size_t> pick(0, paths.size() - 1);
      chosen.push_back(paths[pick(rng)]);
    }
    seeds.push_back(FrDesign::from_paths(net, chosen));
  }
  return seeds;
}

WalkResult outer_walk(const RoadNetwork& net, const FrDesign& seed, const GraverSet& basis,
                      DesignEvaluator& evaluator, const WalkOptions& options) {
  const auto start = Clock::now();
  const std::size_t arcs = net.num_arcs();
  const std::size_t targets = seed.num_targets();
  if (!basis.empty() && basis.dim() != arcs * targets)
    throw std::invalid_argument("basis dimension does not match the design space");
  if (!seed.is_feasible(net)) throw std::invalid_argument("seed design violates flow balance");

  WalkResult result;
  result.design = seed;
  auto seed_value = evaluator.evaluate(seed);
  ++result.evaluations;
  if (!seed_value) {
    result.seed_feasible = false;
    result.objective = std::numeric_limits<double>::infinity();
    result.wall_time = seconds_since(start);
    return result;
  }
  evaluator.accept(seed);
  result.objective = *seed_value;
  result.progress.push_back({0, result.objective, seconds_since(start)});

  std::vector<int> current = seed.flatten();
  auto out_of_time = [&] {
    return options.time_budget && seconds_since(start) > *options.time_budget;
  };

  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t d = 0; d < basis.size() && !improved; ++d) {
      for (int sign : {1, -1}) {
        if (out_of_time()) {
          result.completed = false;
          result.wall_time = seconds_since(start);
          return result;
        }
        CandidateStatus status = CandidateStatus::OutOfBounds;
        FrDesign candidate;
        auto objective = [&](std::span<const int> y) -> std::optional<double> {
          candidate = FrDesign::unflatten(y, arcs, targets);
          if (!candidate.is_feasible(net)) {
            status = CandidateStatus::Unbalanced;
            return std::nullopt;
          }
          ++result.evaluations;
          auto value = evaluator.evaluate(candidate);
          if (!value) status = CandidateStatus::Rejected;
          return value;
        };
        auto step = try_step(current, result.objective, basis[d], sign, 0, 1, objective);
        if (step.outcome == StepOutcome::NotImproving) status = CandidateStatus::NotImproving;
        if (step.outcome == StepOutcome::Improved) status = CandidateStatus::Improved;
        if (options.record_trace) result.trace.push_back({d, sign, status, step.value});
        if (status != CandidateStatus::Improved) continue;

        current = std::move(step.point);
        result.design = candidate;
        result.objective = *step.value;
        ++result.accepted_steps;
        evaluator.accept(candidate);
        result.progress.push_back({result.accepted_steps, result.objective, seconds_since(start)});
        improved = true;
        break;
      }
    }
  }
  result.wall_time = seconds_since(start);
  return result;
}

MultiSeedResult multi_seed_solve(const RoadNetwork& net, std::span<const FrDesign> seeds,
                                 const GraverSet& basis, const EvaluatorFactory& factory,
                                 const MultiSeedOptions& options) {
  if (seeds.empty()) throw std::invalid_argument("multi_seed_solve needs at least one seed");
  const auto start = Clock::now();
  MultiSeedResult result;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    WalkOptions walk_options{options.per_seed_budget, options.record_trace};
    if (options.total_budget) {
      const double left = *options.total_budget - seconds_since(start);
      if (left <= 0.0) {
        result.partial = true;
        break;
      }
      walk_options.time_budget =
          walk_options.time_budget ? std::min(*walk_options.time_budget, left) : left;
    }
    auto evaluator = factory(s);
    result.per_seed.push_back(outer_walk(net, seeds[s], basis, *evaluator, walk_options));
    const auto& walk = result.per_seed.back();
    if (walk.completed) ++result.seeds_completed;
    else result.partial = true;
    if (walk.seed_feasible &&
        (!result.best || walk.objective < result.per_seed[*result.best].objective))
      result.best = result.per_seed.size() - 1;
  }
  return result;
}

void write_progress_csv(const MultiSeedResult& result, const std::filesystem::path& file,
                        bool include_times) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "seed,step,objective" << (include_times ? ",wall_time_s" : "") << '\n';
  out.precision(10);
  for (std::size_t s = 0; s < result.per_seed.size(); ++s)
    for (const auto& p : result.per_seed[s].progress) {
      out << s << ',' << p.step << ',' << p.objective;
      if (include_times) out << ',' << p.wall_time;
      out << '\n';
    }
}

}  // namespace frndp
