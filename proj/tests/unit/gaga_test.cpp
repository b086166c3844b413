#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "frndp/error.hpp"
#include "frndp/gaga.hpp"
#include "frndp/generator.hpp"
#include "support.hpp"

namespace frndp {
namespace {

using testing::load_n4;

// Beckmann of one link, independent of the library's closed form: midpoint
// rule on the BPR integrand over unit-flow slices refined 200x.
double beckmann_link(double x, double T, double c) {
  const int n = std::max(1, static_cast<int>(std::ceil(x)) * 200);
  const double h = x / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = (i + 0.5) * h;
    sum += T * (1.0 + 0.15 * std::pow(f / c, 4));
  }
  return sum * h;
}

bool conserves(const RoadNetwork& net, std::span<const int> demands, std::span<const int> flows) {
  for (NodeId i = 0; i < static_cast<NodeId>(net.num_nodes()); ++i) {
    if (net.is_exit(i)) continue;
    long long balance = 0;
    for (ArcId a : net.out_arcs(i)) balance += flows[static_cast<std::size_t>(a)];
    for (ArcId a : net.in_arcs(i)) balance -= flows[static_cast<std::size_t>(a)];
    if (balance != demands[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

GagaConfig yen_config(std::size_t M) {
  GagaConfig config;
  config.backend = PathBackend::Yens;
  config.M = M;
  config.n_paths = 10;
  return config;
}

TEST(Setting, NamesMatchResultTableRows) {
  GagaConfig c;
  EXPECT_EQ(setting_name(c), "Unnormalized");
  c.inner_tolerance = 1e-3;
  EXPECT_EQ(setting_name(c), "Unnormalized, Tol = 1e-3");
  c.normalized = true;
  EXPECT_EQ(setting_name(c), "Normalized, Tol=1e-3");
  c.inner_tolerance.reset();
  EXPECT_EQ(setting_name(c), "Normalized");
}

TEST(Normalize, ScalesDemandAndCapacityTogether) {
  std::vector<Node> nodes{{0, 0, 30, NodeRole::Interior},
                          {1, 0, 7, NodeRole::Interior},
                          {2, 0, 0, NodeRole::Exit}};
  std::vector<Arc> arcs{{0, 1, 12, 1, 1}, {1, 2, 6, 2, 2}};
  const RoadNetwork net(nodes, arcs, {0});
  const auto scaled = normalize_demands(net);
  EXPECT_DOUBLE_EQ(scaled.scale, 100.0 / 30.0);
  EXPECT_DOUBLE_EQ(scaled.net.demand(0), 100.0);
  EXPECT_DOUBLE_EQ(scaled.net.demand(1), 23.0);  // 23.33 rounded
  EXPECT_DOUBLE_EQ(scaled.net.arc(0).capacity, 40.0);
  EXPECT_DOUBLE_EQ(scaled.net.arc(1).capacity, 20.0);
  EXPECT_EQ(scaled.net.arc(1).lanes, 2);

  const auto n4 = normalize_demands(load_n4());
  EXPECT_DOUBLE_EQ(n4.scale, 1.0);
  EXPECT_EQ(n4.net, load_n4());

  nodes[0].demand = 0;
  nodes[1].demand = 0;
  EXPECT_THROW(normalize_demands(RoadNetwork(nodes, arcs, {0})), std::invalid_argument);
}

TEST(InnerWalk, TwoRouteFixedPointMatchesBruteForce) {
  const double c1 = 4, c2 = 6, t1 = 1.0, t2 = 1.3;
  const int d = 10;
  const auto net = testing::two_route_network(d, c1, c2, t1, t2);
  const EffectiveNetwork eff(net);
  const PathCache paths{{0, {{0, 2}, {1, 3}}}};
  const std::vector<NodeId> sources{0};
  const auto basis = build_inner_basis(net, paths, sources);
  ASSERT_EQ(basis.size(), 1u);

  // Brute force over the d+1 integer splits.
  int best_split = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int x1 = 0; x1 <= d; ++x1) {
    const double b = beckmann_link(x1, t1, c1) + beckmann_link(d - x1, t2, c2);
    if (b < best) {
      best = b;
      best_split = x1;
    }
  }
  for (int start = 0; start <= d; ++start) {
    const auto r = inner_gama_ue(eff, basis, {start, d - start, start, d - start});
    EXPECT_EQ(r.flows[0], best_split) << "start " << start;
    EXPECT_NEAR(r.beckmann, best, 1e-6 * best);
    const auto again = inner_gama_ue(eff, basis, r.flows);
    EXPECT_EQ(again.steps, 0u);
    EXPECT_EQ(again.flows, r.flows);
  }
}

TEST(InnerWalk, ToleranceStopsNoLaterAndNoBetter) {
  const auto net = generate_random_instance(10, 0.75, 11);
  const EffectiveNetwork eff(net);
  const auto sources = net.sources();
  GagaConfig config = yen_config(1);
  const auto paths = generate_paths(net, sources, config);
  const auto basis = build_inner_basis(net, paths, sources);
  std::mt19937_64 rng(5);
  const auto start = build_inner_seed(eff, paths, integer_demands(net), rng);
  const auto full = inner_gama_ue(eff, basis, start);
  const auto loose = inner_gama_ue(eff, basis, start, {.tolerance = 1e-1});
  EXPECT_LE(loose.steps, full.steps);
  EXPECT_LE(loose.passes, full.passes);
  EXPECT_GE(loose.beckmann, full.beckmann - 1e-9 * full.beckmann);
}

TEST(InnerWalk, RejectsInvalidStartsAndKeepsClosedArcsEmpty) {
  const auto net = load_n4();
  const auto eff = apply_reservation(net, testing::n4_id2());  // (0,1), (1,3) closed
  const PathCache paths{{0, {{2}, {0, 4}, {1, 5}, {0, 3, 5}}}};
  const std::vector<NodeId> sources{0};
  const auto basis = build_inner_basis(net, paths, sources);
  EXPECT_THROW(inner_gama_ue(eff, basis, {-1, 0, 101, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(inner_gama_ue(eff, basis, {100, 0, 0, 0, 100, 0}), std::invalid_argument);

  const auto r = inner_gama_ue(eff, basis, {0, 0, 100, 0, 0, 0});
  EXPECT_EQ(r.flows[0], 0);
  EXPECT_EQ(r.flows[4], 0);
  EXPECT_TRUE(conserves(net, integer_demands(net), r.flows));
  const std::vector<double> as_double(r.flows.begin(), r.flows.end());
  EXPECT_NEAR(r.beckmann, beckmann_objective(eff, as_double), 1e-9 * r.beckmann);
}

// Property: on random instances the seed and the walk conserve flow exactly,
// stay non-negative and never load a closed arc.
TEST(InnerWalk, RandomInstancesConserveFlow) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto net = generate_random_instance(9, 0.75, 300 + seed);
    const auto config = yen_config(1);
    std::vector<NodeId> nodes(net.fr_nodes().begin(), net.fr_nodes().end());
    nodes.insert(nodes.end(), net.sources().begin(), net.sources().end());
    const auto paths = generate_paths(net, nodes, config);
    std::vector<std::vector<Path>> target_paths;
    for (NodeId k : net.fr_nodes()) target_paths.push_back(paths.at(k));
    const auto design = build_seeds(net, target_paths, 1, seed)[0];
    const auto eff = apply_reservation(net, design);
    const auto basis = build_inner_basis(net, paths, net.sources());
    std::mt19937_64 rng(seed);
    const auto demands = integer_demands(net);
    std::vector<int> start;
    try {
      start = build_inner_seed(eff, paths, demands, rng);
    } catch (const NoPathError&) {
      continue;  // every sampled route of some source was closed
    }
    EXPECT_TRUE(conserves(net, demands, start));
    const auto r = inner_gama_ue(eff, basis, start);
    EXPECT_TRUE(conserves(net, demands, r.flows));
    for (std::size_t a = 0; a < r.flows.size(); ++a) {
      EXPECT_GE(r.flows[a], 0);
      if (eff.closed(static_cast<ArcId>(a))) EXPECT_EQ(r.flows[a], 0);
    }
  }
}

TEST(InnerSeed, AllRoutesClosedThrows) {
  const auto net = load_n4();
  const auto eff = apply_reservation(net, testing::n4_reserved({2, 0}));
  const PathCache paths{{0, {{2}, {0, 4}}}};
  std::mt19937_64 rng(1);
  EXPECT_THROW(build_inner_seed(eff, paths, integer_demands(net), rng), NoPathError);
}

TEST(GagaEvaluatorTest, WarmStartKeepsConservationAcrossDesigns) {
  const auto net = load_n4();
  const PathCache paths{{0, {{2}, {0, 4}, {1, 5}, {0, 3, 5}}}};
  const std::vector<NodeId> sources{0};
  const auto basis = build_inner_basis(net, paths, sources);
  GagaEvaluator ev(net, basis, paths, {}, 9);
  const std::vector<Path> p1{{2}}, p2{{0, 4}};
  const auto d1 = FrDesign::from_paths(net, p1);
  const auto d2 = FrDesign::from_paths(net, p2);
  const auto v1 = ev.evaluate(d1);
  ASSERT_TRUE(v1);
  EXPECT_NEAR(*v1, 507.56, 0.02 * 507.56);
  ev.accept(d1);
  const auto v2 = ev.evaluate(d2);
  ASSERT_TRUE(v2);
  EXPECT_NEAR(*v2, 243.43, 0.02 * 243.43);
  ASSERT_NE(ev.flows(d2), nullptr);
  EXPECT_TRUE(conserves(net, integer_demands(net), *ev.flows(d2)));
  EXPECT_EQ((*ev.flows(d2))[0], 0);
  EXPECT_EQ((*ev.flows(d2))[4], 0);
}

TEST(RunGaga, N4FindsTheBestDesign) {
  const auto net = load_n4();
  for (auto backend : {PathBackend::Yens, PathBackend::SimulatedAnnealing}) {
    GagaConfig config = yen_config(4);
    config.backend = backend;
    config.n_samples = 500;
    const auto r = run_gaga(net, config);
    const std::vector<std::uint8_t> reserved(r.best_design.reserved().begin(),
                                             r.best_design.reserved().end());
    EXPECT_EQ(reserved, testing::n4_id2());
    EXPECT_NEAR(r.objective, 243.43, 0.01 * 243.43);
    EXPECT_NEAR(r.gaga_only_objective, 243.43, 0.02 * 243.43);
    EXPECT_EQ(r.outer_basis_size, 6u);
    EXPECT_EQ(r.seeds_completed, 4u);
    EXPECT_EQ(r.yen_fallbacks, 0u);
  }
}

TEST(RunGaga, SameSeedSameResult) {
  const auto net = generate_random_instance(8, 0.75, 21);
  GagaConfig config;
  config.M = 3;
  config.n_paths = 8;
  config.n_samples = 300;
  config.rng_seed = 77;
  const auto a = run_gaga(net, config);
  const auto b = run_gaga(net, config);
  EXPECT_EQ(a.best_design, b.best_design);
  EXPECT_EQ(a.gaga_only_objective, b.gaga_only_objective);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.paths, b.paths);
  ASSERT_EQ(a.seeds.size(), b.seeds.size());
  for (std::size_t i = 0; i < a.seeds.size(); ++i)
    EXPECT_EQ(a.seeds[i].walk.design, b.seeds[i].walk.design);
}

TEST(RunGaga, BestDesignHasLowestRefinedTime) {
  const auto net = generate_random_instance(9, 0.75, 8);
  auto config = yen_config(5);
  const auto r = run_gaga(net, config);
  for (const auto& s : r.seeds)
    if (s.refined) EXPECT_GE(*s.refined, r.objective);
  EXPECT_NEAR(r.objective, total_evac_time(apply_reservation(net, r.best_design), r.best_flows),
              1e-9 * r.objective);
}

TEST(RunGaga, NormalizedReportsOriginalUnits) {
  const auto net = load_n4();
  auto config = yen_config(4);
  config.normalized = true;
  const auto r = run_gaga(net, config);
  EXPECT_DOUBLE_EQ(r.scale, 1.0);
  EXPECT_NEAR(r.gaga_only_objective, 243.43, 0.02 * 243.43);

  // Demand 50 scales by 2: the walk sees twice the flow, the report does not.
  std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  std::vector<Arc> arcs(net.arcs().begin(), net.arcs().end());
  nodes[0].demand = 50;
  for (auto& a : arcs) a.capacity /= 2;
  const RoadNetwork half(nodes, arcs, {0});
  const auto h = run_gaga(half, config);
  EXPECT_DOUBLE_EQ(h.scale, 2.0);
  EXPECT_NEAR(h.gaga_only_objective, r.gaga_only_objective / 2, 1e-6 * r.gaga_only_objective);
}

// Property: the inner walk's time for the chosen design stays within 25% of
// the Frank-Wolfe time for the same design.
TEST(RunGaga, InnerObjectiveTracksFrankWolfe) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto net = generate_random_instance(8, 0.75, 400 + seed);
    GagaConfig config;
    config.M = 2;
    config.n_paths = 10;
    config.n_samples = 300;
    config.rng_seed = seed;
    const auto r = run_gaga(net, config);
    for (const auto& s : r.seeds) {
      if (!s.refined) continue;
      EXPECT_LE(std::abs(s.walk.objective - *s.refined), 0.25 * *s.refined) << "seed " << seed;
    }
  }
}

TEST(RunGaga, OverridesAndValidation) {
  const auto net = load_n4();
  auto config = yen_config(1);
  GagaInputs inputs;
  inputs.paths = PathCache{{0, {{2}, {0, 4}, {1, 5}, {0, 3, 5}}}};
  const std::vector<Path> seed{{2}};
  inputs.seeds = std::vector<FrDesign>{FrDesign::from_paths(net, seed)};
  const auto r = run_gaga(net, config, inputs);
  ASSERT_EQ(r.seeds.size(), 1u);
  EXPECT_EQ(r.seeds[0].walk.trace.front().direction, 0u);
  EXPECT_EQ(r.seeds[0].walk.trace.front().status, CandidateStatus::Improved);

  inputs.paths = PathCache{};
  EXPECT_THROW(run_gaga(net, config, inputs), NoPathError);
  config.M = 0;
  EXPECT_THROW(run_gaga(net, config), std::invalid_argument);
}

}  // namespace
}  // namespace frndp
