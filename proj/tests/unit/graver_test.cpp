#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "frndp/assignment.hpp"
#include "frndp/error.hpp"
#include "frndp/graver.hpp"
#include "frndp/network.hpp"
#include "support.hpp"

namespace frndp {
namespace {

IntVector v(std::initializer_list<int> xs) { return IntVector::from_dense(std::vector<int>(xs)); }

IntMatrix n4_a_fr() {
  return {{1, 1, 1, 0, 0, 0}, {-1, 0, 0, 1, 1, 0}, {0, -1, 0, -1, 0, 1}};
}

std::vector<IntVector> n4_feasible() {
  return {v({0, 0, 1, 0, 0, 0}), v({1, 0, 0, 0, 1, 0}), v({0, 1, 0, 0, 0, 1}),
          v({1, 0, 0, 1, 0, 1})};
}

// Reference kernel vectors from the four N4 paths.
std::vector<IntVector> n4_reference_kernel() {
  return {v({0, 0, 0, 1, -1, 1}), v({1, -1, 0, 1, 0, 0}),  v({1, 0, -1, 1, 0, 1}),
          v({1, -1, 0, 0, 1, -1}), v({1, 0, -1, 0, 1, 0}), v({0, 1, -1, 0, 0, 1})};
}

// Reference Graver basis of A_FR, one column per vector.
std::vector<IntVector> n4_reference_graver() {
  const int cols[6][14] = {
      {1, 1, 0, -1, -1, 0, 1, -1, 0, 0, 1, -1, 0, 0},
      {-1, 0, 1, 1, 0, -1, 0, 0, -1, 1, -1, 1, 0, 0},
      {0, -1, -1, 0, 1, 1, -1, 1, 1, -1, 0, 0, 0, 0},
      {1, 0, 0, -1, 0, 0, 1, -1, 1, -1, 0, 0, 1, -1},
      {0, 1, 0, 0, -1, 0, 0, 0, -1, 1, 1, -1, -1, 1},
      {0, 0, 1, 0, 0, -1, 1, -1, 0, 0, -1, 1, 1, -1}};
  std::vector<IntVector> out;
  for (int c = 0; c < 14; ++c) {
    std::vector<int> d(6);
    for (int r = 0; r < 6; ++r) d[static_cast<std::size_t>(r)] = cols[r][c];
    out.push_back(IntVector::from_dense(d));
  }
  return out;
}

std::set<IntVector> canonical_set(std::span<const IntVector> xs) {
  std::set<IntVector> out;
  for (const auto& x : xs) out.insert(x.canonical());
  return out;
}

bool dense_conformal(const std::vector<int>& x, const std::vector<int>& y) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] * y[i] < 0 || std::abs(x[i]) > std::abs(y[i])) return false;
  return true;
}

TEST(Conformal, DefinitionExamples) {
  EXPECT_TRUE(is_conformal(v({1, 0, -1}), v({2, 0, -1})));
  EXPECT_FALSE(is_conformal(v({1, 0}), v({-1, 0})));
  EXPECT_TRUE(is_conformal(v({0, 0, 0}), v({3, -2, 0})));
  EXPECT_FALSE(is_conformal(v({2, 0, -1}), v({1, 0, -1})));
  EXPECT_THROW(is_conformal(v({1, 0}), v({1, 0, 0})), std::invalid_argument);
}

TEST(Conformal, MatchesDenseDefinition) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> entry(-2, 2);
  for (int t = 0; t < 2000; ++t) {
    std::vector<int> x(5), y(5);
    for (auto& e : x) e = entry(rng);
    for (auto& e : y) e = entry(rng);
    EXPECT_EQ(is_conformal(IntVector::from_dense(x), IntVector::from_dense(y)), dense_conformal(x, y));
  }
}

TEST(IntVector, ArithmeticAndOrder) {
  EXPECT_EQ(v({1, -1, 0}) + v({0, 1, 2}), v({1, 0, 2}));
  EXPECT_EQ(v({0, -2, 1}).canonical(), v({0, 2, -1}));
  EXPECT_EQ(v({1, 0, -1}).norm1(), 2);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> entry(-2, 2);
  for (int t = 0; t < 2000; ++t) {
    std::vector<int> x(4), y(4);
    for (auto& e : x) e = entry(rng);
    for (auto& e : y) e = entry(rng);
    EXPECT_EQ(IntVector::from_dense(x) < IntVector::from_dense(y), x < y);
  }
  EXPECT_EQ(v({1, 2}).embed(2, 5), v({0, 0, 1, 2, 0}));
}

TEST(Lattice, N4DifferencesMatchReferenceKernel) {
  const auto feasible = n4_feasible();
  const auto A = n4_a_fr();
  for (const auto& x : feasible) {
    const auto d = x.dense();
    for (std::size_t r = 0; r < A.size(); ++r) {
      int dot = 0;
      for (std::size_t i = 0; i < 6; ++i) dot += A[r][i] * d[i];
      EXPECT_EQ(dot, r == 0 ? 1 : 0);
    }
  }
  const auto diffs = lattice_from_differences(feasible);
  EXPECT_EQ(diffs.size(), 6u);
  const auto reference = n4_reference_kernel();
  EXPECT_EQ(canonical_set(diffs), canonical_set(reference));
  const GraverSet kernel(6, diffs);
  EXPECT_TRUE(kernel.in_kernel(n4_a_fr()));
}

TEST(Lattice, DegenerateCounts) {
  const std::vector<IntVector> same{v({1, 0, 1}), v({1, 0, 1})};
  EXPECT_TRUE(lattice_from_differences(same).empty());
  const std::vector<IntVector> three{v({0, 0, 0}), v({1, 0, 0}), v({0, 1, 0})};
  EXPECT_EQ(lattice_from_differences(three).size(), 3u);
  for (const auto& d : lattice_from_differences(three)) EXPECT_EQ(d, d.canonical());
}

TEST(ConformalFilter, Examples) {
  const auto kept = conformal_filter(6, n4_reference_kernel());
  EXPECT_EQ(kept.size(), 6u);
  const auto small = conformal_filter(2, {v({1, 1}), v({1, 0}), v({0, 1})});
  EXPECT_EQ(canonical_set(small.vectors()), (std::set<IntVector>{v({1, 0}), v({0, 1})}));
  // Sign does not protect a dominated vector.
  const auto signed_set = conformal_filter(2, {v({1, -1}), v({-1, 0})});
  EXPECT_EQ(signed_set.vectors(), std::vector<IntVector>{v({1, 0})});
}

TEST(ConformalFilter, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> entry(-2, 2);
  for (int t = 0; t < 200; ++t) {
    std::set<IntVector> pool;
    while (pool.size() < 12) {
      std::vector<int> d(4);
      for (auto& e : d) e = entry(rng);
      auto x = IntVector::from_dense(d);
      if (!x.is_zero()) pool.insert(x.canonical());
    }
    std::set<IntVector> expected;
    for (const auto& x : pool) {
      bool dominated = false;
      for (const auto& y : pool)
        if (y != x && (dense_conformal(y.dense(), x.dense()) || dense_conformal((-y).dense(), x.dense())))
          dominated = true;
      if (!dominated) expected.insert(x);
    }
    const auto got = conformal_filter(4, {pool.begin(), pool.end()});
    EXPECT_EQ(std::set<IntVector>(got.begin(), got.end()), expected);
    for (std::size_t i = 0; i < got.size(); ++i)
      for (std::size_t j = 0; j < got.size(); ++j)
        if (i != j) {
          EXPECT_FALSE(is_conformal(got[i], got[j]));
          EXPECT_FALSE(is_conformal(-got[i], got[j]));
        }
  }
}

TEST(ScanOrder, N4PartialBasis) {
  const auto basis = conformal_filter(6, lattice_from_differences(n4_feasible()));
  const std::vector<IntVector> expected{v({1, 0, -1, 0, 1, 0}), v({1, -1, 0, 1, 0, 0}),
                                        v({0, 1, -1, 0, 0, 1}), v({0, 0, 0, 1, -1, 1}),
                                        v({1, 0, -1, 1, 0, 1}), v({1, -1, 0, 0, 1, -1})};
  EXPECT_EQ(basis.vectors(), expected);
}

TEST(Pottier, N4MatchesReferenceGraverBasis) {
  // The balance system of the N4 fixture is A_FR.
  const auto net = testing::load_n4();
  const auto system = balance_system(net, 0);
  EXPECT_EQ(system.matrix, n4_a_fr());

  const auto full = pottier_graver(n4_a_fr(), 6);
  const auto both = full.with_negatives();
  EXPECT_EQ(both.size(), 14u);
  const auto reference = n4_reference_graver();
  EXPECT_EQ(std::set<IntVector>(both.begin(), both.end()),
            std::set<IntVector>(reference.begin(), reference.end()));
}

TEST(Pottier, SingleRowExamples) {
  EXPECT_EQ(pottier_graver({{1, -1}}, 2).vectors(), std::vector<IntVector>{v({1, 1})});
  EXPECT_EQ(pottier_graver({{1, 1}}, 2).vectors(), std::vector<IntVector>{v({1, -1})});
  EXPECT_EQ(pottier_graver({{1, 1}}, 2).with_negatives().size(), 2u);
}

TEST(Pottier, SizeGuard) {
  IntMatrix wide{std::vector<int>(13, 1)};
  EXPECT_THROW(pottier_graver(wide, 13), SizeLimitExceeded);
}

TEST(Pottier, PartialIsSubsetOfFull) {
  const auto full = pottier_graver(n4_a_fr(), 6);
  const std::set<IntVector> full_set(full.begin(), full.end());
  const auto partial = conformal_filter(6, lattice_from_differences(n4_feasible()));
  for (const auto& g : partial) EXPECT_TRUE(full_set.count(g)) << "missing partial vector";
  // Filtering true Graver elements keeps exactly those elements.
  std::vector<IntVector> pool(full.begin(), full.begin() + 4);
  EXPECT_EQ(conformal_filter(6, pool).vectors(), GraverSet(6, pool).vectors());
}

// Graver elements inside a box are exactly the box's minimal kernel vectors.
TEST(Pottier, MatchesBoxEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-2, 2);
  const int box = 3;
  for (int t = 0; t < 12; ++t) {
    const std::size_t cols = 4;
    IntMatrix A(t % 2 ? 1 : 2, std::vector<int>(cols));
    for (auto& row : A)
      for (auto& e : row) e = entry(rng);
    std::vector<std::vector<int>> kernel;
    std::vector<int> x(cols, -box);
    while (true) {
      bool zero = std::all_of(x.begin(), x.end(), [](int e) { return e == 0; });
      bool in_kernel = true;
      for (const auto& row : A) {
        int dot = 0;
        for (std::size_t i = 0; i < cols; ++i) dot += row[i] * x[i];
        in_kernel = in_kernel && dot == 0;
      }
      if (!zero && in_kernel) kernel.push_back(x);
      std::size_t i = 0;
      while (i < cols && x[i] == box) x[i++] = -box;
      if (i == cols) break;
      ++x[i];
    }
    std::set<IntVector> expected;
    for (const auto& g : kernel) {
      const bool dominated = std::any_of(kernel.begin(), kernel.end(), [&](const auto& h) {
        return h != g && dense_conformal(h, g);
      });
      if (!dominated) expected.insert(IntVector::from_dense(g).canonical());
    }
    const auto full = pottier_graver(A, cols);
    EXPECT_TRUE(full.in_kernel(A));
    std::set<IntVector> in_box;
    for (const auto& g : full) {
      const auto d = g.dense();
      if (std::all_of(d.begin(), d.end(), [&](int e) { return std::abs(e) <= box; })) in_box.insert(g);
    }
    EXPECT_EQ(in_box, expected) << "trial " << t;
  }
}

TEST(KernelBasis, SpansKernel) {
  const auto basis = integer_kernel_basis(n4_a_fr(), 6);
  EXPECT_EQ(basis.size(), 3u);
  EXPECT_TRUE(GraverSet(6, basis).in_kernel(n4_a_fr()));
}

TEST(Augment, N4FirstStep) {
  const auto net = testing::load_n4();
  auto objective = [&](std::span<const int> y) -> std::optional<double> {
    std::vector<std::uint8_t> reserved(y.begin(), y.end());
    FrDesign design(6, 1);
    for (ArcId a = 0; a < 6; ++a) design.set_target_arc(0, a, y[static_cast<std::size_t>(a)] != 0);
    if (!design.is_feasible(net)) return std::nullopt;
    return solve_ue(apply_reservation(net, reserved)).total_time;
  };
  const std::vector<int> seed{0, 0, 1, 0, 0, 0};
  const double seed_value = *objective(seed);
  EXPECT_NEAR(seed_value, 507.56, 0.01 * 507.56);

  const auto step = try_step(seed, seed_value, v({1, 0, -1, 0, 1, 0}), 1, 0, 1, objective);
  EXPECT_EQ(step.outcome, StepOutcome::Improved);
  EXPECT_EQ(step.point, (std::vector<int>{1, 0, 0, 0, 1, 0}));
  EXPECT_NEAR(*step.value, 243.43, 0.01 * 243.43);
  EXPECT_EQ(augment(seed, seed_value, v({1, 0, -1, 0, 1, 0}), 0, 1, objective),
            (std::vector<int>{1, 0, 0, 0, 1, 0}));

  // g0 leaves the binary box.
  EXPECT_EQ(try_step(seed, seed_value, v({1, -1, 0, 1, 0, 0}), 1, 0, 1, objective).outcome,
            StepOutcome::Infeasible);
  EXPECT_FALSE(augment(seed, seed_value, v({1, -1, 0, 1, 0, 0}), 0, 1, objective));
}

TEST(Augment, StrictImprovementOnly) {
  auto flat = [](std::span<const int>) -> std::optional<double> { return 5.0; };
  const std::vector<int> x{1, 0};
  EXPECT_EQ(try_step(x, 5.0, v({-1, 1}), 1, 0, std::nullopt, flat).outcome, StepOutcome::NotImproving);
  EXPECT_FALSE(augment(x, 5.0, v({-1, 1}), 0, std::nullopt, flat));
  // Flows have no upper bound.
  auto decreasing = [](std::span<const int> y) -> std::optional<double> { return -y[1]; };
  EXPECT_EQ(augment(std::vector<int>{3, 7}, -7.0, v({-1, 1}), 0, std::nullopt, decreasing),
            (std::vector<int>{2, 8}));
}

TEST(Serialization, RoundTrip) {
  const auto full = pottier_graver(n4_a_fr(), 6);
  const auto file = std::filesystem::temp_directory_path() / "frndp_graver.txt";
  save_graver(full, file);
  const auto loaded = load_graver(file);
  EXPECT_EQ(loaded.vectors(), full.vectors());
  EXPECT_EQ(loaded.dim(), 6u);
  std::filesystem::remove(file);
}

}  // namespace
}  // namespace frndp
