#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "frndp/error.hpp"
#include "frndp/experiment.hpp"
#include "support.hpp"

namespace frndp {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("frndp_exp_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExperimentSpec n4_spec(SolverKind solver) const {
    ExperimentSpec spec;
    spec.instance_file = fs::path(FRNDP_DATA_DIR) / "n4.json";
    spec.solver = solver;
    spec.out_dir = dir_;
    return spec;
  }

  fs::path dir_;
};

const char* kHeader =
    "instance,solver,setting,objective_gaga_only,objective_final,time_paths_s,time_graver_s,"
    "time_walk_s,time_leblanc_s,seeds_completed";

TEST_F(ExperimentTest, EnumerateN4WritesTheDesignTable) {
  const auto rows = run_experiment(n4_spec(SolverKind::Enumerate));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].objective_final, 243.43, 0.01 * 243.43);
  const auto results = lines(dir_ / "results.csv");
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0], kHeader);
  const auto designs = lines(dir_ / "designs.csv");
  ASSERT_EQ(designs.size(), 5u);
  EXPECT_EQ(designs[1].substr(0, 6), "1,0-3,");
  EXPECT_EQ(designs[2].substr(0, 10), "2,0-1;1-3,");
  EXPECT_TRUE(fs::exists(dir_ / "config.json"));
}

TEST_F(ExperimentTest, GagaN4SingleSeed) {
  auto spec = n4_spec(SolverKind::Gaga);
  spec.gaga.n_samples = 1000;
  spec.gaga.M = 1;
  const auto rows = run_experiment(spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].setting, "Unnormalized");
  EXPECT_NEAR(rows[0].objective_final, 243.43, 0.01 * 243.43);
  ASSERT_TRUE(rows[0].objective_gaga_only);
  ASSERT_TRUE(rows[0].seeds_completed);
  EXPECT_EQ(*rows[0].seeds_completed, 1u);
  EXPECT_TRUE(fs::exists(dir_ / "walk_unnormalized.csv"));
  EXPECT_EQ(lines(dir_ / "seeds_unnormalized.csv").size(), 2u);
}

TEST_F(ExperimentTest, AllSettingsUseTheTableNames) {
  auto spec = n4_spec(SolverKind::Gaga);
  spec.gaga.backend = PathBackend::Yens;
  spec.gaga.n_paths = 4;
  spec.gaga.M = 2;
  spec.all_settings = true;
  spec.path_cache = dir_ / "paths.json";
  const auto rows = run_experiment(spec);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].setting, "Unnormalized");
  EXPECT_EQ(rows[1].setting, "Unnormalized, Tol = 1e-3");
  EXPECT_EQ(rows[2].setting, "Normalized");
  EXPECT_EQ(rows[3].setting, "Normalized, Tol=1e-3");
  EXPECT_TRUE(fs::exists(dir_ / "paths.json"));
  EXPECT_TRUE(fs::exists(dir_ / "walk_normalized_tol_1e_3.csv"));
  const auto results = lines(dir_ / "results.csv");
  ASSERT_EQ(results.size(), 5u);
  EXPECT_NE(results[2].find("\"Unnormalized, Tol = 1e-3\""), std::string::npos);
  // Second run reads the cache written by the first.
  EXPECT_NO_THROW(run_experiment(spec));
}

// Property: a fixed spec and rng_seed give byte-identical outputs.
TEST_F(ExperimentTest, RerunIsByteIdenticalWithoutTimings) {
  auto spec = n4_spec(SolverKind::Gaga);
  spec.instance_file.reset();
  spec.generator.n = 6;
  spec.generator.p = 0.5;
  spec.generator.seed = 3;
  spec.generator.fr_count = 2;
  spec.gaga.n_samples = 200;
  spec.gaga.n_paths = 5;
  spec.gaga.M = 3;
  spec.gaga.rng_seed = 11;
  spec.include_timings = false;
  spec.out_dir = dir_ / "a";
  run_experiment(spec);
  spec.out_dir = dir_ / "b";
  run_experiment(spec);
  for (const char* name : {"results.csv", "walk_unnormalized.csv", "seeds_unnormalized.csv"}) {
    const auto a = slurp(dir_ / "a" / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(dir_ / "b" / name)) << name;
  }
}

TEST_F(ExperimentTest, BnbAndBaselineRows) {
  auto rows = run_experiment(n4_spec(SolverKind::Bnb));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].setting, "exhausted");
  EXPECT_NEAR(rows[0].objective_final, 243.43, 0.01 * 243.43);
  EXPECT_GE(lines(dir_ / "incumbent_trace.csv").size(), 2u);

  rows = run_experiment(n4_spec(SolverKind::UeOnly));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(lines(dir_ / "flows.csv").size(), 7u);
  // Nothing reserved: never worse than the best design.
  EXPECT_LT(rows[0].objective_final, 243.43);
}

TEST_F(ExperimentTest, Errors) {
  auto spec = n4_spec(SolverKind::Enumerate);
  spec.instance_file = dir_ / "missing.json";
  EXPECT_THROW(run_experiment(spec), Error);
  EXPECT_THROW(parse_solver("simplex"), std::invalid_argument);
  EXPECT_THROW(parse_backend("dwave"), std::invalid_argument);
  EXPECT_EQ(parse_solver("ue-only"), SolverKind::UeOnly);
}

TEST(ResultsCsv, OmittedTimingsLeaveEmptyColumns) {
  ResultRow row;
  row.instance = "x";
  row.solver = "gaga";
  row.setting = "Normalized";
  row.objective_gaga_only = 2.5;
  row.objective_final = 2.0;
  row.time_paths_s = 1.0;
  row.time_walk_s = 3.0;
  row.seeds_completed = 4;
  const auto file = fs::temp_directory_path() / "frndp_results_row.csv";
  write_results_csv({row}, file, false);
  EXPECT_EQ(lines(file)[1], "x,gaga,\"Normalized\",2.5,2,,,,,4");
  write_results_csv({row}, file, true);
  EXPECT_EQ(lines(file)[1], "x,gaga,\"Normalized\",2.5,2,1,,3,,4");
  fs::remove(file);
}

TEST(DesignLabel, ListsReservedLanes) {
  const auto net = testing::load_n4();
  const std::vector<Path> route{{0, 3, 5}};
  EXPECT_EQ(design_label(net, FrDesign::from_paths(net, route)), "0-1;1-2;2-3");
}

}  // namespace
}  // namespace frndp
