#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frndp/bnb.hpp"
#include "frndp/gaga.hpp"
#include "frndp/generator.hpp"

namespace frndp {

enum class SolverKind { Gaga, Bnb, Enumerate, UeOnly };

SolverKind parse_solver(const std::string& name);
std::string to_string(SolverKind solver);
PathBackend parse_backend(const std::string& name);
std::string to_string(PathBackend backend);

struct ExperimentSpec {
  /// Instance file; the generator parameters are used when absent.
  std::optional<std::filesystem::path> instance_file;
  GeneratorParams generator;
  SolverKind solver = SolverKind::Gaga;
  GagaConfig gaga;
  /// Run the four inner settings (normalized x tolerance) instead of one.
  bool all_settings = false;
  BnbOptions bnb;
  /// Frank-Wolfe settings for every UE solve (overrides gaga.ue and bnb.ue).
  UeOptions ue;
  std::size_t enumerate_cap = 10000;
  /// Loaded when the file exists, written after path generation otherwise.
  std::optional<std::filesystem::path> path_cache;
  std::filesystem::path out_dir = ".";
  /// Wall-clock columns are left empty when false, making outputs
  /// byte-reproducible.
  bool include_timings = true;
};

struct ResultRow {
  std::string instance;
  std::string solver;
  std::string setting;
  std::optional<double> objective_gaga_only;
  double objective_final = 0.0;
  std::optional<double> time_paths_s;
  std::optional<double> time_graver_s;
  std::optional<double> time_walk_s;
  std::optional<double> time_leblanc_s;
  std::optional<std::size_t> seeds_completed;
};

/// Loads or generates the instance, runs the solver and writes results.csv,
/// the solver's traces and config.json into out_dir. Errors propagate:
/// SchemaError / Error for unreadable inputs, NoPathError,
/// DisconnectedSource or InfeasibleParameters when no solution exists.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& file,
                       bool include_timings = true);

/// Resolved configuration, for reproducing a run.
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Reserved lanes as "i-j;k-l" in arc order.
std::string design_label(const RoadNetwork& net, const FrDesign& design);

}  // namespace frndp
