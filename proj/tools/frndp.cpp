// Command-line driver: instance generation and solver runs.
//
//   frndp generate --n 10 --p 0.5 --seed 7 --out inst.json
//   frndp solve gaga --instance n4.json --n-samples 1000 --m 1
//   frndp solve bnb --instance inst.json --time-limit 600
//   frndp solve enumerate --instance n4.json

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "frndp/error.hpp"
#include "frndp/experiment.hpp"
#include "frndp/instance_io.hpp"

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitNoSolution = 3;

void print_rows(const std::vector<frndp::ResultRow>& rows) {
  for (const auto& r : rows) {
    std::cout << r.solver << " [" << r.setting << "] objective " << r.objective_final;
    if (r.objective_gaga_only) std::cout << " (gaga only " << *r.objective_gaga_only << ")";
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-responder lane reservation under evacuation equilibrium"};
  app.require_subcommand(1);

  frndp::GeneratorParams gen;
  std::optional<int> fr_count;

  auto* generate = app.add_subcommand("generate", "Write a random instance");
  std::string out_file;
  generate->add_option("--n", gen.n, "Interior nodes")->required();
  generate->add_option("--p", gen.p, "Base edge probability")->required();
  generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("--fr-count", fr_count, "Nodes needing an FR path (default: all)");
  generate->add_option("--out", out_file, "Output instance file")->required();

  auto* solve = app.add_subcommand("solve", "Run a solver on an instance");
  frndp::ExperimentSpec spec;
  std::string solver, backend = "sa";
  std::string instance, path_cache;
  std::optional<double> time_limit, inner_tol, ue_gap_tol;
  solve->add_option("solver,--solver", solver, "gaga | bnb | enumerate | ue-only");
  solve->add_option("--instance", instance, "Instance JSON file");
  solve->add_option("--n", gen.n, "Generate an instance with n interior nodes instead");
  solve->add_option("--p", gen.p, "Generator edge probability");
  solve->add_option("--seed", gen.seed, "Generator seed");
  solve->add_option("--fr-count", fr_count, "Generator FR node count");
  solve->add_option("--n-paths", spec.gaga.n_paths, "Paths kept per node")->capture_default_str();
  solve->add_option("--n-samples", spec.gaga.n_samples, "Annealing samples per node")->capture_default_str();
  solve->add_option("--m", spec.gaga.M, "Seed designs")->capture_default_str();
  solve->add_option("--path-backend", backend, "sa | yens")->capture_default_str();
  solve->add_option("--inner-tol", inner_tol, "Inner walk relative tolerance");
  solve->add_flag("--normalize", spec.gaga.normalized, "Scale demands so the largest is 100");
  solve->add_flag("--all-settings", spec.all_settings, "Run all four inner settings");
  solve->add_option("--rng-seed", spec.gaga.rng_seed, "Solver RNG seed")->capture_default_str();
  solve->add_option("--time-limit", time_limit, "Seconds (GAGA budget or BnB limit)");
  solve->add_flag("--bounds", spec.bnb.use_bounds, "BnB: prune with system-optimal bounds");
  solve->add_option("--ue-rel-tol", spec.ue.rel_tol, "Frank-Wolfe relative improvement stop")
      ->capture_default_str();
  solve->add_option("--ue-gap-tol", ue_gap_tol, "Frank-Wolfe relative gap stop (replaces --ue-rel-tol)");
  solve->add_option("--enumerate-cap", spec.enumerate_cap, "Largest design count to enumerate")
      ->capture_default_str();
  solve->add_option("--path-cache", path_cache, "Path cache file (read if present, else written)");
  solve->add_option("--out-dir", spec.out_dir, "Output directory")->capture_default_str();
  bool omit_timings = false;
  solve->add_flag("--omit-timings", omit_timings, "Leave wall-clock columns empty");

  CLI11_PARSE(app, argc, argv);
  if (fr_count) gen.fr_count = fr_count;

  try {
    if (*generate) {
      frndp::save_instance(frndp::generate_random_instance(gen), out_file);
      std::cout << "wrote " << out_file << '\n';
      return 0;
    }

    if (solver.empty()) throw std::invalid_argument("no solver given");
    spec.solver = frndp::parse_solver(solver);
    spec.gaga.backend = frndp::parse_backend(backend);
    spec.gaga.inner_tolerance = inner_tol;
    spec.ue.gap_tol = ue_gap_tol;
    spec.generator = gen;
    if (!instance.empty()) spec.instance_file = instance;
    if (!path_cache.empty()) spec.path_cache = path_cache;
    if (time_limit) {
      spec.gaga.time_budget = *time_limit;
      spec.bnb.time_limit = *time_limit;
    }
    spec.include_timings = !omit_timings;
    print_rows(frndp::run_experiment(spec));
    return 0;
  } catch (const frndp::NoPathError& e) {
    std::cerr << "no solution: " << e.what() << '\n';
    return kExitNoSolution;
  } catch (const frndp::DisconnectedSource& e) {
    std::cerr << "no solution: " << e.what() << '\n';
    return kExitNoSolution;
  } catch (const frndp::InfeasibleParameters& e) {
    std::cerr << "no solution: " << e.what() << '\n';
    return kExitNoSolution;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}
