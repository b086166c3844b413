#include "frndp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

#include "frndp/enumerate.hpp"
#include "frndp/error.hpp"
#include "frndp/instance_io.hpp"

namespace frndp {

namespace {

using Clock = std::chrono::steady_clock;

ResultRow make_row(std::string instance, std::string solver, std::string setting,
                   std::optional<double> gaga_only, double objective) {
  ResultRow row;
  row.instance = std::move(instance);
  row.solver = std::move(solver);
  row.setting = std::move(setting);
  row.objective_gaga_only = gaga_only;
  row.objective_final = objective;
  return row;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

std::string slug(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(c));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

std::string instance_label(const ExperimentSpec& spec) {
  if (spec.instance_file) return spec.instance_file->stem().string();
  std::ostringstream out;
  out << "random_n" << spec.generator.n << "_p" << spec.generator.p << "_s" << spec.generator.seed;
  return out.str();
}

std::vector<GagaConfig> gaga_settings(const ExperimentSpec& spec) {
  GagaConfig base = spec.gaga;
  base.ue = spec.ue;
  if (!spec.all_settings) return {base};
  std::vector<GagaConfig> out;
  for (bool normalized : {false, true})
    for (bool tol : {false, true}) {
      GagaConfig c = base;
      c.normalized = normalized;
      c.inner_tolerance = tol ? std::optional<double>(spec.gaga.inner_tolerance.value_or(1e-3))
                              : std::nullopt;
      out.push_back(c);
    }
  return out;
}

void write_seed_table(const RoadNetwork& net, const GagaResult& r, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << "seed,completed,accepted_steps,evaluations,objective_gaga,objective_refined,design\n";
  for (std::size_t s = 0; s < r.seeds.size(); ++s) {
    const auto& o = r.seeds[s];
    out << s << ',' << (o.walk.completed ? 1 : 0) << ',' << o.walk.accepted_steps << ','
        << o.walk.evaluations << ',' << (o.walk.seed_feasible ? fmt(o.walk.objective / r.scale) : "")
        << ',' << (o.refined ? fmt(*o.refined) : "") << ',' << design_label(net, o.walk.design)
        << '\n';
  }
}

ResultRow run_gaga_setting(const RoadNetwork& net, const ExperimentSpec& spec,
                           const GagaConfig& config, std::optional<PathCache>& cache) {
  GagaInputs inputs;
  inputs.paths = cache;
  const auto r = run_gaga(net, config, inputs);
  if (!cache) {
    cache = r.paths;
    if (spec.path_cache) save_path_cache(r.paths, *spec.path_cache);
  }
  const std::string setting = setting_name(config);
  MultiSeedResult walks;
  for (const auto& s : r.seeds) walks.per_seed.push_back(s.walk);
  write_progress_csv(walks, spec.out_dir / ("walk_" + slug(setting) + ".csv"), spec.include_timings);
  write_seed_table(net, r, spec.out_dir / ("seeds_" + slug(setting) + ".csv"));

  auto row = make_row(instance_label(spec), "gaga", setting, r.gaga_only_objective, r.objective);
  row.time_paths_s = r.times.paths;
  row.time_graver_s = r.times.graver;
  row.time_walk_s = r.times.walk;
  row.time_leblanc_s = r.times.leblanc;
  row.seeds_completed = r.seeds_completed;
  return row;
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
  if (name == "gaga") return SolverKind::Gaga;
  if (name == "bnb") return SolverKind::Bnb;
  if (name == "enumerate") return SolverKind::Enumerate;
  if (name == "ue-only") return SolverKind::UeOnly;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

std::string to_string(SolverKind solver) {
  switch (solver) {
    case SolverKind::Gaga: return "gaga";
    case SolverKind::Bnb: return "bnb";
    case SolverKind::Enumerate: return "enumerate";
    case SolverKind::UeOnly: return "ue-only";
  }
  return "unknown";
}

PathBackend parse_backend(const std::string& name) {
  if (name == "sa") return PathBackend::SimulatedAnnealing;
  if (name == "yens") return PathBackend::Yens;
  throw std::invalid_argument("unknown path backend '" + name + "'");
}

std::string to_string(PathBackend backend) {
  return backend == PathBackend::Yens ? "yens" : "sa";
}

std::string design_label(const RoadNetwork& net, const FrDesign& design) {
  std::string out;
  for (std::size_t a = 0; a < design.num_arcs(); ++a) {
    if (!design.reserved()[a]) continue;
    const auto& arc = net.arc(static_cast<ArcId>(a));
    if (!out.empty()) out += ';';
    out += std::to_string(arc.from) + '-' + std::to_string(arc.to);
  }
  return out;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& file,
                       bool include_timings) {
  auto out = open_out(file);
  out << "instance,solver,setting,objective_gaga_only,objective_final,time_paths_s,"
         "time_graver_s,time_walk_s,time_leblanc_s,seeds_completed\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  auto timing = [&](const std::optional<double>& v) {
    return include_timings ? opt(v) : std::string();
  };
  for (const auto& r : rows) {
    out << r.instance << ',' << r.solver << ",\"" << r.setting << "\"," << opt(r.objective_gaga_only)
        << ',' << fmt(r.objective_final) << ',' << timing(r.time_paths_s) << ','
        << timing(r.time_graver_s) << ',' << timing(r.time_walk_s) << ','
        << timing(r.time_leblanc_s) << ','
        << (r.seeds_completed ? std::to_string(*r.seeds_completed) : "") << '\n';
  }
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  if (spec.instance_file) {
    j["instance"] = spec.instance_file->string();
  } else {
    j["generator"] = {{"n", spec.generator.n},
                      {"p", spec.generator.p},
                      {"seed", spec.generator.seed},
                      {"fr_count", spec.generator.fr_count ? nlohmann::json(*spec.generator.fr_count)
                                                           : nlohmann::json(nullptr)}};
  }
  j["solver"] = to_string(spec.solver);
  const auto& g = spec.gaga;
  j["gaga"] = {{"n_paths", g.n_paths},
               {"n_samples", g.n_samples},
               {"M", g.M},
               {"inner_tolerance", g.inner_tolerance ? nlohmann::json(*g.inner_tolerance)
                                                     : nlohmann::json(nullptr)},
               {"normalized", g.normalized},
               {"all_settings", spec.all_settings},
               {"path_backend", to_string(g.backend)},
               {"rng_seed", g.rng_seed},
               {"time_budget", g.time_budget ? nlohmann::json(*g.time_budget) : nlohmann::json(nullptr)},
               {"sweeps", g.schedule.sweeps},
               {"forbid_cycles", g.forbid_cycles}};
  j["bnb"] = {{"time_limit", spec.bnb.time_limit}, {"use_bounds", spec.bnb.use_bounds}};
  j["ue"] = {{"rel_tol", spec.ue.rel_tol},
             {"gap_tol", spec.ue.gap_tol ? nlohmann::json(*spec.ue.gap_tol) : nlohmann::json(nullptr)}};
  j["enumerate_cap"] = spec.enumerate_cap;
  j["path_cache"] = spec.path_cache ? nlohmann::json(spec.path_cache->string()) : nlohmann::json(nullptr);
  return j;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  const RoadNetwork net = spec.instance_file ? load_instance(*spec.instance_file)
                                             : generate_random_instance(spec.generator);
  std::filesystem::create_directories(spec.out_dir);
  open_out(spec.out_dir / "config.json") << spec_to_json(spec).dump(2) << '\n';

  std::vector<ResultRow> rows;
  const std::string label = instance_label(spec);
  switch (spec.solver) {
    case SolverKind::Gaga: {
      std::optional<PathCache> cache;
      if (spec.path_cache && std::filesystem::exists(*spec.path_cache))
        cache = load_path_cache(*spec.path_cache);
      for (const auto& config : gaga_settings(spec))
        rows.push_back(run_gaga_setting(net, spec, config, cache));
      break;
    }
    case SolverKind::Bnb: {
      BnbOptions options = spec.bnb;
      options.ue = spec.ue;
      const auto r = bnb_solve(net, options);
      write_incumbent_csv(r, spec.out_dir / "incumbent_trace.csv", spec.include_timings);
      if (!r.incumbent) throw InfeasibleParameters("branch and bound found no incumbent");
      auto row = make_row(label, "bnb", r.proven_optimal ? "proven" : (r.exhausted ? "exhausted" : "time_limit"),
                    std::nullopt, r.objective);
      row.time_walk_s = r.wall_time;
      rows.push_back(row);
      break;
    }
    case SolverKind::Enumerate: {
      const auto start = Clock::now();
      const auto designs = enumerate_designs(net, spec.enumerate_cap, spec.ue);
      const double elapsed = seconds_since(start);
      auto out = open_out(spec.out_dir / "designs.csv");
      out << "design_id,reserved,objective\n";
      for (std::size_t i = 0; i < designs.size(); ++i)
        out << i + 1 << ',' << design_label(net, designs[i].design) << ','
            << (designs[i].objective ? fmt(*designs[i].objective) : "") << '\n';
      const auto* best = best_design(designs);
      if (!best) throw InfeasibleParameters("no design keeps every evacuee connected");
      auto row = make_row(label, "enumerate", std::to_string(designs.size()) + " designs", std::nullopt,
                    *best->objective);
      row.time_walk_s = elapsed;
      rows.push_back(row);
      break;
    }
    case SolverKind::UeOnly: {
      // Baseline without any reserved lane.
      const auto start = Clock::now();
      const EffectiveNetwork open(net);
      const auto ue = solve_ue(open, spec.ue);
      auto out = open_out(spec.out_dir / "flows.csv");
      out << "arc,from,to,flow,time\n";
      for (std::size_t a = 0; a < net.num_arcs(); ++a) {
        const auto& arc = net.arc(static_cast<ArcId>(a));
        out << a << ',' << arc.from << ',' << arc.to << ',' << fmt(ue.flows[a]) << ','
            << fmt(bpr_time(open, static_cast<ArcId>(a), ue.flows[a])) << '\n';
      }
      auto row = make_row(label, "ue-only", "no reservation", std::nullopt, ue.total_time);
      row.time_leblanc_s = seconds_since(start);
      rows.push_back(row);
      break;
    }
  }
  write_results_csv(rows, spec.out_dir / "results.csv", spec.include_timings);
  return rows;
}

}  // namespace frndp
