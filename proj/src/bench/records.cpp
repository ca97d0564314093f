#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cakewalk/bench.hpp"
#include "cakewalk/kmedoids.hpp"
#include "cakewalk/optimizer.hpp"
#include "cakewalk/surrogate.hpp"

namespace cakewalk::bench {

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

RunConfig sampler_config(const ExperimentSpec& spec, const Cell& cell, std::size_t budget, std::uint64_t seed) {
  RunConfig config;
  config.budget = budget;
  config.rule = parse_update_rule(cell.rule);
  config.constants.step_size = spec.step_size;
  config.window = spec.window;
  config.seed = seed;
  config.exp3_gamma = spec.exp3_gamma;
  return config;
}

Json clique_cell(const ExperimentSpec& spec, const Cell& cell, std::uint64_t seed, Json& config_part) {
  const auto parsed = clique::parse_dimacs_file(cell.input);
  const clique::Graph& g = parsed.graph;
  const auto budget = static_cast<std::size_t>(std::ceil(spec.budget_multiplier * g.vertex_count()));
  RunConfig config = sampler_config(spec, cell, std::max<std::size_t>(budget, 1), seed);
  if (spec.convergence) {
    config.convergence = EmaSettings{std::max(1000.0, static_cast<double>(g.vertex_count())), 0.01, 0.01};
  }
  config_part["budget"] = config.budget;
  config_part["window"] = config.window;
  config_part["step_size"] = config.constants.step_size;
  if (cell.sampler == "exp3") config_part["exp3_gamma"] = config.exp3_gamma;

  const double kappa = cell.kappa;
  const Objective f = [&g, kappa](const Solution& x) { return clique::soft_clique_size(x, g, kappa); };
  RunResult result;
  if (cell.sampler == "exp3") {
    result = exp3_run(f, 2, g.vertex_count(), config);
  } else {
    config.surrogate = SurrogateKind::parse(cell.sampler);
    result = cakewalk_run(f, SoftmaxPolicy<double>(2, g.vertex_count()), config);
  }
  Json out;
  out["n"] = g.vertex_count();
  out["best_y"] = result.best_y;
  out["best_sample_index"] = result.best_sample_index;
  out["total_evaluations"] = result.total_evaluations;
  out["converged"] = result.converged;
  std::vector<int> one_based;
  for (int v : clique::members(result.best_x)) one_based.push_back(v + 1);
  out["best_x"] = one_based;
  out["self_loops_dropped"] = parsed.self_loops_dropped;
  return out;
}

kmedoids::DistanceMatrix load_distances(const ExperimentSpec& spec, const std::string& path) {
  if (spec.input_kind == "distances") return kmedoids::load_distance_csv(path);
  const auto table = kmedoids::load_numeric_csv(path);
  if (table.data.cols() == 0) throw kmedoids::IngestionError(path + ": no numeric columns");
  return kmedoids::mahalanobis_diag(table.data);
}

Json kmedoids_cell(const ExperimentSpec& spec, const Cell& cell, std::uint64_t seed, Json& config_part) {
  const kmedoids::DistanceMatrix dm = load_distances(spec, cell.input);
  const Eigen::Index m = dm.size();
  const Eigen::Index k = spec.clusters;
  if (k > m) throw std::runtime_error("clusters exceed the number of points");
  config_part["clusters"] = k;

  Json out;
  out["n"] = m;
  auto to_json = [](const Solution& s) { return Json(s.categories); };
  if (cell.sampler == "vor" || cell.sampler == "pam") {
    // Both greedy baselines start from the same draw for a given replicate.
    Rng rng(derive_seed(spec.master_seed, cell.instance + "|start|" + std::to_string(cell.replicate)));
    const Solution start = kmedoids::random_distinct_medoids(m, k, rng);
    const auto r = cell.sampler == "vor" ? kmedoids::voronoi_iteration(start, dm) : kmedoids::pam(start, dm);
    out["objective"] = r.objective;
    out["evaluations"] = r.evaluations;
    out["inner_evaluations"] = r.evaluations;
    out["best_x"] = to_json(r.medoids);
    out["start"] = to_json(start);
    return out;
  }

  RunConfig config = sampler_config(spec, cell, spec.budget, seed);
  if (spec.convergence) {
    config.convergence = EmaSettings{std::max(static_cast<double>(m * k), 1000.0), 0.01, 0.01};
  }
  config_part["budget"] = config.budget;
  config_part["window"] = config.window;
  config_part["step_size"] = config.constants.step_size;
  config_part["convergence"] = spec.convergence;

  std::size_t inner = 0;
  Objective f;
  if (cell.sampler == "cw") {
    f = [&dm, &inner](const Solution& x) {
      ++inner;
      return -kmedoids::kmedoids_objective(x, dm);
    };
  } else {
    f = [&dm, &inner](const Solution& x) {
      const auto r = kmedoids::voronoi_iteration(x, dm);
      inner += r.evaluations;
      return -r.objective;
    };
  }
  const RunResult result = cakewalk_run(f, SoftmaxPolicy<double>(m, k), config);
  Solution best = result.best_x;
  if (cell.sampler == "cwv") best = kmedoids::voronoi_iteration(best, dm).medoids;
  out["objective"] = -result.best_y;
  out["evaluations"] = result.total_evaluations;
  out["inner_evaluations"] = inner;
  out["best_sample_index"] = result.best_sample_index;
  out["converged"] = result.converged;
  out["best_x"] = to_json(best);
  return out;
}

}  // namespace

Json run_cell(const ExperimentSpec& spec, const Cell& cell) {
  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t seed = derive_seed(spec.master_seed, cell.key());

  Json config_part;
  config_part["problem"] = spec.problem == Problem::Clique ? "clique" : "kmedoids";
  config_part["instance"] = cell.instance;
  config_part["sampler"] = cell.sampler;
  config_part["update_rule"] = cell.rule;
  config_part["replicate"] = cell.replicate;
  config_part["seed"] = seed;
  config_part["version"] = kVersion;
  if (spec.problem == Problem::Clique) config_part["kappa"] = cell.kappa;

  Json results = spec.problem == Problem::Clique ? clique_cell(spec, cell, seed, config_part)
                                                 : kmedoids_cell(spec, cell, seed, config_part);

  Json record = config_part;
  record["config_hash"] = hex(fnv1a64(config_part.dump()));
  record.update(results);
  record["key"] = cell.key();
  record["input"] = cell.input;
  record["status"] = "ok";
  record["wall_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return record;
}

std::vector<Json> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records " + path);
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    out.push_back(std::move(j));
  }
  return out;
}

Json strip_timing(Json record) {
  record.erase("wall_ms");
  return record;
}

}  // namespace cakewalk::bench
