#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cakewalk/clique.hpp"
#include "cakewalk/grad_update.hpp"
#include "cakewalk/stats.hpp"

namespace cakewalk::bench {

using Json = nlohmann::json;

inline constexpr const char* kVersion = CAKEWALK_VERSION;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Problem { Clique, KMedoids };

// Sweep description read from a key = value file:
//
//   problem = "clique"
//   inputs = ["graphs/"]          # files or directories (*.clq / *.csv)
//   samplers = ["scaled_cdf", "raw", "exp3"]
//   rules = ["adagrad", "sga"]
//   kappas = [0.0, 0.5, 1.0]
//   replicates = 3
struct ExperimentSpec {
  Problem problem = Problem::Clique;
  std::vector<std::string> inputs;
  // kmedoids: "data" (numeric CSV with header) or "distances" (headerless matrix)
  std::string input_kind = "data";
  std::vector<std::string> samplers;
  std::vector<UpdateRule> rules{UpdateRule::AdaGrad};
  std::vector<double> kappas{0.0};
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  double budget_multiplier = 100.0;  // clique: evaluations = multiplier * |V|
  std::size_t budget = 20000;        // kmedoids: evaluation cap for cw / cwv
  std::size_t window = 100;
  double step_size = 0.01;
  double exp3_gamma = 0.1;
  bool convergence = false;
  int clusters = 10;
  std::string best_known;              // clique-eval: CSV graph_id,best_known
  std::string pairing = "cell";        // clique-eval: pairing for the local-optimality table
  std::string reference = "scaled_cdf";
  std::string output;

  // Inputs with directories expanded, sorted.
  std::vector<std::string> resolved_inputs() const;
};

ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config(const std::string& path);

struct Cell {
  std::size_t index = 0;
  std::string input;
  std::string instance;
  std::string sampler;
  std::string rule;  // "none" for vor / pam
  double kappa = 0.0;
  std::size_t replicate = 0;

  std::string key() const;
};

std::vector<Cell> enumerate_cells(const ExperimentSpec& spec);
std::uint64_t derive_seed(std::uint64_t master, const std::string& label);
std::string instance_id(const std::string& path);

// Runs one cell and returns its record. Throws on unreadable input.
Json run_cell(const ExperimentSpec& spec, const Cell& cell);

struct SweepOptions {
  std::size_t jobs = 1;
  std::ostream* log = nullptr;
  std::function<void(const Cell&)> on_execute;  // called before each executed cell
};

struct SweepSummary {
  std::size_t cells = 0;
  std::size_t reused = 0;
  std::size_t executed = 0;
  std::size_t failed = 0;
};

// Executes every missing cell, appending one JSON line per cell to
// spec.output, then rewrites the file in cell order.
SweepSummary run_sweep(const ExperimentSpec& spec, const SweepOptions& options = {});

std::vector<Json> read_records(const std::string& path);
// Removes wall-clock fields.
Json strip_timing(Json record);

struct MetricRow {
  std::string rule;
  std::string sampler;
  std::optional<double> value;  // empty when the method is excluded
  std::optional<double> p_value;
  bool significant = false;
};

struct MetricTable {
  std::string name;
  std::vector<MetricRow> rows;
  const MetricRow* find(const std::string& rule, const std::string& sampler) const;
};

struct CliqueTables {
  MetricTable local_optimality;
  MetricTable inclusion_maximal;
  MetricTable best_sample_ratio;
  MetricTable clique_size_ratio;
  std::vector<std::string> warnings;
};

struct CliqueEvalOptions {
  std::string reference = "scaled_cdf";
  std::string pairing = "cell";  // "cell" or "graph"
  double fdr_level = 0.01;
};

std::map<std::string, double> load_best_known(const std::string& path);

CliqueTables evaluate_clique_results(const std::vector<Json>& records,
                                     const std::map<std::string, clique::Graph>& graphs,
                                     const std::map<std::string, double>& best_known,
                                     const CliqueEvalOptions& options = {});

struct KMedoidsTables {
  stats::RankingTable objective;
  stats::RankingTable evaluations;
  stats::RankingTable inner_evaluations;
  std::vector<std::string> warnings;
};

KMedoidsTables evaluate_kmedoids_results(const std::vector<Json>& records, double fdr_level = 0.01);

void write_metric_csv(std::ostream& out, const MetricTable& table);
void write_ranking_csv(std::ostream& out, const std::string& criterion, const stats::RankingTable& table);

}  // namespace cakewalk::bench
