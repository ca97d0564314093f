#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "cakewalk/bench.hpp"

namespace cakewalk::bench {

const MetricRow* MetricTable::find(const std::string& rule, const std::string& sampler) const {
  for (const auto& r : rows) {
    if (r.rule == rule && r.sampler == sampler) return &r;
  }
  return nullptr;
}

std::map<std::string, double> load_best_known(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open best-known table " + path);
  std::map<std::string, double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path + ": expected graph_id,best_known");
    const std::string id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    try {
      out[id] = std::stod(value);
    } catch (const std::exception&) {
      if (!first) throw std::runtime_error(path + ": bad best-known value '" + value + "'");
    }
    first = false;
  }
  return out;
}

namespace {

struct CliqueOutcome {
  std::string instance;
  std::string sampler;
  std::string rule;
  double kappa = 0.0;
  std::size_t replicate = 0;
  bool local_optimum = false;
  bool inclusion_maximal = false;
  std::size_t size = 0;
  double best_sample_ratio = 0.0;

  std::string cell_id() const { return instance + "|" + std::to_string(kappa) + "|" + std::to_string(replicate); }
  std::string graph_id() const { return instance + "|" + std::to_string(replicate); }
};

using MethodKey = std::pair<std::string, std::string>;  // (rule, sampler)

int rule_rank(const std::string& rule) {
  if (rule == "sga") return 0;
  if (rule == "adagrad") return 1;
  if (rule == "adam") return 2;
  return 3;
}

// Paired observations keyed by cell/graph id, per method.
using Observations = std::map<MethodKey, std::map<std::string, double>>;

double mean_of(const std::map<std::string, double>& values) {
  double s = 0.0;
  for (const auto& [_, v] : values) s += v;
  return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

// Fills p-values comparing every method against the reference sampler under
// the same rule, then flags significance with Benjamini-Hochberg.
void compare_to_reference(MetricTable& table, const Observations& obs, const std::string& reference,
                          stats::Direction direction, double fdr_level) {
  std::vector<double> pvalues;
  std::vector<MetricRow*> tested;
  for (auto& row : table.rows) {
    if (row.sampler == reference || !row.value) continue;
    const MethodKey ref_key{row.rule, reference};
    const MetricRow* ref_row = table.find(row.rule, reference);
    if (!obs.contains(ref_key) || !ref_row || !ref_row->value) continue;
    const auto& ref_values = obs.at(ref_key);
    const auto& values = obs.at({row.rule, row.sampler});
    stats::PairedScores paired;
    paired.direction = direction;
    for (const auto& [id, v] : values) {
      const auto it = ref_values.find(id);
      if (it != ref_values.end()) paired.pairs.emplace_back(it->second, v);
    }
    double p = 1.0;
    try {
      if (!paired.pairs.empty()) p = stats::sign_test(paired);
    } catch (const stats::UndefinedTestError&) {
      p = 1.0;
    }
    row.p_value = p;
    pvalues.push_back(p);
    tested.push_back(&row);
  }
  if (pvalues.empty()) return;
  const auto flags = stats::benjamini_hochberg(pvalues, fdr_level);
  for (std::size_t i = 0; i < tested.size(); ++i) tested[i]->significant = flags[i];
}

}  // namespace

CliqueTables evaluate_clique_results(const std::vector<Json>& records, const std::map<std::string, clique::Graph>& graphs,
                                     const std::map<std::string, double>& best_known,
                                     const CliqueEvalOptions& options) {
  CliqueTables out;
  std::vector<CliqueOutcome> outcomes;
  std::set<std::string> missing_graphs;
  for (const auto& r : records) {
    if (r.value("status", "") != "ok" || r.value("problem", "") != "clique") continue;
    const std::string instance = r.at("instance").get<std::string>();
    const auto g = graphs.find(instance);
    if (g == graphs.end()) {
      missing_graphs.insert(instance);
      continue;
    }
    CliqueOutcome o;
    o.instance = instance;
    o.sampler = r.at("sampler").get<std::string>();
    o.rule = r.at("update_rule").get<std::string>();
    o.kappa = r.at("kappa").get<double>();
    o.replicate = r.at("replicate").get<std::size_t>();
    std::vector<int> vertices;
    for (int v : r.at("best_x").get<std::vector<int>>()) vertices.push_back(v - 1);
    const auto x = clique::selection(g->second.vertex_count(), vertices);
    o.local_optimum = clique::is_local_optimum(x, g->second, o.kappa);
    o.inclusion_maximal = clique::is_inclusion_maximal(vertices, g->second);
    o.size = vertices.size();
    o.best_sample_ratio = r.at("best_sample_index").get<double>() / r.at("total_evaluations").get<double>();
    outcomes.push_back(std::move(o));
  }
  for (const auto& id : missing_graphs) out.warnings.push_back("no graph loaded for instance " + id + "; records skipped");

  std::vector<MethodKey> methods;
  for (const auto& o : outcomes) {
    const MethodKey key{o.rule, o.sampler};
    if (std::find(methods.begin(), methods.end(), key) == methods.end()) methods.push_back(key);
  }
  std::stable_sort(methods.begin(), methods.end(),
                   [](const MethodKey& a, const MethodKey& b) { return rule_rank(a.first) < rule_rank(b.first); });

  Observations local_cells, local_graphs, inclusion, ratio_cells, size_ratio;
  std::map<MethodKey, std::map<std::string, std::size_t>> local_graph_counts;
  std::set<std::string> missing_best;
  for (const auto& o : outcomes) {
    const MethodKey key{o.rule, o.sampler};
    local_cells[key][o.cell_id()] = o.local_optimum ? 1.0 : 0.0;
    local_graphs[key][o.graph_id()] += o.local_optimum ? 1.0 : 0.0;
    local_graph_counts[key][o.graph_id()] += 1;
    auto& inc = inclusion[key][o.graph_id()];
    inc = std::max(inc, o.inclusion_maximal ? 1.0 : 0.0);
    ratio_cells[key][o.cell_id()] = o.best_sample_ratio;
    const auto known = best_known.find(o.instance);
    if (known == best_known.end() || !(known->second > 0.0)) {
      missing_best.insert(o.instance);
    } else {
      auto& ratio = size_ratio[key][o.graph_id()];
      const double found = o.inclusion_maximal ? static_cast<double>(o.size) / known->second : 0.0;
      ratio = std::max(ratio, found);
    }
  }
  for (auto& [key, per_graph] : local_graphs) {
    for (auto& [id, v] : per_graph) v /= static_cast<double>(local_graph_counts[key][id]);
  }
  for (const auto& id : missing_best) out.warnings.push_back("no best-known clique size for " + id + "; omitted from size ratios");

  auto fill = [&](MetricTable& table, const std::string& name, const Observations& values,
                  const std::function<bool(const MethodKey&)>& included) {
    table.name = name;
    for (const auto& key : methods) {
      MetricRow row;
      row.rule = key.first;
      row.sampler = key.second;
      const auto it = values.find(key);
      if (it != values.end() && included(key)) row.value = mean_of(it->second);
      table.rows.push_back(row);
    }
  };
  auto always = [](const MethodKey&) { return true; };

  const Observations& local_pairs = options.pairing == "graph" ? local_graphs : local_cells;
  fill(out.local_optimality, "local_optimality", local_cells, always);
  compare_to_reference(out.local_optimality, local_pairs, options.reference, stats::Direction::HigherBetter,
                       options.fdr_level);

  fill(out.inclusion_maximal, "inclusion_maximal", inclusion, always);
  compare_to_reference(out.inclusion_maximal, inclusion, options.reference, stats::Direction::HigherBetter,
                       options.fdr_level);

  // Sampling efficiency only means something for methods that find cliques.
  auto finds_cliques = [&](const MethodKey& key) {
    const MetricRow* row = out.inclusion_maximal.find(key.first, key.second);
    return row && row->value && *row->value > 0.0;
  };
  fill(out.best_sample_ratio, "best_sample_ratio", ratio_cells, finds_cliques);
  compare_to_reference(out.best_sample_ratio, ratio_cells, options.reference, stats::Direction::LowerBetter,
                       options.fdr_level);

  fill(out.clique_size_ratio, "clique_size_ratio", size_ratio, always);
  compare_to_reference(out.clique_size_ratio, size_ratio, options.reference, stats::Direction::HigherBetter,
                       options.fdr_level);
  return out;
}

KMedoidsTables evaluate_kmedoids_results(const std::vector<Json>& records, double fdr_level) {
  KMedoidsTables out;
  struct Sums {
    double objective = 0.0;
    double evaluations = 0.0;
    double inner = 0.0;
    std::size_t count = 0;
  };
  std::map<std::string, std::map<std::string, Sums>> by_dataset;
  std::vector<std::string> methods;
  for (const auto& r : records) {
    if (r.value("status", "") != "ok" || r.value("problem", "") != "kmedoids") continue;
    const std::string method = r.at("sampler").get<std::string>();
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) methods.push_back(method);
    auto& s = by_dataset[r.at("instance").get<std::string>()][method];
    s.objective += r.at("objective").get<double>();
    s.evaluations += r.at("evaluations").get<double>();
    s.inner += r.value("inner_evaluations", r.at("evaluations").get<double>());
    ++s.count;
  }
  std::vector<std::string> datasets;
  for (const auto& [id, per_method] : by_dataset) {
    if (per_method.size() == methods.size()) {
      datasets.push_back(id);
    } else {
      out.warnings.push_back("dataset " + id + " lacks some methods; dropped");
    }
  }
  if (datasets.empty() || methods.empty()) throw std::runtime_error("no dataset has results for every method");

  const auto rows = static_cast<Eigen::Index>(methods.size());
  const auto cols = static_cast<Eigen::Index>(datasets.size());
  Table<double> objective(rows, cols), evaluations(rows, cols), inner(rows, cols);
  for (Eigen::Index m = 0; m < rows; ++m) {
    for (Eigen::Index d = 0; d < cols; ++d) {
      const Sums& s = by_dataset.at(datasets[static_cast<std::size_t>(d)]).at(methods[static_cast<std::size_t>(m)]);
      const double n = static_cast<double>(s.count);
      objective(m, d) = s.objective / n;
      evaluations(m, d) = s.evaluations / n;
      inner(m, d) = s.inner / n;
    }
  }
  out.objective = stats::ratio_ranking(methods, objective, stats::Direction::LowerBetter, fdr_level);
  out.evaluations = stats::ratio_ranking(methods, evaluations, stats::Direction::LowerBetter, fdr_level);
  out.inner_evaluations = stats::ratio_ranking(methods, inner, stats::Direction::LowerBetter, fdr_level);
  return out;
}

void write_metric_csv(std::ostream& out, const MetricTable& table) {
  out << "table,rule,sampler,value,p_value,significant\n";
  for (const auto& r : table.rows) {
    out << table.name << ',' << r.rule << ',' << r.sampler << ',';
    if (r.value) {
      out << *r.value;
    } else {
      out << '-';
    }
    out << ',';
    if (r.p_value) out << *r.p_value;
    out << ',' << (r.significant ? "*" : "") << '\n';
  }
}

void write_ranking_csv(std::ostream& out, const std::string& criterion, const stats::RankingTable& table) {
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    out << criterion << ',' << i + 1 << ',' << table.methods[i] << ',' << table.averaged_ratios[i] << ',';
    if (i < table.adjacent_pvalues.size()) {
      out << table.adjacent_pvalues[i] << ',' << (table.significant[i] ? "*" : "") << ','
          << (table.adjacent_all_tied[i] ? "tied" : "");
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace cakewalk::bench
