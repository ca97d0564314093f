// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds are fixed here and must not be tuned to the results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cakewalk/bench.hpp"
#include "cakewalk/clique.hpp"
#include "cakewalk/kmedoids.hpp"
#include "cakewalk/optimizer.hpp"
#include "cakewalk/policy.hpp"
#include "cakewalk/stats.hpp"
#include "cakewalk/surrogate.hpp"

using namespace cakewalk;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cakewalk_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<int> subset(unsigned mask, int n) {
  std::vector<int> u;
  for (int v = 0; v < n; ++v)
    if (mask >> v & 1u) u.push_back(v);
  return u;
}

// --- 1 ----------------------------------------------------------------------

void gradient_check() {
  const auto start = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  int cases = 0;
  for (int m : {2, 5}) {
    for (int n : {1, 10}) {
      for (int c = 0; c < 25; ++c, ++cases) {
        Table<double> theta(m, n);
        for (Eigen::Index i = 0; i < theta.size(); ++i) theta.data()[i] = 4.0 * uniform01(rng) - 2.0;
        SoftmaxPolicy<double> policy(theta);
        const Solution x = sample(policy, rng);
        const Table<double> grad = log_prob_gradient(policy, x);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
          SoftmaxPolicy<double> up(theta), down(theta);
          up.theta().data()[i] += h;
          down.theta().data()[i] -= h;
          const double fd = (log_prob(up, x) - log_prob(down, x)) / (2 * h);
          worst = std::max(worst, std::abs(fd - grad.data()[i]));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  report(1, cases == 100 && worst <= 1e-6 && elapsed < 1.0, "log-likelihood gradient vs central differences",
         fmt("%.0f cases, max error %.2e, %.3f s", cases, worst, elapsed));
}

// --- 2 ----------------------------------------------------------------------

void ecdf_check() {
  const auto start = Clock::now();
  Rng rng(202);
  int mismatches = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t k = 1 + uniform_index(rng, 60);
    ObjectiveHistory h(k);
    const std::size_t pushes = uniform_index(rng, 2 * k) + 1;
    std::vector<double> pushed;
    for (std::size_t i = 0; i < pushes; ++i) {
      // Coarse grid so that ties are common.
      const double v = static_cast<double>(uniform_index(rng, 8)) - 3.0;
      h.push(v);
      pushed.push_back(v);
    }
    std::vector<double> window(pushed.end() - static_cast<std::ptrdiff_t>(std::min(k, pushed.size())), pushed.end());
    std::sort(window.begin(), window.end());
    const double q = static_cast<double>(uniform_index(rng, 10)) - 4.0;
    const auto below = std::lower_bound(window.begin(), window.end(), q) - window.begin();
    const double oracle = static_cast<double>(below) / static_cast<double>(window.size());
    if (ecdf(h, q) != oracle) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  report(2, mismatches == 0 && elapsed < 1.0, "empirical CDF vs sort-based oracle",
         fmt("1000 cases, %.0f mismatches, %.3f s", mismatches, elapsed));
}

// --- 3 ----------------------------------------------------------------------

void scale_invariance_check() {
  Rng rng(303);
  const std::vector<SurrogateKind> kinds{SurrogateKind::cdf(), SurrogateKind::scaled_cdf(), SurrogateKind::oce(0.2)};
  int differing = 0;
  int compared = 0;
  for (int w = 0; w < 100; ++w) {
    const std::size_t k = 1 + uniform_index(rng, 50);
    std::vector<double> values(k);
    for (auto& v : values) {
      v = uniform_index(rng, 3) == 0 ? static_cast<double>(uniform_index(rng, 5)) : 10.0 * uniform01(rng) - 5.0;
    }
    const double y = uniform_index(rng, 2) == 0 ? values[uniform_index(rng, k)] : 10.0 * uniform01(rng) - 5.0;
    for (double c : {0.5, 3.0, 1000.0}) {
      ObjectiveHistory base(k), scaled(k);
      for (double v : values) {
        base.push(v);
        scaled.push(c * v);
      }
      for (const auto& kind : kinds) {
        ++compared;
        if (weight(kind, base, y) != weight(kind, scaled, c * y)) ++differing;
      }
    }
  }
  report(3, differing == 0, "rank-based weights invariant to positive scaling",
         fmt("%.0f comparisons, %.0f differ", compared, differing));
}

// --- 4 ----------------------------------------------------------------------

void soft_clique_check() {
  Rng rng(404);
  int cliques = 0;
  int violations = 0;
  for (int g = 0; g < 50; ++g) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 11));
    const auto graph = clique::random_graph(n, 0.3 + 0.6 * uniform01(rng), rng);
    std::map<std::size_t, std::vector<double>> by_size;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      const auto u = subset(mask, n);
      if (u.size() < 2) continue;
      bool all = true;
      for (std::size_t a = 0; a < u.size() && all; ++a)
        for (std::size_t b = a + 1; b < u.size(); ++b)
          if (!graph.adjacent(u[a], u[b])) all = false;
      if (!all) continue;
      ++cliques;
      if (clique::soft_clique_size(u, graph, 0.0) != 1.0) ++violations;
      by_size[u.size()].push_back(clique::soft_clique_size(u, graph, 1.0));
    }
    // At kappa = 1, every clique beats every smaller one.
    double previous_max = -1.0;
    for (const auto& [size, values] : by_size) {
      const double lo = *std::min_element(values.begin(), values.end());
      const double hi = *std::max_element(values.begin(), values.end());
      if (!(lo > previous_max)) ++violations;
      previous_max = hi;
    }
  }
  report(4, violations == 0 && cliques > 0, "soft clique size exact on enumerated cliques",
         fmt("50 graphs, %.0f cliques, %.0f violations", cliques, violations));
}

// --- 5, 6, 7 ----------------------------------------------------------------

struct CliqueRun {
  std::vector<int> members;
  bool local_optimum = false;
};

std::vector<CliqueRun> clique_runs(const std::vector<clique::Graph>& graphs, const SurrogateKind& kind, UpdateRule rule,
                                   double step_size = 0.01, std::size_t multiplier = 100) {
  std::vector<CliqueRun> runs;
  const double kappa = 0.2;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    RunConfig config;
    config.budget = multiplier * static_cast<std::size_t>(g.vertex_count());
    config.surrogate = kind;
    config.rule = rule;
    config.constants.step_size = step_size;
    config.window = 100;
    config.seed = 5000 + i;
    const Objective f = [&g, kappa](const Solution& x) { return clique::soft_clique_size(x, g, kappa); };
    const RunResult r = cakewalk_run(f, SoftmaxPolicy<double>(2, g.vertex_count()), config);
    runs.push_back({clique::members(r.best_x), clique::is_local_optimum(r.best_x, g, kappa)});
  }
  return runs;
}

// Bron-Kerbosch without pivoting: every maximal clique, as bit masks.
void bron_kerbosch(const clique::Graph& g, unsigned r, unsigned p, unsigned x, std::set<unsigned>& out) {
  if (p == 0 && x == 0) {
    out.insert(r);
    return;
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (!(p >> v & 1u)) continue;
    unsigned nbrs = 0;
    for (int w : g.neighbors(v)) nbrs |= 1u << w;
    bron_kerbosch(g, r | 1u << v, p & nbrs, x & nbrs, out);
    p &= ~(1u << v);
    x |= 1u << v;
  }
}

void clique_sampler_checks() {
  const auto start = Clock::now();
  Rng rng(505);
  std::vector<clique::Graph> graphs;
  for (int i = 0; i < 20; ++i) graphs.push_back(clique::random_graph(30, 0.5, rng));

  const auto cw = clique_runs(graphs, SurrogateKind::scaled_cdf(), UpdateRule::AdaGrad);
  const double elapsed = seconds_since(start);
  const auto cw_hits = std::count_if(cw.begin(), cw.end(), [](const CliqueRun& r) { return r.local_optimum; });
  report(5, cw_hits >= 16 && elapsed < 120.0, "scaled-CDF + AdaGrad returns Hamming-1 local optima",
         fmt("%.0f / 20 runs locally optimal (need >= 16), %.2f s", static_cast<double>(cw_hits), elapsed));

  const auto reinforce = clique_runs(graphs, SurrogateKind::raw(), UpdateRule::Sga);
  const auto raw_hits =
      std::count_if(reinforce.begin(), reinforce.end(), [](const CliqueRun& r) { return r.local_optimum; });
  report(6, cw_hits > raw_hits, "scaled-CDF + AdaGrad beats raw REINFORCE + SGA",
         fmt("%.0f vs %.0f locally optimal runs", static_cast<double>(cw_hits), static_cast<double>(raw_hits)));

  // Not a criterion. AdaGrad moves each logit by at most 2 eta sqrt(T), about
  // 1.1 here, so the default rate cannot concentrate on 30-vertex graphs;
  // the same sampler with room to move shows the failure is one of scale.
  const auto roomy = clique_runs(graphs, SurrogateKind::scaled_cdf(), UpdateRule::AdaGrad, 0.05, 1000);
  std::printf("INFO criterion  5: same graphs with step 0.05 and budget 1000 n: %d / 20 locally optimal\n",
              static_cast<int>(std::count_if(roomy.begin(), roomy.end(), [](const CliqueRun& r) { return r.local_optimum; })));

  // Classify every criterion 5 result, then validate the verifier itself.
  int maximal = 0, flagged = 0, not_cliques = 0;
  for (std::size_t i = 0; i < cw.size(); ++i) {
    if (!clique::is_clique(cw[i].members, graphs[i])) {
      ++not_cliques;
    } else if (clique::is_inclusion_maximal(cw[i].members, graphs[i])) {
      ++maximal;
    } else {
      ++flagged;
    }
  }
  int mismatched_graphs = 0;
  Rng small_rng(707);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + static_cast<int>(uniform_index(small_rng, 12));
    const auto g = clique::random_graph(n, 0.2 + 0.7 * uniform01(small_rng), small_rng);
    std::set<unsigned> oracle;
    bron_kerbosch(g, 0, (1u << n) - 1, 0, oracle);
    std::set<unsigned> verified;
    for (unsigned mask = 0; mask < (1u << n); ++mask)
      if (clique::is_inclusion_maximal(subset(mask, n), g)) verified.insert(mask);
    if (verified != oracle) ++mismatched_graphs;
  }
  report(7, mismatched_graphs == 0 && maximal + flagged + not_cliques == 20,
         "inclusion-maximality verifier matches Bron-Kerbosch",
         fmt("30 graphs, %.0f set mismatches; runs: %.0f maximal, %.0f flagged non-maximal, %.0f non-cliques",
             mismatched_graphs, maximal, flagged, not_cliques));
}

// --- 8 ----------------------------------------------------------------------

void greedy_check() {
  Rng rng(808);
  int increasing = 0;
  int pam_wins = 0;
  for (int run = 0; run < 100; ++run) {
    const auto data = kmedoids::gaussian_mixture(50, 2, 5, 5.0, rng);
    const auto dm = kmedoids::mahalanobis_diag(data);
    const Solution x0 = kmedoids::random_distinct_medoids(50, 5, rng);
    const auto vor = kmedoids::voronoi_iteration(x0, dm);
    const auto pam = kmedoids::pam(x0, dm);
    for (const auto* r : {&vor, &pam})
      for (std::size_t t = 1; t < r->trace.size(); ++t)
        if (r->trace[t] > r->trace[t - 1]) ++increasing;
    if (pam.objective <= vor.objective) ++pam_wins;
  }
  report(8, increasing == 0 && pam_wins >= 75, "greedy traces non-increasing, PAM usually beats Voronoi",
         fmt("%.0f increasing steps, PAM <= VOR in %.0f / 100 runs (need >= 75)", increasing, pam_wins));
}

// --- 9 ----------------------------------------------------------------------

void composition_check() {
  const auto start = Clock::now();
  const fs::path dir = scratch("composition");
  Rng rng(909);
  std::ostringstream inputs;
  for (int d = 0; d < 10; ++d) {
    const auto data = kmedoids::gaussian_mixture(200, 3, 5, 4.0, rng);
    const fs::path path = dir / ("mixture" + std::to_string(d) + ".csv");
    std::ofstream out(path);
    out << "x,y,z\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < data.rows(); ++i) out << data(i, 0) << ',' << data(i, 1) << ',' << data(i, 2) << '\n';
  }
  std::ofstream(dir / "kmedoids.cfg") << "problem = \"kmedoids\"\n"
                                         "inputs = [\".\"]\n"
                                         "samplers = [\"vor\", \"pam\", \"cw\", \"cwv\"]\n"
                                         "rules = [\"adagrad\"]\n"
                                         "clusters = 5\n"
                                         "replicates = 3\n"
                                         "seed = 9\n"
                                         "output = \"results.jsonl\"\n";
  const auto spec = bench::load_config((dir / "kmedoids.cfg").string());
  bench::SweepOptions options;
  options.jobs = 4;
  const auto summary = bench::run_sweep(spec, options);
  const auto records = bench::read_records(spec.output);

  std::map<std::string, double> vor, cwv;
  for (const auto& r : records) {
    if (r["status"] != "ok") continue;
    const std::string cell = r["instance"].get<std::string>() + "|" + std::to_string(r["replicate"].get<int>());
    if (r["sampler"] == "vor") vor[cell] = r["objective"].get<double>();
    if (r["sampler"] == "cwv") cwv[cell] = r["objective"].get<double>();
  }
  int cells = 0, dominated = 0;
  for (const auto& [cell, v] : vor) {
    if (!cwv.contains(cell)) continue;
    ++cells;
    if (cwv[cell] <= v) ++dominated;
  }
  const auto tables = bench::evaluate_kmedoids_results(records);
  const auto& order = tables.objective.methods;
  const auto pos = [&](const std::string& m) { return std::find(order.begin(), order.end(), m) - order.begin(); };
  const bool ahead = pos("cwv") < pos("vor");
  std::string ranking;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ranking += (i ? " < " : "") + order[i] + fmt(" %.4f", tables.objective.averaged_ratios[i]);
  }
  const double elapsed = seconds_since(start);
  const bool pass = summary.failed == 0 && cells == 30 && dominated * 10 >= cells * 9 && ahead && elapsed < 300.0;
  report(9, pass, "CWV at least as good as VOR and ranked ahead",
         fmt("CWV <= VOR in %.0f / %.0f cells (need >= 90%%), %.1f s; ", dominated, cells, elapsed) + ranking);
}

// --- 10 ---------------------------------------------------------------------

void stats_check() {
  auto paired = [](int wins, int losses) {
    stats::PairedScores s;
    for (int i = 0; i < wins; ++i) s.pairs.emplace_back(1.0, 0.0);
    for (int i = 0; i < losses; ++i) s.pairs.emplace_back(0.0, 1.0);
    return s;
  };
  auto six_figures = [](double a, double b) { return std::abs(a - b) <= 5e-7 * std::abs(b); };
  const double p1 = stats::sign_test(paired(12, 0));
  const double p2 = stats::sign_test(paired(5, 5));
  const double p3 = stats::sign_test(paired(0, 4));
  bool exact = six_figures(p1, 2.44140625e-4) && six_figures(p2, 0.623046875) && p3 == 1.0;

  Rng rng(1010);
  int mismatches = 0;
  for (int f = 0; f < 50; ++f) {
    const std::size_t m = 1 + uniform_index(rng, 40);
    std::vector<double> p(m);
    for (auto& v : p) v = std::pow(uniform01(rng), 1 + static_cast<double>(uniform_index(rng, 4)));
    const double q = f % 2 ? 0.01 : 0.05 + 0.2 * uniform01(rng);
    // Direct definition: flag every p at or below the largest passing order statistic.
    std::vector<double> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    double cut = -1.0;
    for (std::size_t r = 1; r <= m; ++r)
      if (sorted[r - 1] <= static_cast<double>(r) * q / static_cast<double>(m)) cut = sorted[r - 1];
    std::vector<bool> oracle(m);
    for (std::size_t i = 0; i < m; ++i) oracle[i] = p[i] <= cut;
    if (stats::benjamini_hochberg(p, q) != oracle) ++mismatches;
  }
  report(10, exact && mismatches == 0, "sign-test tails and Benjamini-Hochberg step-up",
         fmt("p = %.6g, %.6g, %.6g; BH mismatches %.0f / 50", p1, p2, p3, mismatches));
}

// --- 11 ---------------------------------------------------------------------

void reproducibility_check() {
  const fs::path dir = scratch("reproducibility");
  Rng rng(1111);
  for (int i = 0; i < 3; ++i) {
    std::ofstream out(dir / ("g" + std::to_string(i) + ".clq"));
    clique::write_dimacs(out, clique::random_graph(20 + 5 * i, 0.5, rng));
  }
  {
    const auto data = kmedoids::gaussian_mixture(40, 2, 3, 4.0, rng);
    std::ofstream out(dir / "points.csv");
    out.precision(17);
    out << "a,b\n";
    for (Eigen::Index i = 0; i < data.rows(); ++i) out << data(i, 0) << ',' << data(i, 1) << '\n';
  }
  std::ofstream(dir / "clique.cfg") << "problem = \"clique\"\ninputs = [\"g0.clq\", \"g1.clq\", \"g2.clq\"]\n"
                                       "samplers = [\"scaled_cdf\", \"oce:0.1\", \"exp3\"]\n"
                                       "rules = [\"sga\", \"adam\"]\nkappas = [0.0, 0.5]\nreplicates = 2\n"
                                       "seed = 42\nbudget_multiplier = 30\n";
  std::ofstream(dir / "kmedoids.cfg") << "problem = \"kmedoids\"\ninputs = \"points.csv\"\nclusters = 3\n"
                                         "replicates = 2\nbudget = 1500\nseed = 42\n";

  auto read_bytes = [](const std::string& path) {
    std::string out;
    for (const auto& r : bench::read_records(path)) out += bench::strip_timing(r).dump() + "\n";
    return out;
  };
  bool identical = true;
  std::size_t records = 0;
  for (const char* cfg : {"clique.cfg", "kmedoids.cfg"}) {
    auto spec = bench::load_config((dir / cfg).string());
    std::vector<std::string> outputs;
    for (std::size_t jobs : {1, 3}) {
      spec.output = (dir / (std::string(cfg) + std::to_string(jobs) + ".jsonl")).string();
      bench::SweepOptions options;
      options.jobs = jobs;
      bench::run_sweep(spec, options);
      outputs.push_back(read_bytes(spec.output));
    }
    identical = identical && outputs[0] == outputs[1] && !outputs[0].empty();
    records += bench::read_records(spec.output).size();
  }
  report(11, identical && records == 72 + 8, "sweeps reproduce byte for byte modulo wall clock",
         fmt("%.0f records compared across serial and parallel runs", static_cast<double>(records)));
}

// --- 12 ---------------------------------------------------------------------

void table5_check() {
  std::ifstream in(CAKEWALK_FIXTURE_DIR "/table5_ratios.csv");
  std::vector<bench::Json> records;
  std::string line;
  std::getline(in, line);
  std::map<std::string, int> index;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string dataset, method, objective, evaluations;
    std::getline(ss, dataset, ',');
    std::getline(ss, method, ',');
    std::getline(ss, objective, ',');
    std::getline(ss, evaluations, ',');
    const int d = index.emplace(dataset, static_cast<int>(index.size())).first->second;
    records.push_back({{"status", "ok"},
                       {"problem", "kmedoids"},
                       {"instance", dataset},
                       {"sampler", method},
                       {"replicate", 0},
                       {"objective", (120.0 + 7.0 * d) * std::stod(objective)},
                       {"evaluations", (40.0 + d) * std::stod(evaluations)}});
  }
  const auto tables = bench::evaluate_kmedoids_results(records);
  const std::vector<std::string> expected{"CWV", "PAM", "CW", "VOR"};
  const std::vector<std::string> expected_evals{"VOR", "CWV", "CW", "PAM"};
  std::string detail;
  for (std::size_t i = 0; i < tables.objective.methods.size(); ++i) {
    detail += (i ? " < " : "") + tables.objective.methods[i] + fmt(" %.4f", tables.objective.averaged_ratios[i]);
  }
  detail += "; evaluations ";
  for (std::size_t i = 0; i < tables.evaluations.methods.size(); ++i) {
    detail += (i ? " < " : "") + tables.evaluations.methods[i];
  }
  report(12, index.size() == 38 && tables.objective.methods == expected && tables.evaluations.methods == expected_evals,
         "published ratio fixture reproduces the published ranking", detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> checks{
      {"1", gradient_check},        {"2", ecdf_check},   {"3", scale_invariance_check},
      {"4", soft_clique_check},     {"5-7", clique_sampler_checks}, {"8", greedy_check},
      {"9", composition_check},     {"10", stats_check}, {"11", reproducibility_check},
      {"12", table5_check}};
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %s: threw %s\n", name, e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
