#include "cakewalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cakewalk::stats {

double binomial_upper_tail(std::size_t n, std::size_t s) {
  if (s == 0) return 1.0;
  if (s > n) return 0.0;
  if (n <= 1000) {
    // Incremental pmf starting from 2^-n; stays in the normal double range.
    double term = std::ldexp(1.0, -static_cast<int>(n));
    double tail = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      if (i >= s) tail += term;
      term = term * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return std::min(tail, 1.0);
  }
  const double nn = static_cast<double>(n);
  std::vector<double> logs;
  for (std::size_t i = s; i <= n; ++i) {
    const double ii = static_cast<double>(i);
    logs.push_back(std::lgamma(nn + 1) - std::lgamma(ii + 1) - std::lgamma(nn - ii + 1) - nn * std::log(2.0));
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return std::min(1.0, std::exp(peak + std::log(sum)));
}

double sign_test(const PairedScores& scores) {
  std::size_t wins = 0;
  std::size_t untied = 0;
  for (const auto& [a, b] : scores.pairs) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("sign_test: non-finite score");
    if (a == b) continue;
    ++untied;
    const bool a_wins = scores.direction == Direction::HigherBetter ? a > b : a < b;
    if (a_wins) ++wins;
  }
  if (untied == 0) throw UndefinedTestError("sign_test: every pair is tied");
  return binomial_upper_tail(untied, wins);
}

std::vector<bool> benjamini_hochberg(const std::vector<double>& pvalues, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("benjamini_hochberg: q must lie in (0, 1)");
  const std::size_t m = pvalues.size();
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("benjamini_hochberg: p-value outside [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::size_t cutoff = 0;  // number of rejected hypotheses
  for (std::size_t r = 1; r <= m; ++r) {
    if (pvalues[order[r - 1]] <= static_cast<double>(r) * q / static_cast<double>(m)) cutoff = r;
  }
  std::vector<bool> flags(m, false);
  for (std::size_t r = 0; r < cutoff; ++r) flags[order[r]] = true;
  return flags;
}

RankingTable ratio_ranking(const std::vector<std::string>& methods, const Table<double>& scores, Direction direction,
                           double fdr_level) {
  const auto method_count = static_cast<Eigen::Index>(methods.size());
  if (scores.rows() != method_count || scores.cols() < 1 || method_count < 1) {
    throw std::invalid_argument("ratio_ranking: score table must be methods x datasets");
  }
  Table<double> ratios(scores.rows(), scores.cols());
  for (Eigen::Index d = 0; d < scores.cols(); ++d) {
    const auto column = scores.col(d);
    if (direction == Direction::LowerBetter) {
      const double best = column.minCoeff();
      if (!(best > 0.0)) throw DegenerateRatioError("ratio_ranking: minimal score on dataset " + std::to_string(d) + " is not positive");
      ratios.col(d) = column / best;
    } else {
      if (!(column.minCoeff() > 0.0)) throw DegenerateRatioError("ratio_ranking: nonpositive score on dataset " + std::to_string(d));
      ratios.col(d) = column.maxCoeff() * column.cwiseInverse();
    }
  }
  const Column<double> averaged = ratios.rowwise().mean();

  std::vector<std::size_t> order(methods.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return averaged(static_cast<Eigen::Index>(a)) < averaged(static_cast<Eigen::Index>(b));
  });

  RankingTable table;
  for (std::size_t idx : order) {
    table.methods.push_back(methods[idx]);
    table.averaged_ratios.push_back(averaged(static_cast<Eigen::Index>(idx)));
  }
  for (std::size_t r = 0; r + 1 < order.size(); ++r) {
    PairedScores paired;
    paired.direction = direction;
    for (Eigen::Index d = 0; d < scores.cols(); ++d) {
      paired.pairs.emplace_back(scores(static_cast<Eigen::Index>(order[r]), d),
                                scores(static_cast<Eigen::Index>(order[r + 1]), d));
    }
    try {
      table.adjacent_pvalues.push_back(sign_test(paired));
      table.adjacent_all_tied.push_back(false);
    } catch (const UndefinedTestError&) {
      table.adjacent_pvalues.push_back(1.0);
      table.adjacent_all_tied.push_back(true);
    }
  }
  table.significant = benjamini_hochberg(table.adjacent_pvalues, fdr_level);
  return table;
}

}  // namespace cakewalk::stats
