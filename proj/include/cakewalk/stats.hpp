#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cakewalk/policy.hpp"

namespace cakewalk::stats {

enum class Direction { HigherBetter, LowerBetter };

struct PairedScores {
  std::vector<std::pair<double, double>> pairs;  // (a, b)
  Direction direction = Direction::HigherBetter;
};

// Every pair tied: the sign test has nothing to count.
class UndefinedTestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateRatioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P[Bin(n, 1/2) >= s], exact.
double binomial_upper_tail(std::size_t n, std::size_t s);

// One-sided sign test of "a beats b". Exact ties are dropped.
double sign_test(const PairedScores& scores);

// Benjamini-Hochberg step-up at level q; flags in input order.
std::vector<bool> benjamini_hochberg(const std::vector<double>& pvalues, double q);

struct RankingTable {
  std::vector<std::string> methods;        // ranked best first
  std::vector<double> averaged_ratios;     // aligned with methods
  std::vector<double> adjacent_pvalues;    // methods[i] vs methods[i + 1]
  std::vector<bool> adjacent_all_tied;     // sign test undefined, p reported as 1
  std::vector<bool> significant;           // BH at the table's level
};

// Scores: one row per method, one column per dataset. Each column is divided
// by its best entry, rows are averaged and sorted, and consecutive methods
// are compared with the sign test on the raw scores.
RankingTable ratio_ranking(const std::vector<std::string>& methods, const Table<double>& scores,
                           Direction direction = Direction::LowerBetter, double fdr_level = 0.01);

}  // namespace cakewalk::stats
