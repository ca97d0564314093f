#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cakewalk/policy.hpp"
#include "cakewalk/random.hpp"

namespace cakewalk::kmedoids {

// Symmetric, nonnegative, zero-diagonal distance table.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Table<double> d);

  Eigen::Index size() const { return d_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return d_(i, j); }
  const Table<double>& table() const { return d_; }

 private:
  Table<double> d_;
};

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pairwise distances scaled by per-column population variance, floored
// at 1e-12 for constant columns.
DistanceMatrix mahalanobis_diag(const Table<double>& data);

struct NumericTable {
  Table<double> data;
  std::vector<std::string> columns;
  std::vector<std::string> skipped_columns;
};

// CSV with a header row. Columns that do not parse as numbers in every
// row are dropped and listed in skipped_columns.
NumericTable load_numeric_csv(const std::string& path);
// Headerless m x m CSV of distances.
DistanceMatrix load_distance_csv(const std::string& path);

// A medoid set is a Solution over [m]^k: entry j is the 1-based index of the
// point representing cluster j. Repeats are allowed.
double kmedoids_objective(const Solution& medoids, const DistanceMatrix& dm);

struct GreedyResult {
  Solution medoids;
  double objective = 0.0;
  std::size_t evaluations = 0;  // calls to kmedoids_objective
  std::vector<double> trace;    // objective after the start and each accepted move
};

// Alternate nearest-medoid assignment (ties to the lowest position) with
// per-cluster medoid recomputation while the objective strictly improves.
GreedyResult voronoi_iteration(const Solution& start, const DistanceMatrix& dm);

// Best-improvement swap search over (position, non-medoid point) pairs,
// ties broken towards the lexicographically smallest swap.
GreedyResult pam(const Solution& start, const DistanceMatrix& dm);

// Negated objective after Voronoi refinement of x; the quantity the
// maximizing sampler optimizes when it learns Voronoi initializations.
double composed_objective(const Solution& x, const DistanceMatrix& dm);

// k distinct points drawn uniformly without replacement.
Solution random_distinct_medoids(Eigen::Index m, Eigen::Index k, Rng& rng);

// Isotropic Gaussian blobs with unit-variance noise around centres drawn
// uniformly from [-spread, spread]^p.
Table<double> gaussian_mixture(Eigen::Index m, Eigen::Index p, int components, double spread, Rng& rng);

}  // namespace cakewalk::kmedoids
