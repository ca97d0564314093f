#include "cakewalk/kmedoids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace cakewalk::kmedoids {

DistanceMatrix::DistanceMatrix(Table<double> d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols() || d_.rows() < 1) throw std::invalid_argument("DistanceMatrix: not square");
  for (Eigen::Index i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0) throw std::invalid_argument("DistanceMatrix: nonzero diagonal");
    for (Eigen::Index j = 0; j < d_.cols(); ++j) {
      const double v = d_(i, j);
      if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("DistanceMatrix: entry not finite and nonnegative");
      if (v != d_(j, i)) throw std::invalid_argument("DistanceMatrix: not symmetric");
    }
  }
}

DistanceMatrix mahalanobis_diag(const Table<double>& data) {
  const Eigen::Index m = data.rows();
  const Eigen::Index p = data.cols();
  if (m < 2 || p < 1) throw IngestionError("mahalanobis_diag: need at least 2 rows and 1 column");
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index f = 0; f < p; ++f) {
      if (!std::isfinite(data(i, f))) {
        throw IngestionError("non-finite value at row " + std::to_string(i + 1) + ", column " + std::to_string(f + 1));
      }
    }
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::RowVectorXd variance =
      ((data.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(m)).max(1e-12).matrix();
  const Table<double> scaled = data.array().rowwise() / variance.array().sqrt();

  Table<double> d = Table<double>::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = (scaled.row(i) - scaled.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  for (auto& s : cells) {
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
  }
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

NumericTable load_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IngestionError(path + ": row " + std::to_string(rows.size() + 1) + " has " + std::to_string(cells.size()) +
                           " fields, header has " + std::to_string(header.size()));
    }
    rows.push_back(std::move(cells));
  }

  NumericTable out;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < header.size(); ++c) {
    double v = 0.0;
    const bool numeric =
        !rows.empty() && std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return parse_number(r[c], v); });
    if (numeric) {
      keep.push_back(c);
      out.columns.push_back(header[c]);
    } else {
      out.skipped_columns.push_back(header[c]);
    }
  }
  out.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t f = 0; f < keep.size(); ++f) {
      double v = 0.0;
      parse_number(rows[r][keep[f]], v);
      if (!std::isfinite(v)) {
        throw IngestionError(path + ": non-finite value at row " + std::to_string(r + 1) + ", column '" +
                             header[keep[f]] + "'");
      }
      out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = v;
    }
  }
  return out;
}

DistanceMatrix load_distance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (const auto& cell : split_csv_line(line)) {
      double v = 0.0;
      if (!parse_number(cell, v) || !std::isfinite(v)) {
        throw IngestionError(path + ": bad distance '" + cell + "' at row " + std::to_string(rows.size() + 1));
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Table<double> d(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != m) {
      throw IngestionError(path + ": distance matrix is not square");
    }
    for (Eigen::Index j = 0; j < m; ++j) d(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  try {
    return DistanceMatrix(std::move(d));
  } catch (const std::invalid_argument& e) {
    throw IngestionError(path + ": " + e.what());
  }
}

namespace {

void check_medoids(const Solution& medoids, const DistanceMatrix& dm) {
  if (medoids.size() == 0) throw std::invalid_argument("empty medoid set");
  for (int c : medoids.categories) {
    if (c < 1 || c > dm.size()) throw std::invalid_argument("medoid index out of range: " + std::to_string(c));
  }
}

// Position of the nearest medoid for every point, ties to the lowest position.
std::vector<std::size_t> assign(const Solution& medoids, const DistanceMatrix& dm) {
  std::vector<std::size_t> owner(static_cast<std::size_t>(dm.size()), 0);
  for (Eigen::Index i = 0; i < dm.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < medoids.size(); ++j) {
      const double d = dm(i, medoids[j] - 1);
      if (d < best) {
        best = d;
        owner[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  return owner;
}

}  // namespace

double kmedoids_objective(const Solution& medoids, const DistanceMatrix& dm) {
  check_medoids(medoids, dm);
  double total = 0.0;
  for (Eigen::Index i = 0; i < dm.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c : medoids.categories) best = std::min(best, dm(i, c - 1));
    total += best;
  }
  return total;
}

GreedyResult voronoi_iteration(const Solution& start, const DistanceMatrix& dm) {
  check_medoids(start, dm);
  GreedyResult r;
  r.medoids = start;
  r.objective = kmedoids_objective(start, dm);
  r.evaluations = 1;
  r.trace.push_back(r.objective);

  while (true) {
    const std::vector<std::size_t> owner = assign(r.medoids, dm);
    std::vector<std::vector<Eigen::Index>> clusters(r.medoids.size());
    for (Eigen::Index i = 0; i < dm.size(); ++i) clusters[owner[static_cast<std::size_t>(i)]].push_back(i);

    Solution next = r.medoids;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      const auto& members = clusters[j];
      if (members.empty()) continue;
      auto cost = [&](Eigen::Index c) {
        double s = 0.0;
        for (Eigen::Index i : members) s += dm(c, i);
        return s;
      };
      // The current medoid wins ties so a fixed point stays fixed.
      Eigen::Index chosen = r.medoids[j] - 1;
      double chosen_cost = cost(chosen);
      for (Eigen::Index c : members) {
        const double v = cost(c);
        if (v < chosen_cost) {
          chosen = c;
          chosen_cost = v;
        }
      }
      next[j] = static_cast<int>(chosen) + 1;
    }
    if (next == r.medoids) break;

    const double value = kmedoids_objective(next, dm);
    ++r.evaluations;
    if (!(value < r.objective)) break;
    r.medoids = std::move(next);
    r.objective = value;
    r.trace.push_back(value);
  }
  return r;
}

GreedyResult pam(const Solution& start, const DistanceMatrix& dm) {
  check_medoids(start, dm);
  GreedyResult r;
  r.medoids = start;
  r.objective = kmedoids_objective(start, dm);
  r.evaluations = 1;
  r.trace.push_back(r.objective);

  std::vector<char> is_medoid(static_cast<std::size_t>(dm.size()));
  while (true) {
    std::fill(is_medoid.begin(), is_medoid.end(), 0);
    for (int c : r.medoids.categories) is_medoid[static_cast<std::size_t>(c - 1)] = 1;

    double best_value = r.objective;
    std::size_t best_position = 0;
    int best_point = 0;
    Solution candidate = r.medoids;
    for (std::size_t position = 0; position < r.medoids.size(); ++position) {
      for (Eigen::Index o = 0; o < dm.size(); ++o) {
        if (is_medoid[static_cast<std::size_t>(o)]) continue;
        candidate[position] = static_cast<int>(o) + 1;
        const double value = kmedoids_objective(candidate, dm);
        ++r.evaluations;
        if (value < best_value) {
          best_value = value;
          best_position = position;
          best_point = static_cast<int>(o) + 1;
        }
      }
      candidate[position] = r.medoids[position];
    }
    if (best_point == 0) break;
    r.medoids[best_position] = best_point;
    r.objective = best_value;
    r.trace.push_back(best_value);
  }
  return r;
}

double composed_objective(const Solution& x, const DistanceMatrix& dm) {
  return -voronoi_iteration(x, dm).objective;
}

Solution random_distinct_medoids(Eigen::Index m, Eigen::Index k, Rng& rng) {
  if (k < 1 || k > m) throw std::invalid_argument("random_distinct_medoids: need 1 <= k <= m");
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 1);
  // Partial Fisher-Yates.
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(m - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return Solution(std::move(pool));
}

Table<double> gaussian_mixture(Eigen::Index m, Eigen::Index p, int components, double spread, Rng& rng) {
  auto normal = [&rng]() {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  };
  Table<double> centres(components, p);
  for (Eigen::Index c = 0; c < components; ++c) {
    for (Eigen::Index f = 0; f < p; ++f) centres(c, f) = spread * (2.0 * uniform01(rng) - 1.0);
  }
  Table<double> data(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto c = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(components)));
    for (Eigen::Index f = 0; f < p; ++f) data(i, f) = centres(c, f) + normal();
  }
  return data;
}

}  // namespace cakewalk::kmedoids
