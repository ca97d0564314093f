#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "cakewalk/random.hpp"

namespace cakewalk {

template <typename Scalar>
using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// A point of [M]^N. Categories are 1-based (1..M); dimensions are indexed
// from 0 like any other C++ container.
struct Solution {
  std::vector<int> categories;

  Solution() = default;
  explicit Solution(std::vector<int> c) : categories(std::move(c)) {}
  Solution(std::initializer_list<int> c) : categories(c) {}
  Solution(std::size_t n, int fill) : categories(n, fill) {}

  std::size_t size() const { return categories.size(); }
  int operator[](std::size_t j) const { return categories[j]; }
  int& operator[](std::size_t j) { return categories[j]; }

  friend bool operator==(const Solution&, const Solution&) = default;
};

// Parameters of the factorized softmax distribution: column j holds the
// logits of dimension j, row i the logit of category i+1.
template <typename Scalar = double>
class SoftmaxPolicy {
 public:
  using TableType = Table<Scalar>;

  // Zero logits, i.e. the uniform (maximum entropy) distribution.
  SoftmaxPolicy(Eigen::Index categories, Eigen::Index dimensions) {
    if (categories < 2 || dimensions < 1) {
      throw std::invalid_argument("SoftmaxPolicy: need categories >= 2 and dimensions >= 1");
    }
    theta_ = TableType::Zero(categories, dimensions);
  }

  explicit SoftmaxPolicy(TableType theta) : theta_(std::move(theta)) {
    if (theta_.rows() < 2 || theta_.cols() < 1) {
      throw std::invalid_argument("SoftmaxPolicy: need categories >= 2 and dimensions >= 1");
    }
    if (!theta_.allFinite()) {
      throw std::invalid_argument("SoftmaxPolicy: non-finite logit");
    }
  }

  Eigen::Index categories() const { return theta_.rows(); }
  Eigen::Index dimensions() const { return theta_.cols(); }

  const TableType& theta() const { return theta_; }
  TableType& theta() { return theta_; }

 private:
  TableType theta_;
};

namespace detail {

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar peak = v.maxCoeff();
  return peak + std::log((v.array() - peak).exp().sum());
}

template <typename Scalar>
void check_solution(const SoftmaxPolicy<Scalar>& policy, const Solution& x) {
  if (static_cast<Eigen::Index>(x.size()) != policy.dimensions()) {
    throw std::invalid_argument("solution length does not match policy dimensions");
  }
  for (int c : x.categories) {
    if (c < 1 || c > policy.categories()) {
      throw std::invalid_argument("solution category out of range: " + std::to_string(c));
    }
  }
}

}  // namespace detail

// Category probabilities of dimension j (0-based), max-shifted so that any
// finite logits give a proper distribution.
template <typename Scalar>
Column<Scalar> marginal(const SoftmaxPolicy<Scalar>& policy, Eigen::Index j) {
  if (j < 0 || j >= policy.dimensions()) {
    throw std::out_of_range("marginal: dimension index out of range");
  }
  const auto column = policy.theta().col(j);
  Column<Scalar> p = (column.array() - column.maxCoeff()).exp();
  return p / p.sum();
}

// All marginals at once, one column per dimension.
template <typename Scalar>
Table<Scalar> marginals(const SoftmaxPolicy<Scalar>& policy) {
  const auto& theta = policy.theta();
  Table<Scalar> p = (theta.rowwise() - theta.colwise().maxCoeff()).array().exp();
  return p.array().rowwise() / p.colwise().sum().array();
}

template <typename Scalar>
Solution sample(const SoftmaxPolicy<Scalar>& policy, Rng& rng) {
  const Table<Scalar> p = marginals(policy);
  Solution x(static_cast<std::size_t>(policy.dimensions()), 0);
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double u = uniform01(rng);
    double acc = 0.0;
    Eigen::Index chosen = p.rows() - 1;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      acc += static_cast<double>(p(i, j));
      if (u < acc) {
        chosen = i;
        break;
      }
    }
    x[static_cast<std::size_t>(j)] = static_cast<int>(chosen) + 1;
  }
  return x;
}

template <typename Scalar>
Scalar log_prob(const SoftmaxPolicy<Scalar>& policy, const Solution& x) {
  detail::check_solution(policy, x);
  const auto& theta = policy.theta();
  Scalar total = 0;
  for (Eigen::Index j = 0; j < theta.cols(); ++j) {
    total += theta(x[static_cast<std::size_t>(j)] - 1, j) - detail::log_sum_exp(theta.col(j));
  }
  return total;
}

// d log P(x) / d theta(i, j) = I[x_j = i] - P(x_j = i).
template <typename Scalar>
Table<Scalar> log_prob_gradient(const SoftmaxPolicy<Scalar>& policy, const Solution& x) {
  detail::check_solution(policy, x);
  Table<Scalar> grad = -marginals(policy);
  for (Eigen::Index j = 0; j < grad.cols(); ++j) {
    grad(x[static_cast<std::size_t>(j)] - 1, j) += Scalar(1);
  }
  return grad;
}

}  // namespace cakewalk
