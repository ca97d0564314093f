#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cakewalk/policy.hpp"

namespace cakewalk {

enum class UpdateRule { Sga, AdaGrad, Adam };

inline std::string to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::Sga: return "sga";
    case UpdateRule::AdaGrad: return "adagrad";
    case UpdateRule::Adam: return "adam";
  }
  return "?";
}

inline UpdateRule parse_update_rule(std::string_view s) {
  if (s == "sga") return UpdateRule::Sga;
  if (s == "adagrad") return UpdateRule::AdaGrad;
  if (s == "adam") return UpdateRule::Adam;
  throw std::invalid_argument("unknown update rule: " + std::string(s));
}

struct UpdateConstants {
  double step_size = 0.01;
  double adagrad_delta = 1e-6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-6;
};

// Gradient addition rule with its accumulators. All rules ascend: the
// parameters move in the direction of the supplied gradient estimate.
template <typename Scalar = double>
class GradientAdder {
 public:
  GradientAdder(UpdateRule rule, Eigen::Index rows, Eigen::Index cols, UpdateConstants constants = {})
      : rule_(rule), constants_(constants) {
    if (!(constants_.step_size > 0)) {
      throw std::invalid_argument("step size must be positive");
    }
    if (rule_ == UpdateRule::AdaGrad) {
      squared_sum_ = Table<Scalar>::Zero(rows, cols);
    } else if (rule_ == UpdateRule::Adam) {
      first_moment_ = Table<Scalar>::Zero(rows, cols);
      second_moment_ = Table<Scalar>::Zero(rows, cols);
    }
    rows_ = rows;
    cols_ = cols;
  }

  template <typename Derived>
  void add(Table<Scalar>& theta, const Eigen::MatrixBase<Derived>& delta) {
    if (theta.rows() != rows_ || theta.cols() != cols_ || delta.rows() != rows_ ||
        delta.cols() != cols_) {
      throw std::invalid_argument("GradientAdder: shape mismatch");
    }
    const Scalar eta = static_cast<Scalar>(constants_.step_size);
    switch (rule_) {
      case UpdateRule::Sga:
        theta += eta * delta;
        break;
      case UpdateRule::AdaGrad: {
        squared_sum_.array() += delta.array().square();
        theta.array() += eta * delta.array() /
                         (squared_sum_.array().sqrt() + static_cast<Scalar>(constants_.adagrad_delta));
        break;
      }
      case UpdateRule::Adam: {
        const Scalar b1 = static_cast<Scalar>(constants_.beta1);
        const Scalar b2 = static_cast<Scalar>(constants_.beta2);
        ++steps_;
        first_moment_ = b1 * first_moment_ + (Scalar(1) - b1) * delta;
        second_moment_.array() = b2 * second_moment_.array() + (Scalar(1) - b2) * delta.array().square();
        const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(steps_));
        const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(steps_));
        theta.array() += eta * (first_moment_.array() / c1) /
                         ((second_moment_.array() / c2).sqrt() + static_cast<Scalar>(constants_.adam_epsilon));
        break;
      }
    }
  }

  UpdateRule rule() const { return rule_; }
  const UpdateConstants& constants() const { return constants_; }
  long steps() const { return steps_; }
  const Table<Scalar>& squared_sum() const { return squared_sum_; }

 private:
  UpdateRule rule_;
  UpdateConstants constants_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Table<Scalar> squared_sum_;
  Table<Scalar> first_moment_;
  Table<Scalar> second_moment_;
  long steps_ = 0;
};

}  // namespace cakewalk
