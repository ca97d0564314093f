#include "cakewalk/optimizer.hpp"

#include <cmath>
#include <string>

namespace cakewalk {

EmaConvergence::EmaConvergence(EmaSettings settings) : settings_(settings) {
  if (!(settings_.decay > 0.0 && settings_.decay < 1.0) || !(settings_.horizon > 0.0)) {
    throw std::invalid_argument("EmaConvergence: need 0 < a < 1 and b > 0");
  }
  fast_rate_ = time_constant(settings_.decay, settings_.horizon);
  slow_rate_ = time_constant(settings_.decay, 2.0 * settings_.horizon);
  warm_up_ = static_cast<std::size_t>(std::ceil(2.0 * settings_.horizon));
}

double EmaConvergence::time_constant(double decay, double horizon) {
  return 1.0 - std::exp(std::log(decay) / horizon);
}

bool EmaConvergence::within_threshold() const {
  const double scale = std::max(std::abs(slow_), 1e-12);
  return std::abs(fast_ - slow_) / scale < settings_.threshold;
}

bool EmaConvergence::update(double y) {
  if (samples_ == 0) {
    fast_ = y;
    slow_ = y;
  } else {
    fast_ += fast_rate_ * (y - fast_);
    slow_ += slow_rate_ * (y - slow_);
  }
  ++samples_;
  return samples_ >= warm_up_ && within_threshold();
}

std::size_t RunConfig::window_capacity() const {
  if (window > 0) return window;
  return static_cast<std::size_t>(std::max(1.0, std::round(1.0 / constants.step_size)));
}

void RunConfig::validate() const {
  if (budget < 1) throw std::invalid_argument("RunConfig: budget must be >= 1");
  if (!(constants.step_size > 0.0)) throw std::invalid_argument("RunConfig: step size must be positive");
  if (!(exp3_gamma > 0.0 && exp3_gamma <= 1.0)) throw std::invalid_argument("RunConfig: exp3 gamma must lie in (0, 1]");
}

namespace {

double evaluate(const Objective& objective, const Solution& x, std::size_t t) {
  try {
    return objective(x);
  } catch (const std::exception& e) {
    throw EvaluationError("objective failed at evaluation " + std::to_string(t) + ": " + e.what());
  }
}

// Keeps the first sample attaining the running maximum.
struct BestTracker {
  Solution x;
  double y = 0.0;
  std::size_t index = 0;

  void observe(const Solution& candidate, double value, std::size_t t) {
    if (index == 0 || value > y) {
      x = candidate;
      y = value;
      index = t;
    }
  }
};

}  // namespace

RunResult cakewalk_run(const Objective& objective, SoftmaxPolicy<double> policy, const RunConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t k = config.window_capacity();
  ObjectiveHistory history(k);
  GradientAdder<double> adder(config.rule, policy.categories(), policy.dimensions(), config.constants);
  std::optional<EmaConvergence> ema;
  if (config.convergence) ema.emplace(*config.convergence);

  RunResult result;
  result.seed = config.seed;
  BestTracker best;
  std::size_t t = 0;
  while (t < config.budget) {
    ++t;
    const Solution x = sample(policy, rng);
    const double y = evaluate(objective, x, t);
    best.observe(x, y, t);

    double w = 0.0;
    const bool update = t > k;
    if (update) {
      w = weight(config.surrogate, history, y);
      adder.add(policy.theta(), w * log_prob_gradient(policy, x));
    }
    history.push(y);
    if (config.record_trace) result.trace.push_back({y, w, update});
    if (ema && ema->update(y)) {
      result.converged = true;
      break;
    }
  }

  result.best_x = std::move(best.x);
  result.best_y = best.y;
  result.best_sample_index = best.index;
  result.total_evaluations = t;
  result.final_theta = policy.theta();
  return result;
}

Table<double> exp3_probabilities(const Table<double>& log_weights, double gamma) {
  const Table<double> soft = marginals(SoftmaxPolicy<double>(log_weights));
  return ((1.0 - gamma) * soft.array() + gamma / static_cast<double>(log_weights.rows())).matrix();
}

RunResult exp3_run(const Objective& objective, Eigen::Index categories, Eigen::Index dimensions,
                   const RunConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const double gamma = config.exp3_gamma;
  Table<double> log_weights = Table<double>::Zero(categories, dimensions);

  // Plain ascent with step gamma/M is exactly the textbook Exp3 weight
  // update; the adaptive rules act on the same importance-weighted gains.
  UpdateConstants constants = config.constants;
  if (config.rule == UpdateRule::Sga) constants.step_size = gamma / static_cast<double>(categories);
  GradientAdder<double> adder(config.rule, categories, dimensions, constants);
  std::optional<EmaConvergence> ema;
  if (config.convergence) ema.emplace(*config.convergence);

  RunResult result;
  result.seed = config.seed;
  BestTracker best;
  std::size_t t = 0;
  Solution x(static_cast<std::size_t>(dimensions), 1);
  Table<double> gains = Table<double>::Zero(categories, dimensions);
  while (t < config.budget) {
    ++t;
    const Table<double> p = exp3_probabilities(log_weights, gamma);
    for (Eigen::Index j = 0; j < dimensions; ++j) {
      const double u = uniform01(rng);
      double acc = 0.0;
      Eigen::Index arm = categories - 1;
      for (Eigen::Index i = 0; i < categories; ++i) {
        acc += p(i, j);
        if (u < acc) {
          arm = i;
          break;
        }
      }
      x[static_cast<std::size_t>(j)] = static_cast<int>(arm) + 1;
    }
    const double y = evaluate(objective, x, t);
    if (!(y >= 0.0 && y <= 1.0)) {
      throw BoundedGainError("exp3: gain " + std::to_string(y) + " outside [0, 1] at evaluation " +
                             std::to_string(t));
    }
    best.observe(x, y, t);

    gains.setZero();
    for (Eigen::Index j = 0; j < dimensions; ++j) {
      const Eigen::Index arm = x[static_cast<std::size_t>(j)] - 1;
      gains(arm, j) = y / p(arm, j);
    }
    adder.add(log_weights, gains);
    if (config.record_trace) result.trace.push_back({y, y, true});
    if (ema && ema->update(y)) {
      result.converged = true;
      break;
    }
  }

  result.best_x = std::move(best.x);
  result.best_y = best.y;
  result.best_sample_index = best.index;
  result.total_evaluations = t;
  result.final_theta = std::move(log_weights);
  return result;
}

}  // namespace cakewalk
