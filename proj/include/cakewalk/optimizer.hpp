#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cakewalk/grad_update.hpp"
#include "cakewalk/policy.hpp"
#include "cakewalk/surrogate.hpp"

namespace cakewalk {

using Objective = std::function<double(const Solution&)>;

// Raised when the black-box objective fails; the run is abandoned.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by exp3_run when an observed gain leaves [0, 1].
class BoundedGainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmaSettings {
  double horizon = 1000.0;  // b
  double decay = 0.01;      // a
  double threshold = 0.01;
};

// Two exponential moving averages of the objective with time constants
// 1 - exp(ln(a)/b) and 1 - exp(ln(a)/(2b)). Convergence is declared once
// |fast - slow| / |slow| drops below the threshold, but never before 2b
// samples have been seen (until then both averages still remember the seed).
class EmaConvergence {
 public:
  explicit EmaConvergence(EmaSettings settings = {});

  static double time_constant(double decay, double horizon);

  // Feeds one objective value; returns whether the run has converged.
  bool update(double y);

  double fast() const { return fast_; }
  double slow() const { return slow_; }
  double fast_rate() const { return fast_rate_; }
  double slow_rate() const { return slow_rate_; }
  std::size_t samples() const { return samples_; }
  std::size_t warm_up() const { return warm_up_; }
  bool within_threshold() const;

 private:
  EmaSettings settings_;
  double fast_rate_;
  double slow_rate_;
  std::size_t warm_up_;
  double fast_ = 0.0;
  double slow_ = 0.0;
  std::size_t samples_ = 0;
};

struct RunConfig {
  std::size_t budget = 1000;
  SurrogateKind surrogate = SurrogateKind::scaled_cdf();
  UpdateRule rule = UpdateRule::AdaGrad;
  UpdateConstants constants{};
  // 0 selects round(1 / step_size).
  std::size_t window = 0;
  std::uint64_t seed = 0;
  std::optional<EmaSettings> convergence;
  bool record_trace = false;
  double exp3_gamma = 0.1;

  std::size_t window_capacity() const;
  void validate() const;
};

struct TraceEntry {
  double y;
  double weight;
  bool updated;
};

struct RunResult {
  Solution best_x;
  double best_y = 0.0;
  std::size_t best_sample_index = 0;  // 1-based
  std::size_t total_evaluations = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  // Final logits (Cakewalk) or final log-weights (Exp3).
  Table<double> final_theta;
  std::vector<TraceEntry> trace;
};

// Online adaptive sampler: sample, evaluate, and once the window holds k
// values, push the log-likelihood of the sample by weight(y) through the
// configured addition rule.
RunResult cakewalk_run(const Objective& objective, SoftmaxPolicy<double> policy, const RunConfig& config);

// Arm probabilities of per-dimension Exp3 given its log-weights.
Table<double> exp3_probabilities(const Table<double>& log_weights, double gamma);

// Independent Exp3 learner per dimension sharing the gain f(x) in [0, 1].
RunResult exp3_run(const Objective& objective, Eigen::Index categories, Eigen::Index dimensions,
                   const RunConfig& config);

}  // namespace cakewalk
