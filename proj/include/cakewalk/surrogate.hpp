#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>

namespace cakewalk {

// Sliding window over the most recent objective values, evicted FIFO.
class ObjectiveHistory {
 public:
  explicit ObjectiveHistory(std::size_t capacity);

  void push(double y);

  std::size_t size() const { return values_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return values_.empty(); }
  bool full() const { return values_.size() == capacity_; }
  const std::deque<double>& values() const { return values_; }

  double mean() const;
  // Population (uncorrected) standard deviation.
  double stddev() const;

 private:
  std::size_t capacity_;
  std::deque<double> values_;
};

// Fraction of stored values strictly below y.
double ecdf(const ObjectiveHistory& history, double y);

class SurrogateKind {
 public:
  enum class Tag { Raw, Baseline, ZScore, Cdf, ScaledCdf, Oce };

  static SurrogateKind raw() { return SurrogateKind(Tag::Raw); }
  static SurrogateKind baseline() { return SurrogateKind(Tag::Baseline); }
  static SurrogateKind zscore() { return SurrogateKind(Tag::ZScore); }
  static SurrogateKind cdf() { return SurrogateKind(Tag::Cdf); }
  static SurrogateKind scaled_cdf() { return SurrogateKind(Tag::ScaledCdf); }
  static SurrogateKind oce(double rho);

  // Accepts raw, baseline, zscore, cdf, scaled_cdf, oce:<rho>.
  static SurrogateKind parse(std::string_view text);

  Tag tag() const { return tag_; }
  double rho() const { return rho_; }
  bool uses_history() const { return tag_ != Tag::Raw; }

  friend bool operator==(const SurrogateKind&, const SurrogateKind&) = default;

 private:
  explicit SurrogateKind(Tag tag, double rho = 0.0) : tag_(tag), rho_(rho) {}
  Tag tag_;
  double rho_;
};

std::string to_string(const SurrogateKind& kind);

// Scaling factor applied to the log-likelihood gradient of a sample with
// objective value y, given the window of preceding values.
double weight(const SurrogateKind& kind, const ObjectiveHistory& history, double y);

}  // namespace cakewalk
