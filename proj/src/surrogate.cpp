#include "cakewalk/surrogate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cakewalk {

ObjectiveHistory::ObjectiveHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) {
    throw std::invalid_argument("ObjectiveHistory: capacity must be positive");
  }
}

void ObjectiveHistory::push(double y) {
  if (values_.size() == capacity_) {
    values_.pop_front();
  }
  values_.push_back(y);
}

double ObjectiveHistory::mean() const {
  if (values_.empty()) {
    throw std::logic_error("ObjectiveHistory: mean of empty window");
  }
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

double ObjectiveHistory::stddev() const {
  const double mu = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values_.size()));
}

double ecdf(const ObjectiveHistory& history, double y) {
  if (history.empty()) {
    throw std::logic_error("ecdf: empty history");
  }
  std::size_t below = 0;
  for (double v : history.values()) {
    if (v < y) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(history.size());
}

SurrogateKind SurrogateKind::oce(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("oce: rho must lie in (0, 1)");
  }
  return SurrogateKind(Tag::Oce, rho);
}

SurrogateKind SurrogateKind::parse(std::string_view text) {
  if (text == "raw") return raw();
  if (text == "baseline") return baseline();
  if (text == "zscore") return zscore();
  if (text == "cdf") return cdf();
  if (text == "scaled_cdf") return scaled_cdf();
  if (text.starts_with("oce:")) {
    const std::string number(text.substr(4));
    std::size_t used = 0;
    double rho = 0.0;
    try {
      rho = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size()) {
      throw std::invalid_argument("malformed oce level: " + std::string(text));
    }
    return oce(rho);
  }
  throw std::invalid_argument("unknown surrogate: " + std::string(text));
}

std::string to_string(const SurrogateKind& kind) {
  switch (kind.tag()) {
    case SurrogateKind::Tag::Raw: return "raw";
    case SurrogateKind::Tag::Baseline: return "baseline";
    case SurrogateKind::Tag::ZScore: return "zscore";
    case SurrogateKind::Tag::Cdf: return "cdf";
    case SurrogateKind::Tag::ScaledCdf: return "scaled_cdf";
    case SurrogateKind::Tag::Oce: {
      std::ostringstream os;
      os << "oce:" << kind.rho();
      return os.str();
    }
  }
  return "?";
}

double weight(const SurrogateKind& kind, const ObjectiveHistory& history, double y) {
  switch (kind.tag()) {
    case SurrogateKind::Tag::Raw:
      return y;
    case SurrogateKind::Tag::Baseline:
      return y - history.mean();
    case SurrogateKind::Tag::ZScore: {
      const double sigma = history.stddev();
      // A flat window carries no scale information.
      if (sigma < 1e-12) return 0.0;
      return (y - history.mean()) / sigma;
    }
    case SurrogateKind::Tag::Cdf:
      return ecdf(history, y);
    case SurrogateKind::Tag::ScaledCdf:
      return 2.0 * ecdf(history, y) - 1.0;
    case SurrogateKind::Tag::Oce:
      return ecdf(history, y) >= 1.0 - kind.rho() ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace cakewalk
