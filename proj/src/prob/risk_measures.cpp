#include "ccpwf/prob/risk_measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccpwf::prob {
namespace {

void require_open_level(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error(std::string(who) + ": level must lie in (0,1)");
}

}  // namespace

double lower_quantile(const DiscreteDistribution& dist, double alpha) {
  require_open_level(alpha, "lower_quantile");
  double cum = 0.0;
  for (const auto& a : dist.atoms()) {
    cum += a.prob;
    if (cum >= alpha) return a.value;
  }
  return dist.max_value();
}

double upper_quantile(const DiscreteDistribution& dist, double alpha) {
  require_open_level(alpha, "upper_quantile");
  double cum = 0.0;
  for (const auto& a : dist.atoms()) {
    cum += a.prob;
    if (cum > alpha) return a.value;
  }
  return dist.max_value();
}

double value_at_risk(const DiscreteDistribution& dist, double alpha) {
  require_open_level(alpha, "value_at_risk");
  // Ascending cash-flow order is descending loss order.
  double cum = 0.0;
  for (const auto& a : dist.atoms()) {
    cum += a.prob;
    if (cum > alpha) return -a.value;
  }
  return -dist.max_value();
}

double average_value_at_risk(const DiscreteDistribution& dist, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("average_value_at_risk: level must lie in (0,1]");
  if (alpha == 1.0) return -dist.mean();
  double cum = 0.0;
  double acc = 0.0;
  for (const auto& a : dist.atoms()) {
    if (cum + a.prob > alpha) {
      acc += -a.value * (alpha - cum);
      return acc / alpha;
    }
    acc += -a.value * a.prob;
    cum += a.prob;
  }
  // Total mass fell short of alpha by rounding; the top atom takes the rest.
  acc += -dist.max_value() * (alpha - cum);
  return acc / alpha;
}

double entropic_risk(const DiscreteDistribution& dist, double alpha) {
  require_open_level(alpha, "entropic_risk");
  double shift = -alpha * dist.min_value();
  double s = 0.0;
  for (const auto& a : dist.atoms()) s += a.prob * std::exp(-alpha * a.value - shift);
  return (shift + std::log(s)) / alpha;
}

ExtremeDensity extreme_density(const DiscreteDistribution& dist, double alpha) {
  ExtremeDensity z;
  z.alpha = alpha;
  z.quantile = lower_quantile(dist, alpha);
  double below = 0.0;
  double at = 0.0;
  for (const auto& a : dist.atoms()) {
    if (a.value < z.quantile && !same_atom_value(a.value, z.quantile)) below += a.prob;
    else if (same_atom_value(a.value, z.quantile)) at += a.prob;
  }
  z.epsilon = at > 0.0 ? (alpha - below) / at : 0.0;
  z.epsilon = std::clamp(z.epsilon, 0.0, 1.0);
  z.weights.reserve(dist.size());
  for (const auto& a : dist.atoms()) {
    double w = 0.0;
    if (same_atom_value(a.value, z.quantile)) w = z.epsilon / alpha;
    else if (a.value < z.quantile) w = 1.0 / alpha;
    z.weights.push_back(w);
  }
  return z;
}

bool is_feasible_density(const DiscreteDistribution& dist, std::span<const double> weights,
                         double alpha, double tol) {
  if (weights.size() != dist.size()) return false;
  double mass = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < -tol || weights[i] > 1.0 / alpha + tol) return false;
    mass += weights[i] * dist[i].prob;
  }
  return std::abs(mass - 1.0) <= tol;
}

double expectation_under_density(std::span<const double> values, const DiscreteDistribution& dist,
                                 std::span<const double> weights) {
  if (values.size() != dist.size() || weights.size() != dist.size())
    throw std::domain_error("expectation_under_density: length mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) e += values[i] * weights[i] * dist[i].prob;
  return e;
}

double expectation_under_density(std::span<const double> values, const DiscreteDistribution& dist,
                                 const ExtremeDensity& z) {
  return expectation_under_density(values, dist, z.weights);
}

void RiskMeasureSpec::validate() const {
  switch (kind) {
    case RiskMeasureKind::AVaR:
      if (!(level > 0.0 && level <= 1.0)) throw std::domain_error("AVaR level must lie in (0,1]");
      break;
    case RiskMeasureKind::VaR:
    case RiskMeasureKind::Entropic:
      require_open_level(level, kind == RiskMeasureKind::VaR ? "VaR" : "entropic");
      break;
  }
}

double RiskMeasureSpec::evaluate(const DiscreteDistribution& dist) const {
  validate();
  switch (kind) {
    case RiskMeasureKind::VaR: return value_at_risk(dist, level);
    case RiskMeasureKind::AVaR: return average_value_at_risk(dist, level);
    case RiskMeasureKind::Entropic: return entropic_risk(dist, level);
  }
  throw std::logic_error("unknown risk measure kind");
}

std::string to_string(RiskMeasureKind kind) {
  switch (kind) {
    case RiskMeasureKind::VaR: return "VAR";
    case RiskMeasureKind::AVaR: return "AVAR";
    case RiskMeasureKind::Entropic: return "ENTROPIC";
  }
  return "?";
}

RiskMeasureKind risk_measure_kind_from_string(const std::string& s) {
  if (s == "VAR") return RiskMeasureKind::VaR;
  if (s == "AVAR") return RiskMeasureKind::AVaR;
  if (s == "ENTROPIC") return RiskMeasureKind::Entropic;
  throw std::invalid_argument("unknown risk measure '" + s + "'");
}

}  // namespace ccpwf::prob
