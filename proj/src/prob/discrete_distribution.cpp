#include "ccpwf/prob/discrete_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ccpwf::prob {

bool same_atom_value(double a, double b) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= 1e-12 * scale;
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::domain_error("DiscreteDistribution: no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value) || !std::isfinite(a.prob))
      throw std::domain_error("DiscreteDistribution: non-finite atom");
    if (a.prob < 0.0)
      throw std::domain_error("DiscreteDistribution: negative probability " + std::to_string(a.prob));
    total += a.prob;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance)
    throw std::domain_error("DiscreteDistribution: probabilities sum to " + std::to_string(total));

  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& x, const Atom& y) { return x.value < y.value; });
  atoms_.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (a.prob == 0.0) continue;
    // Merge against the first value of the current group so chains of
    // near-equal values cannot drift.
    if (!atoms_.empty() && same_atom_value(atoms_.back().value, a.value)) {
      atoms_.back().prob += a.prob;
    } else {
      atoms_.push_back(a);
    }
  }
  if (atoms_.empty()) throw std::domain_error("DiscreteDistribution: all atoms have zero mass");
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return DiscreteDistribution({{value, 1.0}});
}

DiscreteDistribution DiscreteDistribution::from_samples(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("DiscreteDistribution: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || !same_atom_value(sorted[start], sorted[i])) {
      atoms.push_back({sorted[start], static_cast<double>(i - start) / n});
      start = i;
    }
  }
  return DiscreteDistribution(std::move(atoms));
}

double DiscreteDistribution::cdf(double s) const {
  double c = 0.0;
  for (const auto& a : atoms_) {
    if (a.value > s) break;
    c += a.prob;
  }
  return c;
}

double DiscreteDistribution::cdf_strict(double s) const {
  double c = 0.0;
  for (const auto& a : atoms_) {
    if (a.value >= s) break;
    c += a.prob;
  }
  return c;
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.value * a.prob;
  return m;
}

nlohmann::json to_json(const DiscreteDistribution& dist) {
  auto arr = nlohmann::json::array();
  for (const auto& a : dist.atoms()) arr.push_back({{"value", a.value}, {"prob", a.prob}});
  return arr;
}

DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::domain_error("distribution JSON must be an array");
  std::vector<Atom> atoms;
  for (const auto& item : j) atoms.push_back({item.at("value").get<double>(), item.at("prob").get<double>()});
  return DiscreteDistribution(std::move(atoms));
}

}  // namespace ccpwf::prob
