#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace ccpwf::prob {

struct Atom {
  double value;
  double prob;
};

// Two values denote the same atom when they agree to 1e-12 relative.
bool same_atom_value(double a, double b);

// A finitely supported law. Atoms are kept sorted ascending by value, values
// equal under same_atom_value() are merged and zero-probability atoms dropped.
// Immutable after construction.
class DiscreteDistribution {
 public:
  static constexpr double kProbabilityTolerance = 1e-12;

  // Throws std::domain_error on negative/non-finite probabilities or when the
  // total mass differs from one by more than kProbabilityTolerance.
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  static DiscreteDistribution point_mass(double value);

  // Empirical law of equally weighted observations.
  static DiscreteDistribution from_samples(std::span<const double> values);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  // P(X <= s) and P(X < s).
  double cdf(double s) const;
  double cdf_strict(double s) const;

  double mean() const;
  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }

  // Law of f(X); the result is re-sorted and re-merged.
  template <class F>
  DiscreteDistribution map(F&& f) const {
    std::vector<Atom> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back({f(a.value), a.prob});
    return DiscreteDistribution(std::move(out));
  }

 private:
  std::vector<Atom> atoms_;
};

// JSON array of {"value": v, "prob": p} objects.
nlohmann::json to_json(const DiscreteDistribution& dist);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);

}  // namespace ccpwf::prob
