#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccpwf/prob/discrete_distribution.hpp"

// Conditional quantiles and dynamic risk measures on finite laws.
//
// Sign convention: every risk measure below consumes the law of its argument
// as a cash flow, i.e. callers pass the law of -X or -(X)^+ and a negative
// cash flow carries positive risk. Conditioning on the current information is
// realized by handing in the conditional law itself.
namespace ccpwf::prob {

// q^-_alpha = sup{s : P(X < s) < alpha}. Requires 0 < alpha < 1.
double lower_quantile(const DiscreteDistribution& dist, double alpha);

// q^+_alpha = sup{s : P(X < s) <= alpha}. Requires 0 < alpha < 1.
double upper_quantile(const DiscreteDistribution& dist, double alpha);

// Scans atoms from the largest loss downwards and stops at the first index
// whose cumulative mass strictly exceeds alpha; returns that loss magnitude.
double value_at_risk(const DiscreteDistribution& dist, double alpha);

// Tail average of the alpha worst outcomes, alpha in (0, 1]. At alpha = 1 this
// is E[-X].
double average_value_at_risk(const DiscreteDistribution& dist, double alpha);

// (1/alpha) log E[exp(-alpha V)] for V distributed as dist, alpha in (0, 1).
// Evaluated with a max shift so large exposures do not overflow.
double entropic_risk(const DiscreteDistribution& dist, double alpha);

// Maximizing density of the AVaR robust representation, one weight per atom.
struct ExtremeDensity {
  std::vector<double> weights;
  double alpha = 1.0;
  // Atom weights 1/alpha below the quantile, epsilon/alpha on it.
  double quantile = 0.0;
  double epsilon = 0.0;
};

// Z* = (1/alpha)(1{X < q} + eps 1{X = q}) with q the lower alpha-quantile and
// eps = (alpha - P(X < q)) / P(X = q). Requires 0 < alpha < 1.
ExtremeDensity extreme_density(const DiscreteDistribution& dist, double alpha);

// True when 0 <= Z <= 1/alpha atomwise and E[Z] = 1 within tol.
bool is_feasible_density(const DiscreteDistribution& dist, std::span<const double> weights,
                         double alpha, double tol = 1e-10);

// sum_n values[n] * weights[n] * p_n, i.e. E[Z Y] for Y given atomwise.
double expectation_under_density(std::span<const double> values, const DiscreteDistribution& dist,
                                 std::span<const double> weights);
double expectation_under_density(std::span<const double> values, const DiscreteDistribution& dist,
                                 const ExtremeDensity& z);

enum class RiskMeasureKind { VaR, AVaR, Entropic };

struct RiskMeasureSpec {
  RiskMeasureKind kind = RiskMeasureKind::AVaR;
  double level = 0.01;

  // Throws std::domain_error when level is outside (0,1] (VaR/AVaR; VaR
  // additionally excludes 1) or (0,1) for the entropic measure.
  void validate() const;
  double evaluate(const DiscreteDistribution& dist) const;
};

std::string to_string(RiskMeasureKind kind);
RiskMeasureKind risk_measure_kind_from_string(const std::string& s);

}  // namespace ccpwf::prob
