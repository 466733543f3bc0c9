#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ccpwf/cds/exposure.hpp"
#include "ccpwf/prob/discrete_distribution.hpp"
#include "ccpwf/simulation/config.hpp"

namespace ccpwf::sim {

// ---- reference names --------------------------------------------------------

struct ReferenceDefaults {
  static constexpr int kNoDefault = std::numeric_limits<int>::max();

  int contracts = 0;
  int paths = 0;
  // Default day (business-day offset from the evaluation date) of contract j
  // on path r at [r * contracts + j]; kNoDefault beyond the horizon.
  std::vector<int> day;

  int at(int path, int contract) const { return day[static_cast<std::size_t>(path) * contracts + contract]; }
};

// phi_j = E_j / lambda_j in years, rounded up to the delta_f grid of
// business days. Path r draws from the ReferenceDefaults stream, substream r.
ReferenceDefaults sample_reference_defaults(const std::vector<cds::CdsContract>& contracts, int horizon_days,
                                            int count, std::uint64_t seed, int days_per_year = 252,
                                            int delta_f = 1);

// ---- initial margin ----------------------------------------------------------

// VaR is constant and equal to `value` for levels in [alpha_from, alpha_to).
struct VarStep {
  double alpha_from = 0.0;
  double alpha_to = 0.0;
  double value = 0.0;
};

std::vector<VarStep> var_steps(const prob::DiscreteDistribution& loss_law);

struct ImPortfolioReport {
  std::string name;
  std::vector<double> positions;
  prob::DiscreteDistribution exposure_law = prob::DiscreteDistribution::point_mass(0.0);  // law of X
  prob::DiscreteDistribution loss_law = prob::DiscreteDistribution::point_mass(0.0);      // law of -(X)^+
  std::vector<VarStep> var_plateaus;
};

struct ImRow {
  std::string portfolio;
  double alpha = 0.0;
  prob::RiskMeasureKind measure = prob::RiskMeasureKind::AVaR;
  waterfall::ImMethod method = waterfall::ImMethod::PosPart;
  double im = 0.0;
};

struct ImStudyResult {
  std::vector<cds::ExposureLaw> contract_laws;
  std::vector<ImPortfolioReport> portfolios;
  std::vector<ImRow> rows;
};

// Exact IM from the closed-form exposure laws at the evaluation date, for the
// configured IM portfolios followed by every member of the book ("member_<i>"),
// over the alpha grid, VaR and AVaR, and both IM methods. VaR rows are
// skipped at alpha = 1.
ImStudyResult run_im_study(const ExperimentConfig& cfg);

// IM of each member of `positions` at level alpha with the configured measure
// and method.
std::vector<double> member_initial_margins(const ExperimentConfig& cfg, const cds::PositionMatrix& positions,
                                           double alpha);

// ---- default fund ------------------------------------------------------------

struct CoverStats {
  double cover1 = 1.0;
  double cover2 = 1.0;
  double cover_all = 1.0;
  double self_cover1 = 1.0;
  double self_cover2 = 1.0;
};

struct DfCell {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> im;
  double im_total = 0.0;
  double df_total = 0.0;
  double df_se = 0.0;  // batch means
  double ratio = 0.0;  // df_total / im_total
  double ratio_se = 0.0;
  std::vector<double> df_allocation;
  CoverStats covers;
  double c1 = 0.0;
  double c2 = 0.0;
  double c1_ratio = 0.0;
  double c2_ratio = 0.0;
  double mean_effective_loss = 0.0;
  double prob_effective_loss = 0.0;
  std::vector<double> mean_udf;
  // Identity diagnostics.
  double allocation_error = 0.0;  // |sum DF^i - DF|
  double udf_error = 0.0;         // max |sum uDF - EL| over loss events with survivors
  double exposed_fraction = 0.0;  // share of samples with positive aggregate EP
};

struct DfScenario {
  migration::Dependence dependence = migration::Dependence::TypeI;
  std::string initial;
  int members = 0;
  std::size_t samples = 0;
  double member_default_fraction = 0.0;  // migration paths with a default in the period
  double matched_book_error = 0.0;       // max |sum_i V^i| over all marks
  bool ratio_nonincreasing_in_beta = true;
  std::vector<DfCell> cells;              // alpha-major, beta-minor
};

struct StudyResult {
  std::vector<DfScenario> scenarios;
};

// One dependence type and initial state over the given grids, with the book
// `positions`.
DfScenario run_df_scenario(const ExperimentConfig& cfg, const cds::PositionMatrix& positions,
                           migration::Dependence dependence, const InitialState& initial,
                           const std::vector<double>& alphas, const std::vector<double>& betas);

// All configured dependence types x initial states over the alpha/beta grids.
StudyResult run_df_study(const ExperimentConfig& cfg);

// Means over samples of the largest member exposure (C1) and of the two
// largest (C2). Rows are samples.
std::pair<double, double> cover1_cover2_baseline(const std::vector<std::vector<double>>& ep_samples);

struct ScalingRow {
  int members = 0;
  double im_total = 0.0;
  double df_total = 0.0;
  double df_se = 0.0;
  double ratio = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c1_ratio = 0.0;
  double c2_ratio = 0.0;
};

// Replicates the scaling base to each member count (duplicates dropped,
// first occurrence kept) and reruns the DF computation at the scaling
// dependence, initial state, alpha and beta.
std::vector<ScalingRow> run_scaling_study(const ExperimentConfig& cfg, std::vector<int> counts);

}  // namespace ccpwf::sim
