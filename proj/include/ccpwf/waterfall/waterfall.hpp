#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccpwf/prob/discrete_distribution.hpp"
#include "ccpwf/prob/risk_measures.hpp"
#include "json.hpp"

namespace ccpwf::waterfall {

enum class ImMethod {
  PosPart,   // rho(-(X)^+)
  PosOfRho,  // max(0, rho(-X))
};

enum class ExposureMode {
  Netted,      // liquidation value and dividends enter the exposure
  Regulatory,  // no recovery, no dividends
};

std::string to_string(ImMethod m);
std::string to_string(ExposureMode m);
ImMethod im_method_from_string(const std::string& s);
ExposureMode exposure_mode_from_string(const std::string& s);

// Tenors in business days.
struct Tenors {
  int delta_f = 1;   // margin call step
  int delta = 10;    // margin period of risk
  int period = 30;   // default fund call period
};

struct WaterfallConfig {
  double alpha_im = 0.01;
  double beta_df = 0.01;
  ImMethod im_method = ImMethod::PosPart;
  prob::RiskMeasureKind im_measure = prob::RiskMeasureKind::AVaR;
  double liquidation_recovery = 0.4;
  double skin_in_game = 0.0;
  Tenors tenors;
  ExposureMode exposure_mode = ExposureMode::Netted;
  // Per-member exposure cap; unset means 10x the book's long notional.
  std::optional<double> exposure_cap;

  // Throws std::domain_error on levels outside (0,1], a negative SG, a
  // recovery outside [0,1] or tenors that are not multiples of delta_f.
  void validate() const;
};

WaterfallConfig waterfall_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WaterfallConfig& c);

struct MemberAccounts {
  double vm = 0.0;
  double im = 0.0;
  double df_contribution = 0.0;
  double udf_call = 0.0;
  bool alive = true;
};

// Variation margin held at t_k: the portfolio value at the previous step.
double variation_margin(double member_value_prev);

// IM from the law of the member's cash flow X over the margin period.
double initial_margin(const prob::DiscreteDistribution& x_law, ImMethod method, const prob::RiskMeasureSpec& rho);
double initial_margin(const prob::DiscreteDistribution& x_law, const WaterfallConfig& cfg);

// Marks of a defaulted member's portfolio around its default date.
struct DefaultMarks {
  double value_after = 0.0;  // V at default + delta
  double dividends = 0.0;    // cash flows over [default, default + delta]
  double vm = 0.0;
  double im = 0.0;
};

// Summand inside the positive part, before capping:
//   Netted      (1 - R_liq) V + D - VM - IM
//   Regulatory  V - VM - IM
double exposure_summand(const DefaultMarks& m, double liquidation_recovery, ExposureMode mode);

// EP of one member over the period (period_start, period_end]: zero unless it
// defaults inside, else min(cap, summand^+).
double member_period_exposure(int default_time, int period_start, int period_end, const DefaultMarks& marks,
                              const WaterfallConfig& cfg, double cap);

// Loss left with the clearing house by one defaulted member before the
// mutualized layers: V - R_liq V - VM - IM (not floored).
double default_shortfall(const DefaultMarks& m, double liquidation_recovery);

// Per-member exposures over N equally weighted samples, stored sparsely.
class ExposureSamples {
 public:
  struct Entry {
    std::size_t sample;
    int member;
    double ep;
  };

  ExposureSamples(int members, std::size_t sample_count);
  // Dense input: rows are samples, columns members.
  static ExposureSamples from_dense(const std::vector<std::vector<double>>& rows);

  // Entries must arrive in nondecreasing sample order; zero values are
  // dropped. Throws std::domain_error on negative or out-of-range input.
  void add(std::size_t sample, int member, double ep);

  int members() const { return members_; }
  std::size_t sample_count() const { return n_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Samples [begin, end) renumbered from zero.
  ExposureSamples slice(std::size_t begin, std::size_t end) const;

  // Aggregate exposure of each sample holding a nonzero entry, in sample order.
  std::vector<std::pair<std::size_t, double>> totals() const;

 private:
  int members_;
  std::size_t n_;
  std::vector<Entry> entries_;
};

struct DefaultFundResult {
  double total = 0.0;
  std::vector<double> allocation;
  // Lower beta-quantile of -sum EP and the tie weight on it.
  double quantile = 0.0;
  double epsilon = 0.0;
};

// DF = AVaR_beta(-sum_i EP^i) over the empirical law; DF^i = E[Z* EP^i] with
// Z* the extreme density of the aggregate, tied samples on the quantile
// sharing the boundary weight equally. Throws std::domain_error when no
// samples are present.
DefaultFundResult default_fund(const ExposureSamples& samples, double beta);

// (sum of shortfalls - SG - DF)^+.
double effective_loss(std::span<const double> shortfalls, double skin_in_game, double df_total);

// Pro-rata assessment of `el` over surviving members' DF contributions,
// 0/0 = 0.
std::vector<double> unfunded_df(double el, std::span<const double> df_contributions,
                                const std::vector<bool>& alive);

}  // namespace ccpwf::waterfall
