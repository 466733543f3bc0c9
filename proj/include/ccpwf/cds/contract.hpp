#pragma once

#include "ccpwf/cds/calendar.hpp"
#include "json.hpp"

namespace ccpwf::cds {

// Single-name CDS on unit notional with a standardized coupon and constant
// default intensity of the reference name.
struct CdsContract {
  double lambda = 0.0;    // per year
  double kappa = 0.01;    // coupon per year
  double recovery = 0.4;
  Date inception{};
  Date maturity{};

  // Throws std::domain_error unless lambda > 0, 0 <= R <= 1 and
  // inception < maturity.
  void validate() const;
};

CdsContract contract_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CdsContract& c);

// Pre-default upfront (protection buyer's side) for `remaining_years` of
// contract life: (exp(-lambda tau) - 1)(kappa - lambda R)/lambda.
double pre_default_upfront_years(const CdsContract& c, double remaining_years);

// Remaining life at a calendar date, ACT/365.
double remaining_life(const CdsContract& c, Date t);

// Throws std::domain_error when t lies outside [inception, maturity].
double pre_default_upfront(const CdsContract& c, Date t);
// Zero once the reference name has defaulted.
double upfront(const CdsContract& c, Date t, bool defaulted);

// Engine time axis anchored at an evaluation date. Offsets count business
// days and advance the clock by 1/days_per_year each; contract life at the
// anchor itself is measured ACT/365.
class ValuationGrid {
 public:
  explicit ValuationGrid(Date evaluation, int days_per_year = 252);

  Date evaluation() const { return eval_; }
  int days_per_year() const { return days_per_year_; }
  Date date(int offset) const { return add_business_days(eval_, offset); }

  // Remaining life at `offset`, floored at zero past maturity.
  double remaining_life(const CdsContract& c, int offset) const;
  // Pre-default value at `offset`.
  double value(const CdsContract& c, int offset) const;
  // Business-day year fraction between two dates.
  double year_fraction(Date from, Date to) const;

  // Coupon accrued from the last IMM date on or before date(offset).
  double accrued_coupon(const CdsContract& c, int offset) const;
  // Coupons falling due on IMM dates in (date(from), date(to)] while the
  // contract is alive; each pays kappa times its quarter's year fraction.
  double coupons_due(const CdsContract& c, int from, int to) const;

 private:
  Date eval_;
  int days_per_year_;
};

}  // namespace ccpwf::cds
