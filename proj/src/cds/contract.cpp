#include "ccpwf/cds/contract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ccpwf/errors.hpp"

namespace ccpwf::cds {

void CdsContract::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::domain_error("CDS intensity must be positive");
  if (!std::isfinite(kappa)) throw std::domain_error("CDS coupon must be finite");
  if (!(recovery >= 0.0 && recovery <= 1.0)) throw std::domain_error("CDS recovery must lie in [0,1]");
  if (!(inception < maturity)) throw std::domain_error("CDS inception must precede maturity");
}

CdsContract contract_from_json(const nlohmann::json& j) {
  CdsContract c;
  try {
    c.lambda = j.at("lambda").get<double>();
    c.kappa = j.value("kappa", c.kappa);
    c.recovery = j.value("recovery", c.recovery);
    c.inception = parse_date(j.at("inception").get<std::string>());
    c.maturity = parse_date(j.at("maturity").get<std::string>());
    c.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("contract: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("contract: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const CdsContract& c) {
  return {{"lambda", c.lambda},
          {"kappa", c.kappa},
          {"recovery", c.recovery},
          {"inception", format_date(c.inception)},
          {"maturity", format_date(c.maturity)}};
}

double pre_default_upfront_years(const CdsContract& c, double remaining_years) {
  if (remaining_years < 0.0) throw std::domain_error("negative remaining life");
  return std::expm1(-c.lambda * remaining_years) * (c.kappa - c.lambda * c.recovery) / c.lambda;
}

double remaining_life(const CdsContract& c, Date t) {
  if (t < c.inception || t > c.maturity) throw std::domain_error("date outside the contract life");
  return static_cast<double>((c.maturity - t).count()) / 365.0;
}

double pre_default_upfront(const CdsContract& c, Date t) {
  return pre_default_upfront_years(c, remaining_life(c, t));
}

double upfront(const CdsContract& c, Date t, bool defaulted) {
  const double v = pre_default_upfront(c, t);
  return defaulted ? 0.0 : v;
}

ValuationGrid::ValuationGrid(Date evaluation, int days_per_year)
    : eval_(evaluation), days_per_year_(days_per_year) {
  if (days_per_year < 1) throw std::domain_error("days per year must be positive");
}

double ValuationGrid::remaining_life(const CdsContract& c, int offset) const {
  const double life = cds::remaining_life(c, eval_);
  return std::max(0.0, life - static_cast<double>(offset) / days_per_year_);
}

double ValuationGrid::value(const CdsContract& c, int offset) const {
  return pre_default_upfront_years(c, remaining_life(c, offset));
}

double ValuationGrid::year_fraction(Date from, Date to) const {
  return static_cast<double>(business_days_between(from, to)) / days_per_year_;
}

double ValuationGrid::accrued_coupon(const CdsContract& c, int offset) const {
  const Date t = date(offset);
  return c.kappa * year_fraction(last_imm_on_or_before(t), t);
}

double ValuationGrid::coupons_due(const CdsContract& c, int from, int to) const {
  double total = 0.0;
  const Date lo = date(from);
  const Date hi = std::min(date(to), c.maturity);
  for (Date d = next_imm_after(lo); d <= hi; d = next_imm_after(d)) {
    if (d <= c.inception) continue;
    const Date prev = last_imm_on_or_before(d - std::chrono::days{1});
    total += c.kappa * year_fraction(std::max(prev, c.inception), d);
  }
  return total;
}

}  // namespace ccpwf::cds
