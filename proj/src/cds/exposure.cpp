#include "ccpwf/cds/exposure.hpp"

#include <cmath>
#include <stdexcept>

#include "ccpwf/errors.hpp"

namespace ccpwf::cds {

prob::DiscreteDistribution ExposureLaw::distribution() const {
  return prob::DiscreteDistribution({{survival_value, survival_prob}, {default_value, default_prob}});
}

ExposureLaw margin_period_exposure(const CdsContract& c, const ValuationGrid& grid, int delta) {
  c.validate();
  if (delta < 1) throw std::domain_error("margin period must be at least one day");
  const Date t = grid.evaluation();
  if (t < c.inception || t > c.maturity) throw std::domain_error("evaluation date outside the contract life");
  const double prev = grid.value(c, -1);
  ExposureLaw law;
  law.survival_value = grid.value(c, delta) - grid.coupons_due(c, 0, delta) - prev;
  law.default_value = c.recovery - grid.accrued_coupon(c, 0) - prev;
  law.survival_prob = std::exp(-c.lambda * delta / grid.days_per_year());
  law.default_prob = -std::expm1(-c.lambda * delta / grid.days_per_year());
  return law;
}

ExposureLaw margin_period_exposure(const CdsContract& c, Date t_k, int delta) {
  return margin_period_exposure(c, ValuationGrid(t_k), delta);
}

prob::DiscreteDistribution portfolio_exposure_law(std::span<const double> positions,
                                                  std::span<const ExposureLaw> laws) {
  if (positions.size() != laws.size()) throw std::domain_error("portfolio_exposure_law: length mismatch");
  const std::size_t j = laws.size();
  if (j >= 30) throw std::domain_error("portfolio_exposure_law: too many contracts to enumerate");
  std::vector<prob::Atom> atoms;
  atoms.reserve(std::size_t{1} << j);
  for (std::size_t mask = 0; mask < (std::size_t{1} << j); ++mask) {
    double v = 0.0;
    double p = 1.0;
    for (std::size_t c = 0; c < j; ++c) {
      const bool dflt = (mask >> c) & 1U;
      v += positions[c] * (dflt ? laws[c].default_value : laws[c].survival_value);
      p *= dflt ? laws[c].default_prob : laws[c].survival_prob;
    }
    atoms.push_back({v, p});
  }
  return prob::DiscreteDistribution(std::move(atoms));
}

prob::DiscreteDistribution loss_transform(const prob::DiscreteDistribution& dist, LossTransform mode) {
  switch (mode) {
    case LossTransform::NegPosPart: return dist.map([](double v) { return 0.0 - std::max(v, 0.0); });
    case LossTransform::Neg: return dist.map([](double v) { return -v; });
  }
  throw std::logic_error("unknown loss transform");
}

PositionMatrix::PositionMatrix(int members, int contracts, std::vector<double> row_major)
    : members_(members), contracts_(contracts), h_(std::move(row_major)) {
  if (members < 1 || contracts < 1) throw ConfigError("position matrix needs at least one row and column");
  if (h_.size() != static_cast<std::size_t>(members) * contracts)
    throw ConfigError("position matrix: expected " + std::to_string(members * contracts) + " entries");
  for (double v : h_)
    if (!std::isfinite(v)) throw ConfigError("position matrix: non-finite entry");
  for (int c = 0; c < contracts_; ++c) {
    double sum = 0.0;
    double scale = 1.0;
    for (int i = 0; i < members_; ++i) {
      sum += (*this)(i, c);
      scale += std::abs((*this)(i, c));
    }
    if (std::abs(sum) > 1e-12 * scale)
      throw ConfigError("position matrix: column " + std::to_string(c + 1) + " sums to " + std::to_string(sum) +
                        ", the book must be matched");
  }
}

PositionMatrix PositionMatrix::from_table(const io::NumericTable& rows) {
  if (rows.empty()) throw ConfigError("position matrix: no rows");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ConfigError("position matrix: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return PositionMatrix(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), std::move(flat));
}

PositionMatrix PositionMatrix::read_csv(const std::filesystem::path& path) {
  return from_table(io::read_numeric_csv(path));
}

PositionMatrix PositionMatrix::preset(const std::string& name) {
  if (name == "balanced")
    return PositionMatrix(8, 4, {1,   -1, 1,  -1,  -1,  1,   -1, 1,  10, -1, -8, -1,  -1, 2,  -2, 1,
                                 -10, 5,  -5, 10,  -1,  -1,  -5, 7,  20, 10, 18, -48, -18, -15, 2, 31});
  if (name == "unbalanced")
    return PositionMatrix(8, 4, {1,    1,  1,    1,  10, -1, 10, -1, -1, 10, -1, 10, 100, -5, 100, -5,
                                 -110, -5, -110, -5, -1, -1, -1, -1, -2, -1, -6, -3, 3,   2,  7,   4});
  throw ConfigError("unknown position preset '" + name + "' (expected balanced or unbalanced)");
}

double PositionMatrix::column_imbalance() const {
  double worst = 0.0;
  for (int c = 0; c < contracts_; ++c) {
    double sum = 0.0;
    for (int i = 0; i < members_; ++i) sum += (*this)(i, c);
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

double PositionMatrix::long_notional() const {
  double s = 0.0;
  for (double v : h_) s += std::max(v, 0.0);
  return s;
}

PositionMatrix PositionMatrix::replicated(int members) const {
  if (members < 2) throw ConfigError("a matched book needs at least two members");
  std::vector<double> flat(static_cast<std::size_t>(members) * contracts_, 0.0);
  for (int r = 0; r + 1 < members; ++r)
    for (int c = 0; c < contracts_; ++c) flat[r * contracts_ + c] = (*this)(r % members_, c);
  for (int c = 0; c < contracts_; ++c) {
    double sum = 0.0;
    for (int r = 0; r + 1 < members; ++r) sum += flat[r * contracts_ + c];
    flat[(members - 1) * contracts_ + c] = -sum;
  }
  return PositionMatrix(members, contracts_, std::move(flat));
}

}  // namespace ccpwf::cds
