#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ccpwf/cds/contract.hpp"
#include "ccpwf/io/csv.hpp"
#include "ccpwf/prob/discrete_distribution.hpp"

namespace ccpwf::cds {

// Two-point law of one contract's cash flow over the margin period
// [t_k, t_k + delta], conditional on the reference name being alive at t_k.
struct ExposureLaw {
  double survival_value = 0.0;
  double survival_prob = 1.0;
  double default_value = 0.0;
  double default_prob = 0.0;

  prob::DiscreteDistribution distribution() const;
};

// Survival: S(t_k + delta) - coupons due in (t_k, t_k + delta] - S(t_k - 1).
// Default:  R - coupon accrued at t_k - S(t_k - 1).
// Survival probability exp(-lambda delta). The grid is anchored at t_k.
ExposureLaw margin_period_exposure(const CdsContract& c, const ValuationGrid& grid, int delta);
ExposureLaw margin_period_exposure(const CdsContract& c, Date t_k, int delta);

// Law of sum_j h_j * S_j for independent contract laws, by enumeration of
// the 2^J survival/default outcomes.
prob::DiscreteDistribution portfolio_exposure_law(std::span<const double> positions,
                                                  std::span<const ExposureLaw> laws);

enum class LossTransform {
  NegPosPart,  // v -> -max(v, 0)
  Neg,         // v -> -v
};

prob::DiscreteDistribution loss_transform(const prob::DiscreteDistribution& dist, LossTransform mode);

// Member-by-contract positions of the clearing house; positive entries buy
// protection. Every column must sum to zero (matched book).
class PositionMatrix {
 public:
  // Throws ConfigError on a shape mismatch or an unmatched column.
  PositionMatrix(int members, int contracts, std::vector<double> row_major);

  static PositionMatrix from_table(const io::NumericTable& rows);
  static PositionMatrix read_csv(const std::filesystem::path& path);
  // Named presets "balanced" and "unbalanced" (8 members, 4 contracts).
  static PositionMatrix preset(const std::string& name);

  int members() const { return members_; }
  int contracts() const { return contracts_; }
  double operator()(int member, int contract) const { return h_[member * contracts_ + contract]; }
  std::span<const double> row(int member) const {
    return {h_.data() + static_cast<std::size_t>(member) * contracts_, static_cast<std::size_t>(contracts_)};
  }
  const std::vector<double>& data() const { return h_; }

  // Largest |column sum|.
  double column_imbalance() const;
  // Sum of positive entries.
  double long_notional() const;

  // Book with `members` rows: row r copies row (r mod n) of this book and the
  // last row is reset so every column sums to zero. Needs members >= 2.
  PositionMatrix replicated(int members) const;

 private:
  int members_;
  int contracts_;
  std::vector<double> h_;
};

}  // namespace ccpwf::cds
