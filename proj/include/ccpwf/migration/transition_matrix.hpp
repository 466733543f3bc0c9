#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccpwf::migration {

// Ratings are 1-based: 1 is the best grade and K (= rating_count) is default.
//
// Allowed one-step moves: neighbours x-1 and x+1, and a jump to K from any
// rating listed in default_from.
struct SparsityPattern {
  int rating_count = 8;
  std::vector<int> default_from;

  // Default reachable only from {3, ..., K-1}.
  static SparsityPattern standard(int rating_count);
  bool allows(int from, int to) const;
};

// Row-stochastic K x K matrix with absorbing default state K.
class RatingTransitionMatrix {
 public:
  static constexpr double kRowTolerance = 1e-12;

  // Throws std::domain_error unless every row is a probability vector and
  // row K is the unit vector e_K.
  RatingTransitionMatrix(int rating_count, std::vector<double> row_major);

  static RatingTransitionMatrix identity(int rating_count);
  static RatingTransitionMatrix from_eigen(const Eigen::MatrixXd& m);

  int size() const { return k_; }
  double operator()(int from, int to) const { return p_[(from - 1) * k_ + (to - 1)]; }
  std::span<const double> row(int from) const {
    return {p_.data() + static_cast<std::size_t>(from - 1) * k_, static_cast<std::size_t>(k_)};
  }
  const std::vector<double>& data() const { return p_; }

  Eigen::MatrixXd to_eigen() const;
  RatingTransitionMatrix power(int m) const;

  bool respects(const SparsityPattern& pattern, double tol = 0.0) const;

 private:
  int k_;
  std::vector<double> p_;
};

// Entrywise sup-norm distance.
double max_abs_difference(const RatingTransitionMatrix& a, const RatingTransitionMatrix& b);

struct CalibrationResult {
  RatingTransitionMatrix matrix;
  // max |P^m - annual| over entries.
  double reconstruction_error = 0.0;
  // "eigen" or "schur": which root was projected.
  std::string root_method;
};

// Solves P^m = annual for a stochastic P: principal m-th root via
// eigendecomposition (Schur-Pade real root when the spectrum is complex,
// non-positive or the eigenvectors are ill conditioned), then clip negatives,
// zero entries outside the pattern and renormalize rows.
// Throws CalibrationError when a row is clipped away entirely.
CalibrationResult calibrate_daily(const RatingTransitionMatrix& annual, int m,
                                  const SparsityPattern& pattern);
CalibrationResult calibrate_daily(const RatingTransitionMatrix& annual, int m);

// Documented annual matrix family: upgrade rate `up` from ratings 2..K-1,
// downgrade rate `down` to non-default neighbours, and per-rating default
// rates (index 0 is rating 1). Ratings outside the pattern's default_from
// must carry a zero default rate.
struct RatingFamily {
  int rating_count = 8;
  double up = 0.04;
  double down = 0.06;
  std::vector<double> default_rate = {0.0, 0.0, 0.0005, 0.0015, 0.004, 0.008, 0.015};

  RatingTransitionMatrix annual_matrix() const;
};

}  // namespace ccpwf::migration
