#include "ccpwf/migration/transition_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "ccpwf/errors.hpp"

namespace ccpwf::migration {

SparsityPattern SparsityPattern::standard(int rating_count) {
  SparsityPattern p;
  p.rating_count = rating_count;
  for (int x = 3; x <= rating_count - 1; ++x) p.default_from.push_back(x);
  return p;
}

bool SparsityPattern::allows(int from, int to) const {
  const int k = rating_count;
  if (from == k) return to == k;
  if (from == to) return true;
  if (to == k) return std::find(default_from.begin(), default_from.end(), from) != default_from.end();
  return std::abs(from - to) == 1;
}

RatingTransitionMatrix::RatingTransitionMatrix(int rating_count, std::vector<double> row_major)
    : k_(rating_count), p_(std::move(row_major)) {
  if (k_ < 2) throw std::domain_error("transition matrix needs at least two ratings");
  if (p_.size() != static_cast<std::size_t>(k_) * k_)
    throw std::domain_error("transition matrix: expected " + std::to_string(k_ * k_) + " entries");
  for (int x = 1; x <= k_; ++x) {
    double s = 0.0;
    for (int y = 1; y <= k_; ++y) {
      const double v = (*this)(x, y);
      if (!std::isfinite(v) || v < 0.0)
        throw std::domain_error("transition matrix: invalid entry in row " + std::to_string(x));
      s += v;
    }
    if (std::abs(s - 1.0) > kRowTolerance)
      throw std::domain_error("transition matrix: row " + std::to_string(x) + " sums to " +
                              std::to_string(s));
  }
  if ((*this)(k_, k_) != 1.0) throw std::domain_error("transition matrix: default state is not absorbing");
}

RatingTransitionMatrix RatingTransitionMatrix::identity(int rating_count) {
  std::vector<double> p(static_cast<std::size_t>(rating_count) * rating_count, 0.0);
  for (int i = 0; i < rating_count; ++i) p[i * rating_count + i] = 1.0;
  return RatingTransitionMatrix(rating_count, std::move(p));
}

RatingTransitionMatrix RatingTransitionMatrix::from_eigen(const Eigen::MatrixXd& m) {
  const int k = static_cast<int>(m.rows());
  std::vector<double> p(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) p[i * k + j] = m(i, j);
  return RatingTransitionMatrix(k, std::move(p));
}

Eigen::MatrixXd RatingTransitionMatrix::to_eigen() const {
  Eigen::MatrixXd m(k_, k_);
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) m(i, j) = p_[i * k_ + j];
  return m;
}

namespace {

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& a, int m) {
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd base = a;
  while (m > 0) {
    if (m & 1) result = result * base;
    base = base * base;
    m >>= 1;
  }
  return result;
}

// Stochastic matrices after float products drift by a few ulps; restore the
// row sums and the absorbing row before validation.
Eigen::MatrixXd renormalized(Eigen::MatrixXd m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = std::max(0.0, m(i, j));
    m.row(i) /= m.row(i).sum();
  }
  const auto k = m.rows() - 1;
  m.row(k).setZero();
  m(k, k) = 1.0;
  return m;
}

std::optional<Eigen::MatrixXd> eigen_root(const Eigen::MatrixXd& a, int m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXcd& lambda = es.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i).imag()) > 1e-12 || lambda(i).real() <= 0.0) return std::nullopt;
  }
  const Eigen::MatrixXd v = es.eigenvectors().real();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (!lu.isInvertible()) return std::nullopt;
  Eigen::VectorXd root_lambda(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    root_lambda(i) = std::pow(lambda(i).real(), 1.0 / m);
  Eigen::MatrixXd root = v * root_lambda.asDiagonal() * lu.inverse();
  return root;
}

}  // namespace

RatingTransitionMatrix RatingTransitionMatrix::power(int m) const {
  if (m < 0) throw std::domain_error("negative matrix power");
  return from_eigen(renormalized(matrix_power(to_eigen(), m)));
}

bool RatingTransitionMatrix::respects(const SparsityPattern& pattern, double tol) const {
  if (pattern.rating_count != k_) return false;
  for (int x = 1; x <= k_; ++x)
    for (int y = 1; y <= k_; ++y)
      if (!pattern.allows(x, y) && (*this)(x, y) > tol) return false;
  return true;
}

double max_abs_difference(const RatingTransitionMatrix& a, const RatingTransitionMatrix& b) {
  if (a.size() != b.size()) throw std::domain_error("matrix size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

CalibrationResult calibrate_daily(const RatingTransitionMatrix& annual, int m,
                                  const SparsityPattern& pattern) {
  if (m < 1) throw std::domain_error("calibrate_daily: m must be >= 1");
  if (pattern.rating_count != annual.size())
    throw std::domain_error("calibrate_daily: pattern size does not match matrix");
  const Eigen::MatrixXd a = annual.to_eigen();
  const int k = annual.size();

  std::string method = "eigen";
  Eigen::MatrixXd root;
  auto candidate = eigen_root(a, m);
  constexpr double kRootAcceptance = 1e-10;
  if (candidate && (matrix_power(*candidate, m) - a).cwiseAbs().maxCoeff() <= kRootAcceptance) {
    root = *candidate;
  } else {
    Eigen::MatrixPower<Eigen::MatrixXd> mp(a);
    root = mp(1.0 / m);
    method = "schur";
  }

  // Entries at rounding level are treated as zero.
  constexpr double kRootNoise = 1e-13;
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) {
      double& v = root(i, j);
      if (!std::isfinite(v) || v < kRootNoise || !pattern.allows(i + 1, j + 1)) v = 0.0;
      s += v;
    }
    if (!(s > 0.0)) {
      std::ostringstream msg;
      msg << "calibration failed: row " << (i + 1) << " of the root of order " << m
          << " vanished after projection (method " << method << ")";
      throw CalibrationError(msg.str());
    }
    root.row(i) /= s;
  }
  root.row(k - 1).setZero();
  root(k - 1, k - 1) = 1.0;

  CalibrationResult result{RatingTransitionMatrix::from_eigen(root), 0.0, method};
  result.reconstruction_error = (matrix_power(root, m) - a).cwiseAbs().maxCoeff();
  return result;
}

CalibrationResult calibrate_daily(const RatingTransitionMatrix& annual, int m) {
  return calibrate_daily(annual, m, SparsityPattern::standard(annual.size()));
}

RatingTransitionMatrix RatingFamily::annual_matrix() const {
  const int k = rating_count;
  if (static_cast<int>(default_rate.size()) != k - 1)
    throw std::domain_error("rating family: need one default rate per non-default rating");
  const auto pattern = SparsityPattern::standard(k);
  std::vector<double> p(static_cast<std::size_t>(k) * k, 0.0);
  auto at = [&](int x, int y) -> double& { return p[(x - 1) * k + (y - 1)]; };
  for (int x = 1; x < k; ++x) {
    const double j = default_rate[x - 1];
    if (j < 0.0) throw std::domain_error("rating family: negative default rate");
    if (j > 0.0 && !pattern.allows(x, k))
      throw std::domain_error("rating family: default not reachable from rating " + std::to_string(x));
    double moved = 0.0;
    if (x >= 2) {
      at(x, x - 1) = up;
      moved += up;
    }
    if (x + 1 < k) {
      at(x, x + 1) = down;
      moved += down;
    }
    at(x, k) = j;
    moved += j;
    if (moved > 1.0) throw std::domain_error("rating family: row " + std::to_string(x) + " exceeds one");
    at(x, x) = 1.0 - moved;
  }
  at(k, k) = 1.0;
  return RatingTransitionMatrix(k, std::move(p));
}

}  // namespace ccpwf::migration
