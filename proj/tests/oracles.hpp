#pragma once

// Reference computations for the tests. They work on raw (value, prob) lists
// and share no code with the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ccpwf/prob/discrete_distribution.hpp"

namespace oracle {

struct Point {
  double value;
  double prob;
};
using Law = std::vector<Point>;

inline Law sorted(Law law) {
  std::sort(law.begin(), law.end(), [](const Point& a, const Point& b) { return a.value < b.value; });
  Law out;
  for (const auto& p : law) {
    if (!out.empty() && out.back().value == p.value)
      out.back().prob += p.prob;
    else
      out.push_back(p);
  }
  return out;
}

inline Law law_of(const ccpwf::prob::DiscreteDistribution& d) {
  Law out;
  for (const auto& a : d.atoms()) out.push_back({a.value, a.prob});
  return out;
}

inline ccpwf::prob::DiscreteDistribution to_distribution(const Law& law) {
  std::vector<ccpwf::prob::Atom> atoms;
  for (const auto& p : law) atoms.push_back({p.value, p.prob});
  return ccpwf::prob::DiscreteDistribution(std::move(atoms));
}

// P(X <= s) by a full scan.
inline double cdf(const Law& law, double s) {
  double c = 0.0;
  for (const auto& p : law)
    if (p.value <= s) c += p.prob;
  return c;
}

inline double cdf_strict(const Law& law, double s) {
  double c = 0.0;
  for (const auto& p : law)
    if (p.value < s) c += p.prob;
  return c;
}

// Smallest atom x with P(X <= x) >= alpha.
inline double lower_quantile(const Law& law, double alpha) {
  const Law s = sorted(law);
  for (const auto& p : s)
    if (cdf(s, p.value) >= alpha) return p.value;
  return s.back().value;
}

// Smallest atom x with P(X <= x) > alpha.
inline double upper_quantile(const Law& law, double alpha) {
  const Law s = sorted(law);
  for (const auto& p : s)
    if (cdf(s, p.value) > alpha) return p.value;
  return s.back().value;
}

// Losses x_n = -value sorted descending; n_alpha is the first index whose
// cumulative mass exceeds alpha.
//   AVaR = (1/alpha) (sum_{n < n_alpha} x_n p_n + x_{n_alpha} (alpha - sum_{n < n_alpha} p_n))
inline double avar_descending(const Law& law, double alpha) {
  const Law s = sorted(law);  // ascending value is descending loss
  double before = 0.0;
  double acc = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    const double loss = -s[n].value;
    if (before + s[n].prob > alpha || n + 1 == s.size()) return (acc + loss * (alpha - before)) / alpha;
    acc += loss * s[n].prob;
    before += s[n].prob;
  }
  return 0.0;
}

// (1/alpha) int_0^alpha VaR_b db by the midpoint rule on `nodes` points, with
// VaR_b the loss of the first descending atom whose cumulative mass exceeds b.
inline double avar_riemann(const Law& law, double alpha, std::size_t nodes) {
  const Law s = sorted(law);
  std::vector<double> loss;
  std::vector<double> cum;
  double c = 0.0;
  for (const auto& p : s) {
    c += p.prob;
    loss.push_back(-p.value);
    cum.push_back(c);
  }
  const double h = alpha / static_cast<double>(nodes);
  double sum = 0.0;
  std::size_t k = 0;
  for (std::size_t m = 0; m < nodes; ++m) {
    const double b = (static_cast<double>(m) + 0.5) * h;
    while (k + 1 < cum.size() && !(cum[k] > b)) ++k;
    sum += loss[k];
  }
  return sum * h / alpha;
}

// Random finite law with up to `max_atoms` atoms. Values sometimes sit on a
// coarse lattice so that ties and repeated quantile atoms show up.
inline Law random_law(std::mt19937_64& rng, int max_atoms) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coarse(0.3);
  const int n = count(rng);
  const bool lattice = coarse(rng);
  Law law;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = normal(rng);
    if (lattice) v = std::round(v * 4.0) / 4.0;
    const double p = expo(rng);
    law.push_back({v, p});
    total += p;
  }
  for (auto& p : law) p.prob /= total;
  return sorted(law);
}

// Vertex of the feasible set {0 <= Z <= 1/alpha, E[Z] = 1}: fill atoms in a
// random order at 1/alpha until the mass alpha is spent.
inline std::vector<double> random_extreme_density(const Law& law, double alpha, std::mt19937_64& rng) {
  std::vector<std::size_t> order(law.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> z(law.size(), 0.0);
  double left = alpha;
  for (std::size_t i : order) {
    const double take = std::min(left, law[i].prob);
    z[i] = take / (alpha * law[i].prob);
    left -= take;
    if (left <= 0.0) break;
  }
  return z;
}

// Convex mixture of a few random vertices.
inline std::vector<double> random_feasible_density(const Law& law, double alpha, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> parts(1, 4);
  std::exponential_distribution<double> expo(1.0);
  const int k = parts(rng);
  std::vector<double> w(k);
  double tw = 0.0;
  for (auto& x : w) tw += (x = expo(rng));
  std::vector<double> z(law.size(), 0.0);
  for (int j = 0; j < k; ++j) {
    const auto v = random_extreme_density(law, alpha, rng);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += w[j] / tw * v[i];
  }
  return z;
}

// Law of sum_j h_j S_j over independent two-point contract laws, by visiting
// all 2^J outcomes and merging values within `tol`.
inline Law portfolio_law(const std::vector<double>& h, const std::vector<Point>& survive,
                         const std::vector<Point>& dflt, double tol = 1e-12) {
  const std::size_t j = h.size();
  Law raw;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << j); ++mask) {
    double v = 0.0;
    double p = 1.0;
    for (std::size_t c = 0; c < j; ++c) {
      const Point& o = (mask >> c) & 1 ? dflt[c] : survive[c];
      v += h[c] * o.value;
      p *= o.prob;
    }
    raw.push_back({v, p});
  }
  std::sort(raw.begin(), raw.end(), [](const Point& a, const Point& b) { return a.value < b.value; });
  Law out;
  for (const auto& r : raw) {
    if (!out.empty() && std::abs(out.back().value - r.value) <= tol * (1.0 + std::abs(r.value)))
      out.back().prob += r.prob;
    else
      out.push_back(r);
  }
  Law kept;
  for (const auto& o : out)
    if (o.prob > 0.0) kept.push_back(o);
  return kept;
}

// Random daily transition matrix on K ratings respecting the neighbour
// pattern, with default reachable only from 3..K-1. Row-major, 0-based.
inline std::vector<double> random_daily_matrix(std::mt19937_64& rng, int k, double max_move) {
  std::uniform_real_distribution<double> u(0.0, max_move);
  std::vector<double> p(static_cast<std::size_t>(k) * k, 0.0);
  for (int x = 1; x < k; ++x) {
    double moved = 0.0;
    auto put = [&](int to, double v) {
      p[(x - 1) * k + (to - 1)] = v;
      moved += v;
    };
    if (x >= 2) put(x - 1, u(rng));
    if (x + 1 < k) put(x + 1, u(rng));
    if (x >= 3) put(k, 0.5 * u(rng));
    p[(x - 1) * k + (x - 1)] = 1.0 - moved;
  }
  p[k * k - 1] = 1.0;
  return p;
}

}  // namespace oracle
