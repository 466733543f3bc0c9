#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ccpwf/cds/exposure.hpp"
#include "ccpwf/errors.hpp"
#include "ccpwf/waterfall/waterfall.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccpwf::waterfall;
using ccpwf::prob::DiscreteDistribution;
using ccpwf::prob::RiskMeasureKind;
using ccpwf::prob::RiskMeasureSpec;

namespace {

using Dense = std::vector<std::vector<double>>;

// Empirical tail average of the beta share of largest totals, with the
// boundary sample(s) carrying the fractional weight equally.
struct FundOracle {
  double total = 0.0;
  std::vector<double> allocation;
};

FundOracle fund_oracle(const Dense& rows, double beta) {
  const std::size_t n = rows.size();
  const std::size_t m = rows.front().size();
  std::vector<double> totals(n);
  for (std::size_t r = 0; r < n; ++r) totals[r] = std::accumulate(rows[r].begin(), rows[r].end(), 0.0);
  std::vector<double> sorted = totals;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double budget = beta * static_cast<double>(n);  // number of samples in the tail
  // boundary value: the sample where the budget runs out
  const std::size_t idx = std::min(n - 1, static_cast<std::size_t>(std::floor(budget - 1e-12)));
  const double q = sorted[idx];
  std::size_t above = 0, tied = 0;
  for (double t : totals) {
    if (t > q) ++above;
    if (t == q) ++tied;
  }
  const double tie_weight = (budget - static_cast<double>(above)) / static_cast<double>(tied);
  FundOracle out;
  out.allocation.assign(m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double w = totals[r] > q ? 1.0 : (totals[r] == q ? tie_weight : 0.0);
    for (std::size_t i = 0; i < m; ++i) out.allocation[i] += w * rows[r][i] / budget;
    out.total += w * totals[r] / budget;
  }
  return out;
}

Dense random_samples(std::mt19937_64& rng, std::size_t n, std::size_t m, double zero_share) {
  std::bernoulli_distribution zero(zero_share);
  std::exponential_distribution<double> size(1.0);
  std::bernoulli_distribution coarse(0.5);
  Dense rows(n, std::vector<double>(m, 0.0));
  for (auto& r : rows)
    for (auto& x : r)
      if (!zero(rng)) x = coarse(rng) ? std::round(size(rng) * 2.0) / 2.0 : size(rng);
  return rows;
}

}  // namespace

TEST_SUITE("waterfall") {

TEST_CASE("config validation and names") {
  WaterfallConfig c;
  CHECK_NOTHROW(c.validate());
  c.alpha_im = 0.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = {};
  c.tenors.delta = 7;
  c.tenors.delta_f = 2;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = {};
  c.skin_in_game = -1.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  CHECK(im_method_from_string("POS_OF_RHO") == ImMethod::PosOfRho);
  CHECK(to_string(ExposureMode::Regulatory) == "REGULATORY");
  CHECK_THROWS_AS(exposure_mode_from_string("GROSS"), ccpwf::ConfigError);

  const auto j = nlohmann::json::parse(R"({"alpha_im": 0.05, "im_method": "POS_OF_RHO", "exposure_cap": 100})");
  const auto parsed = waterfall_config_from_json(j);
  CHECK(parsed.alpha_im == 0.05);
  CHECK(parsed.im_method == ImMethod::PosOfRho);
  CHECK(parsed.exposure_cap.value() == 100.0);
  CHECK(waterfall_config_from_json(to_json(parsed)).alpha_im == 0.05);
  CHECK_THROWS_AS(waterfall_config_from_json(nlohmann::json::parse(R"({"beta_df": 2})")), ccpwf::ConfigError);
}

TEST_CASE("variation and initial margin") {
  CHECK(variation_margin(0.0) == 0.0);
  CHECK(variation_margin(-3.2) == -3.2);

  using namespace ccpwf::cds;
  const Date eval = make_date(2015, 9, 22);
  std::vector<ExposureLaw> laws;
  for (double l : {0.002, 0.01, 0.015, 0.03})
    laws.push_back(margin_period_exposure(CdsContract{l, 0.01, 0.4, make_date(2015, 6, 20), make_date(2018, 6, 20)},
                                          eval, 10));
  const std::vector<double> h1{10, 10, -1, -1}, h3{1, -100, -100, -100};
  const auto x1 = portfolio_exposure_law(h1, laws);
  const auto x3 = portfolio_exposure_law(h3, laws);
  WaterfallConfig cfg;
  CHECK(std::abs(initial_margin(x1, cfg) - 0.21) <= 0.005);
  CHECK(initial_margin(x3, ImMethod::PosPart, {RiskMeasureKind::VaR, 0.01}) == 0.0);
  // positive X is exposure of the clearing house, negative X a gain
  CHECK(initial_margin(DiscreteDistribution::point_mass(-5.0), ImMethod::PosPart, {RiskMeasureKind::VaR, 0.01}) == 0.0);
  CHECK(initial_margin(DiscreteDistribution::point_mass(5.0), ImMethod::PosPart, {RiskMeasureKind::AVaR, 0.5}) ==
        doctest::Approx(5.0));
  cfg.alpha_im = 2.0;
  CHECK_THROWS_AS(initial_margin(x1, cfg), std::domain_error);
}

TEST_CASE("IM method ordering on random laws") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = oracle::to_distribution(oracle::random_law(rng, 16));
    for (auto kind : {RiskMeasureKind::VaR, RiskMeasureKind::AVaR}) {
      for (double a : {0.01, 0.1, 0.5}) {
        const RiskMeasureSpec rho{kind, a};
        const double pos_part = initial_margin(d, ImMethod::PosPart, rho);
        const double pos_of_rho = initial_margin(d, ImMethod::PosOfRho, rho);
        CHECK(pos_of_rho >= 0.0);
        CHECK(pos_part >= pos_of_rho - 1e-12);
      }
    }
  }
}

TEST_CASE("member period exposure") {
  WaterfallConfig cfg;
  const DefaultMarks marks{10.0, 0.0, 1.0, 0.5};
  CHECK(member_period_exposure(5, 0, 30, marks, cfg, 1e9) == doctest::Approx(4.5));
  CHECK(member_period_exposure(31, 0, 30, marks, cfg, 1e9) == 0.0);
  CHECK(member_period_exposure(0, 0, 30, marks, cfg, 1e9) == 0.0);
  CHECK(member_period_exposure(30, 0, 30, marks, cfg, 1e9) == doctest::Approx(4.5));
  CHECK(member_period_exposure(5, 0, 30, marks, cfg, 2.0) == 2.0);
  const DefaultMarks covered{10.0, 0.0, 5.0, 2.0};
  CHECK(member_period_exposure(5, 0, 30, covered, cfg, 1e9) == 0.0);
  const DefaultMarks with_dividend{10.0, -0.7, 1.0, 0.5};
  CHECK(exposure_summand(with_dividend, 0.4, ExposureMode::Netted) == doctest::Approx(3.8));
  CHECK(exposure_summand(with_dividend, 0.4, ExposureMode::Regulatory) == doctest::Approx(8.5));
  CHECK(default_shortfall(marks, 0.4) == doctest::Approx(4.5));
}

TEST_CASE("regulatory exposure is at least the netted one") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> v(0.0, 10.0), m(-2.0, 3.0);
  WaterfallConfig net, reg;
  reg.exposure_mode = ExposureMode::Regulatory;
  Dense a, b;
  for (int s = 0; s < 400; ++s) {
    std::vector<double> ra, rb;
    for (int i = 0; i < 3; ++i) {
      const DefaultMarks mk{v(rng), 0.0, m(rng), std::abs(m(rng))};
      const double en = member_period_exposure(3, 0, 30, mk, net, 1e9);
      const double er = member_period_exposure(3, 0, 30, mk, reg, 1e9);
      CHECK(er >= en);
      ra.push_back(en);
      rb.push_back(er);
    }
    a.push_back(ra);
    b.push_back(rb);
  }
  CHECK(default_fund(ExposureSamples::from_dense(b), 0.05).total >=
        default_fund(ExposureSamples::from_dense(a), 0.05).total);
}

TEST_CASE("exposure samples") {
  ExposureSamples s(2, 5);
  s.add(0, 1, 2.0);
  s.add(0, 0, 0.0);
  s.add(3, 0, 1.0);
  CHECK(s.entries().size() == 2);
  CHECK_THROWS_AS(s.add(1, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(s.add(4, 0, -1.0), std::domain_error);
  CHECK_THROWS_AS(s.add(5, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(s.add(4, 2, 1.0), std::domain_error);
  const auto t = s.totals();
  REQUIRE(t.size() == 2);
  CHECK(t[1].first == 3);
  const auto tail = s.slice(2, 5);
  CHECK(tail.sample_count() == 3);
  REQUIRE(tail.entries().size() == 1);
  CHECK(tail.entries()[0].sample == 1);
}

TEST_CASE("default fund edge cases") {
  const Dense zeros(10, std::vector<double>(3, 0.0));
  const auto z = default_fund(ExposureSamples::from_dense(zeros), 0.1);
  CHECK(z.total == 0.0);
  for (double a : z.allocation) CHECK(a == 0.0);
  CHECK_THROWS_AS(default_fund(ExposureSamples(2, 0), 0.1), std::domain_error);
  CHECK_THROWS_AS(default_fund(ExposureSamples::from_dense(zeros), 0.0), std::domain_error);

  std::mt19937_64 rng(53);
  const auto one = random_samples(rng, 200, 1, 0.7);
  const auto r = default_fund(ExposureSamples::from_dense(one), 0.05);
  CHECK(r.allocation[0] == doctest::Approx(r.total).epsilon(1e-12));
}

TEST_CASE("default fund matches the tail-average oracle") {
  std::mt19937_64 rng(54);
  std::uniform_int_distribution<int> members(1, 6);
  std::uniform_int_distribution<int> count(1, 400);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = random_samples(rng, count(rng), members(rng), 0.8);
    for (double beta : {0.005, 0.01, 0.05, 0.3, 1.0}) {
      const auto got = default_fund(ExposureSamples::from_dense(rows), beta);
      const auto want = fund_oracle(rows, beta);
      CHECK(got.total >= 0.0);
      CHECK(got.total == doctest::Approx(want.total).epsilon(1e-10));
      double sum = 0.0;
      for (std::size_t i = 0; i < want.allocation.size(); ++i) {
        CHECK(got.allocation[i] == doctest::Approx(want.allocation[i]).epsilon(1e-10));
        sum += got.allocation[i];
      }
      CHECK(std::abs(sum - got.total) < 1e-8);
    }
  }
}

TEST_CASE("allocation is linear and monotone") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> extra(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto rows = random_samples(rng, 300, 3, 0.6);
    for (auto& r : rows) {
      r[1] = 2.0 * r[0];
      r[2] = r[0] + extra(rng);
    }
    const auto res = default_fund(ExposureSamples::from_dense(rows), 0.02);
    CHECK(res.allocation[1] == doctest::Approx(2.0 * res.allocation[0]).epsilon(1e-12));
    CHECK(res.allocation[2] >= res.allocation[0]);
  }
}

TEST_CASE("effective loss and unfunded default fund") {
  const std::vector<double> none;
  CHECK(effective_loss(none, 1.0, 4.0) == 0.0);
  const std::vector<double> two{5.0, 3.0};
  CHECK(effective_loss(two, 1.0, 4.0) == doctest::Approx(3.0));
  CHECK(effective_loss(two, 4.0, 4.0) == 0.0);

  const std::vector<double> df{2.0, 1.0, 1.0, 5.0};
  const auto u = unfunded_df(3.0, df, {true, true, true, false});
  CHECK(u[0] == doctest::Approx(1.5));
  CHECK(u[1] == doctest::Approx(0.75));
  CHECK(u[2] == doctest::Approx(0.75));
  CHECK(u[3] == 0.0);
  for (double x : unfunded_df(0.0, df, {true, true, true, true})) CHECK(x == 0.0);
  for (double x : unfunded_df(3.0, df, {false, false, false, false})) CHECK(x == 0.0);
  CHECK_THROWS_AS(unfunded_df(3.0, df, {true}), std::domain_error);
}

}  // TEST_SUITE
