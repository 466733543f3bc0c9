#include <cmath>
#include <filesystem>
#include <fstream>

#include "ccpwf/errors.hpp"
#include "ccpwf/simulation/config.hpp"
#include "ccpwf/simulation/study.hpp"
#include "doctest.h"

using namespace ccpwf;
using namespace ccpwf::sim;

namespace {

ExperimentConfig small_config(int migration_paths = 400, int reference_paths = 20) {
  auto cfg = load_experiment_config(std::filesystem::path(CCPWF_FIXTURES) / "study.json");
  cfg.paths_migration = migration_paths;
  cfg.paths_reference = reference_paths;
  cfg.threads = 1;
  return cfg;
}

void check_cell_equal(const DfCell& a, const DfCell& b) {
  CHECK(a.df_total == b.df_total);
  CHECK(a.df_se == b.df_se);
  CHECK(a.ratio == b.ratio);
  CHECK(a.df_allocation == b.df_allocation);
  CHECK(a.covers.cover1 == b.covers.cover1);
  CHECK(a.covers.self_cover2 == b.covers.self_cover2);
  CHECK(a.mean_effective_loss == b.mean_effective_loss);
  CHECK(a.mean_udf == b.mean_udf);
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("reference default times") {
  const auto cfg = small_config();
  const auto a = sample_reference_defaults(cfg.contracts, 30, 50, 7);
  const auto b = sample_reference_defaults(cfg.contracts, 30, 50, 7);
  CHECK(a.day == b.day);
  CHECK(a.contracts == 4);
  CHECK(a.paths == 50);

  auto hot = cfg.contracts;
  for (auto& c : hot) c.lambda = 1e4;
  const auto fast = sample_reference_defaults(hot, 30, 200, 7);
  for (int d : fast.day) CHECK(d <= 2);

  const int n = 100000;
  const auto year = sample_reference_defaults(cfg.contracts, 400, n, 11);
  for (int j = 0; j < 4; ++j) {
    int survive = 0;
    for (int r = 0; r < n; ++r) survive += year.at(r, j) > 252;
    const double p = std::exp(-cfg.contracts[j].lambda);
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(survive / static_cast<double>(n) - p) <= 3.0 * se);
  }
}

TEST_CASE("initial margin study") {
  const auto cfg = small_config();
  const auto im = run_im_study(cfg);
  CHECK(im.contract_laws.size() == 4);
  REQUIRE(im.portfolios.size() == 3 + 8);
  CHECK(im.portfolios[8].name == "member_6");

  auto find = [&](const std::string& name, double alpha, prob::RiskMeasureKind kind, waterfall::ImMethod m) {
    for (const auto& r : im.rows)
      if (r.portfolio == name && r.alpha == alpha && r.measure == kind && r.method == m) return r.im;
    FAIL("row missing");
    return 0.0;
  };
  using prob::RiskMeasureKind;
  using waterfall::ImMethod;
  CHECK(std::abs(find("H1", 0.01, RiskMeasureKind::AVaR, ImMethod::PosPart) - 0.21) <= 0.005);
  CHECK(find("H3", 0.01, RiskMeasureKind::VaR, ImMethod::PosPart) == 0.0);
  // single tail atom of -(X)^+ for H3
  const auto& h3 = im.portfolios[2].loss_law;
  REQUIRE(h3.size() == 2);
  CHECK(find("H3", 0.01, RiskMeasureKind::AVaR, ImMethod::PosPart) ==
        doctest::Approx(-h3[0].value * h3[0].prob / 0.01).epsilon(1e-12));
  CHECK(std::abs(find("H3", 0.01, RiskMeasureKind::AVaR, ImMethod::PosPart) - 0.39 * 7.93e-5 / 0.01) < 1e-4);

  // VaR plateau of H1
  const auto& steps = im.portfolios[0].var_plateaus;
  bool covered = false;
  for (const auto& s : steps)
    if (s.alpha_from <= 0.005 && s.alpha_to >= 0.99) {
      covered = true;
      CHECK(std::abs(s.value - 0.0065) < 0.00005);
    }
  CHECK(covered);

  for (const auto& r : im.rows) {
    CHECK(r.im >= 0.0);
    if (r.method == ImMethod::PosPart) CHECK(r.im >= find(r.portfolio, r.alpha, r.measure, ImMethod::PosOfRho) - 1e-12);
  }

  auto unit = cfg;
  unit.alpha_grid = {0.5, 1.0};
  const auto at_one = run_im_study(unit);
  for (const auto& r : at_one.rows)
    if (r.alpha == 1.0) CHECK(r.measure == RiskMeasureKind::AVaR);
}

TEST_CASE("var plateaus partition the unit interval") {
  const prob::DiscreteDistribution d({{-3.0, 0.1}, {-1.0, 0.2}, {0.0, 0.7}});
  const auto steps = var_steps(d);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].alpha_from == 0.0);
  CHECK(steps[0].alpha_to == doctest::Approx(0.1));
  CHECK(steps[0].value == 3.0);
  CHECK(steps[1].value == 1.0);
  CHECK(steps[2].alpha_to == doctest::Approx(1.0));
  CHECK(steps[2].value == 0.0);
}

TEST_CASE("df scenario invariants") {
  const auto cfg = small_config(1000, 40);
  const auto sc = run_df_scenario(cfg, cfg.positions, migration::Dependence::TypeI, {"ALL_SEVENS", {}},
                                  cfg.alpha_grid, cfg.beta_grid);
  CHECK(sc.members == 8);
  CHECK(sc.samples == 40000);
  CHECK(sc.cells.size() == cfg.alpha_grid.size() * cfg.beta_grid.size());
  CHECK(sc.matched_book_error <= 1e-9);
  CHECK(sc.ratio_nonincreasing_in_beta);
  CHECK(sc.member_default_fraction > 0.0);
  bool any_positive = false;
  for (const auto& c : sc.cells) {
    CHECK(c.df_total >= 0.0);
    CHECK(c.allocation_error <= 1e-8);
    CHECK(c.udf_error <= 1e-8);
    CHECK(c.covers.cover_all <= c.covers.cover2);
    CHECK(c.covers.cover2 <= c.covers.cover1);
    for (double p : {c.covers.cover1, c.covers.cover2, c.covers.cover_all, c.covers.self_cover1, c.covers.self_cover2}) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    CHECK(c.ratio == doctest::Approx(c.df_total / c.im_total));
    any_positive = any_positive || c.df_total > 0.0;
  }
  CHECK(any_positive);
}

TEST_CASE("results do not depend on the thread count") {
  auto cfg = small_config(600, 20);
  cfg.dependence = {migration::Dependence::TypeII, migration::Dependence::TypeIII};
  cfg.initial_states = {{"ALL_SEVENS", {}}};
  const auto one = run_df_study(cfg);
  cfg.threads = 5;
  const auto five = run_df_study(cfg);
  REQUIRE(one.scenarios.size() == five.scenarios.size());
  for (std::size_t s = 0; s < one.scenarios.size(); ++s)
    for (std::size_t c = 0; c < one.scenarios[s].cells.size(); ++c)
      check_cell_equal(one.scenarios[s].cells[c], five.scenarios[s].cells[c]);
}

TEST_CASE("an empty book needs no default fund") {
  auto cfg = small_config(200, 10);
  const cds::PositionMatrix zero(8, 4, std::vector<double>(32, 0.0));
  cfg.positions = zero;
  const auto sc = run_df_scenario(cfg, zero, migration::Dependence::TypeI, {"ALL_SEVENS", {}}, {0.01}, {0.01});
  const auto& c = sc.cells.front();
  CHECK(c.df_total == 0.0);
  CHECK(c.covers.cover1 == 1.0);
  CHECK(c.covers.cover2 == 1.0);
  CHECK(c.covers.cover_all == 1.0);
  CHECK(c.covers.self_cover1 == 1.0);
  CHECK(c.covers.self_cover2 == 1.0);
}

TEST_CASE("top-rated members leave the fund empty") {
  const auto cfg = small_config(500, 20);
  const auto sc = run_df_scenario(cfg, cfg.positions, migration::Dependence::TypeIII, {"ALL_ONES", {}}, {0.01}, {0.01});
  CHECK(sc.cells.front().df_total == 0.0);
  CHECK(sc.cells.front().covers.cover_all == 1.0);
}

TEST_CASE("more migration paths stay within the Monte Carlo error") {
  auto cfg = small_config(4000, 50);
  const auto big = run_df_scenario(cfg, cfg.positions, migration::Dependence::TypeI, {"ALL_SEVENS", {}}, {0.05}, {0.01});
  cfg.paths_migration = 2000;
  const auto small = run_df_scenario(cfg, cfg.positions, migration::Dependence::TypeI, {"ALL_SEVENS", {}}, {0.05}, {0.01});
  const auto& a = small.cells.front();
  const auto& b = big.cells.front();
  REQUIRE(a.df_se > 0.0);
  CHECK(std::abs(a.df_total - b.df_total) < 2.0 * a.df_se);
}

TEST_CASE("cover baseline") {
  const std::vector<std::vector<double>> none(5, std::vector<double>(3, 0.0));
  auto [c1, c2] = cover1_cover2_baseline(none);
  CHECK(c1 == 0.0);
  CHECK(c2 == 0.0);
  const std::vector<std::vector<double>> dominant{{10.0, 1.0, 0.0}, {8.0, 0.0, 0.5}};
  std::tie(c1, c2) = cover1_cover2_baseline(dominant);
  CHECK(c1 == doctest::Approx(9.0));
  CHECK(c2 == doctest::Approx(9.75));
  const std::vector<std::vector<double>> symmetric{{2.0, 2.0, 2.0}, {1.0, 1.0, 1.0}};
  std::tie(c1, c2) = cover1_cover2_baseline(symmetric);
  CHECK(c2 == doctest::Approx(2.0 * c1));
}

TEST_CASE("scaling study") {
  auto cfg = small_config(300, 10);
  const auto rows = run_scaling_study(cfg, {4, 8, 4, 16});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].members == 4);
  CHECK(rows[1].members == 8);
  CHECK(rows[2].members == 16);
  const auto again = run_scaling_study(cfg, {4, 8, 16});
  for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].ratio == rows[i].ratio);
  CHECK_THROWS_AS(run_scaling_study(cfg, {1}), ConfigError);

  // the study book itself at its own member count
  cfg.scaling.base.reset();
  const auto own = run_scaling_study(cfg, {8});
  const auto sc = run_df_scenario(cfg, cfg.positions, cfg.scaling.dependence, cfg.scaling.initial, {cfg.scaling.alpha},
                                  {cfg.scaling.beta});
  CHECK(own.front().ratio == sc.cells.front().ratio);
}

}  // TEST_SUITE
