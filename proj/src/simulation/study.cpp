#include "ccpwf/simulation/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ccpwf/errors.hpp"
#include "ccpwf/rng.hpp"
#include "parallel.hpp"

namespace ccpwf::sim {

ReferenceDefaults sample_reference_defaults(const std::vector<cds::CdsContract>& contracts, int horizon_days,
                                            int count, std::uint64_t seed, int days_per_year, int delta_f) {
  if (count < 0 || horizon_days < 0 || delta_f < 1) throw std::domain_error("sample_reference_defaults: bad sizes");
  ReferenceDefaults out;
  out.contracts = static_cast<int>(contracts.size());
  out.paths = count;
  out.day.resize(static_cast<std::size_t>(count) * contracts.size());
  for (int r = 0; r < count; ++r) {
    CounterRng rng(seed, Stream::ReferenceDefaults, static_cast<std::uint64_t>(r));
    for (std::size_t j = 0; j < contracts.size(); ++j) {
      const double days = rng.exponential() / contracts[j].lambda * days_per_year;
      const double steps = std::max(1.0, std::ceil(days / delta_f));
      const double snapped = steps * delta_f;
      out.day[static_cast<std::size_t>(r) * contracts.size() + j] =
          snapped > horizon_days ? ReferenceDefaults::kNoDefault : static_cast<int>(snapped);
    }
  }
  return out;
}

std::vector<VarStep> var_steps(const prob::DiscreteDistribution& loss_law) {
  std::vector<VarStep> steps;
  double cum = 0.0;
  for (const auto& a : loss_law.atoms()) {
    const double next = std::min(1.0, cum + a.prob);
    steps.push_back({cum, next, -a.value});
    cum = next;
  }
  return steps;
}

namespace {

std::vector<cds::ExposureLaw> contract_laws(const ExperimentConfig& cfg) {
  const cds::ValuationGrid grid(cfg.evaluation_date, cfg.days_per_year);
  std::vector<cds::ExposureLaw> laws;
  for (const auto& c : cfg.contracts) laws.push_back(cds::margin_period_exposure(c, grid, cfg.waterfall.tenors.delta));
  return laws;
}

}  // namespace

std::vector<double> member_initial_margins(const ExperimentConfig& cfg, const cds::PositionMatrix& positions,
                                           double alpha) {
  const auto laws = contract_laws(cfg);
  const prob::RiskMeasureSpec rho{cfg.waterfall.im_measure, alpha};
  std::vector<double> im(positions.members());
  for (int i = 0; i < positions.members(); ++i)
    im[i] = waterfall::initial_margin(cds::portfolio_exposure_law(positions.row(i), laws), cfg.waterfall.im_method, rho);
  return im;
}

ImStudyResult run_im_study(const ExperimentConfig& cfg) {
  ImStudyResult res;
  res.contract_laws = contract_laws(cfg);
  std::vector<NamedPortfolio> books = cfg.im_portfolios;
  for (int i = 0; i < cfg.positions.members(); ++i) {
    const auto r = cfg.positions.row(i);
    books.push_back({"member_" + std::to_string(i + 1), std::vector<double>(r.begin(), r.end())});
  }
  for (const auto& b : books) {
    ImPortfolioReport rep;
    rep.name = b.name;
    rep.positions = b.positions;
    rep.exposure_law = cds::portfolio_exposure_law(b.positions, res.contract_laws);
    rep.loss_law = cds::loss_transform(rep.exposure_law, cds::LossTransform::NegPosPart);
    rep.var_plateaus = var_steps(rep.loss_law);
    for (double a : cfg.alpha_grid) {
      for (auto kind : {prob::RiskMeasureKind::VaR, prob::RiskMeasureKind::AVaR}) {
        if (kind == prob::RiskMeasureKind::VaR && a >= 1.0) continue;
        for (auto method : {waterfall::ImMethod::PosPart, waterfall::ImMethod::PosOfRho}) {
          res.rows.push_back(
              {b.name, a, kind, method, waterfall::initial_margin(rep.exposure_law, method, {kind, a})});
        }
      }
    }
    res.portfolios.push_back(std::move(rep));
  }
  return res;
}

std::pair<double, double> cover1_cover2_baseline(const std::vector<std::vector<double>>& ep_samples) {
  if (ep_samples.empty()) return {0.0, 0.0};
  double c1 = 0.0;
  double c2 = 0.0;
  for (const auto& row : ep_samples) {
    double first = 0.0;
    double second = 0.0;
    for (double v : row) {
      if (v > first) {
        second = first;
        first = v;
      } else if (v > second) {
        second = v;
      }
    }
    c1 += first;
    c2 += first + second;
  }
  const double n = static_cast<double>(ep_samples.size());
  return {c1 / n, c2 / n};
}

namespace {

// Marks of every member for a default at step s (day (s+1) delta_f) on
// reference path r, without the IM.
struct MarkTable {
  int paths = 0;
  int steps = 0;
  int members = 0;
  std::vector<waterfall::DefaultMarks> marks;
  double matched_book_error = 0.0;

  waterfall::DefaultMarks& at(int r, int s, int i) {
    return marks[(static_cast<std::size_t>(r) * steps + s) * members + i];
  }
  const waterfall::DefaultMarks& at(int r, int s, int i) const {
    return marks[(static_cast<std::size_t>(r) * steps + s) * members + i];
  }
};

MarkTable build_marks(const ExperimentConfig& cfg, const cds::PositionMatrix& h, const ReferenceDefaults& ref) {
  const auto& t = cfg.waterfall.tenors;
  const cds::ValuationGrid grid(cfg.evaluation_date, cfg.days_per_year);
  const int steps = t.period / t.delta_f;
  const int members = h.members();
  const int contracts = h.contracts();
  const int first_day = -t.delta_f;
  const int last_day = t.period + t.delta;

  std::vector<std::vector<double>> value(contracts, std::vector<double>(last_day - first_day + 1));
  for (int j = 0; j < contracts; ++j)
    for (int d = first_day; d <= last_day; ++d) value[j][d - first_day] = grid.value(cfg.contracts[j], d);

  MarkTable tab;
  tab.paths = ref.paths;
  tab.steps = steps;
  tab.members = members;
  tab.marks.resize(static_cast<std::size_t>(ref.paths) * steps * members);

  std::vector<double> prev_v(contracts), after_v(contracts), div(contracts);
  for (int r = 0; r < ref.paths; ++r) {
    for (int s = 0; s < steps; ++s) {
      const int m = (s + 1) * t.delta_f;
      const int prev = m - t.delta_f;
      const int after = m + t.delta;
      for (int j = 0; j < contracts; ++j) {
        const auto& c = cfg.contracts[j];
        const int phi = ref.at(r, j);
        prev_v[j] = phi > prev ? value[j][prev - first_day] : 0.0;
        after_v[j] = phi > after ? value[j][after - first_day] : 0.0;
        div[j] = 0.0;
        if (phi <= prev) continue;
        if (phi <= after) {
          div[j] = c.recovery - grid.accrued_coupon(c, phi) - grid.coupons_due(c, prev, phi - 1);
        } else {
          div[j] = -grid.coupons_due(c, prev, after);
        }
      }
      double sum_prev = 0.0, sum_after = 0.0, sum_div = 0.0;
      for (int i = 0; i < members; ++i) {
        auto& mk = tab.at(r, s, i);
        mk = {};
        for (int j = 0; j < contracts; ++j) {
          const double hij = h(i, j);
          mk.vm += hij * prev_v[j];
          mk.value_after += hij * after_v[j];
          mk.dividends += hij * div[j];
        }
        mk.vm = waterfall::variation_margin(mk.vm);
        sum_prev += mk.vm;
        sum_after += mk.value_after;
        sum_div += mk.dividends;
      }
      tab.matched_book_error =
          std::max({tab.matched_book_error, std::abs(sum_prev), std::abs(sum_after), std::abs(sum_div)});
    }
  }
  return tab;
}

struct PathEvents {
  // (member, step) for members defaulting inside the period, member order.
  std::vector<std::pair<int, int>> defaults;
  // Members already in default at the evaluation date.
  std::vector<int> initially_defaulted;
};

std::vector<int> default_steps(const PathEvents& ev) {
  std::vector<int> out;
  for (const auto& d : ev.defaults) out.push_back(d.second);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

DfScenario run_df_scenario(const ExperimentConfig& cfg, const cds::PositionMatrix& positions,
                           migration::Dependence dependence, const InitialState& initial,
                           const std::vector<double>& alphas, const std::vector<double>& betas) {
  if (positions.contracts() != static_cast<int>(cfg.contracts.size()))
    throw ConfigError("positions do not match the contract count");
  const auto& t = cfg.waterfall.tenors;
  const int members = positions.members();
  const int steps = t.period / t.delta_f;
  const int paths = cfg.paths_migration;
  const int refs = cfg.paths_reference;
  const double cap = cfg.waterfall.exposure_cap.value_or(
      positions.long_notional() > 0.0 ? 10.0 * positions.long_notional() : 1.0);
  const std::string context = migration::to_string(dependence) + ", initial " + initial.name;

  const auto calib = migration::calibrate_daily(cfg.annual, cfg.steps_per_year());
  const auto model = migration::JointMigrationModel::homogeneous(calib.matrix, members, dependence, cfg.trigger_ratings);
  const auto start = initial.resolve(members, model.rating_count());

  const auto ref = sample_reference_defaults(cfg.contracts, t.period + t.delta, refs, cfg.seed, cfg.days_per_year,
                                             t.delta_f);
  const MarkTable marks = build_marks(cfg, positions, ref);

  std::vector<PathEvents> events(paths);
  try {
    detail::parallel_for(static_cast<std::size_t>(paths), cfg.threads, [&](std::size_t p) {
      const auto path = migration::simulate_path(model, start, steps, cfg.seed, p);
      auto& ev = events[p];
      for (int i = 0; i < members; ++i) {
        const int tau = path.default_times[i];
        if (tau == 0) ev.initially_defaulted.push_back(i);
        else if (tau <= steps) ev.defaults.emplace_back(i, tau);
      }
    });
  } catch (const InfeasibleRowError& e) {
    throw InfeasibleRowError(e.member(), e.direction(), context + ": " + e.what());
  }

  DfScenario sc;
  sc.dependence = dependence;
  sc.initial = initial.name;
  sc.members = members;
  sc.samples = static_cast<std::size_t>(paths) * refs;
  sc.matched_book_error = marks.matched_book_error;
  std::size_t with_default = 0;
  for (const auto& ev : events) with_default += ev.defaults.empty() ? 0 : 1;
  sc.member_default_fraction = static_cast<double>(with_default) / paths;

  const double n = static_cast<double>(sc.samples);
  const int batches = std::min(cfg.batches, paths);

  for (double alpha : alphas) {
    const auto im = member_initial_margins(cfg, positions, alpha);
    const double im_total = std::accumulate(im.begin(), im.end(), 0.0);

    auto marks_with_im = [&](int r, int s, int i) {
      auto mk = marks.at(r, s, i);
      mk.im = im[i];
      return mk;
    };
    std::vector<double> ep(marks.marks.size());
    for (int r = 0; r < refs; ++r)
      for (int s = 0; s < steps; ++s)
        for (int i = 0; i < members; ++i)
          ep[(static_cast<std::size_t>(r) * steps + s) * members + i] = waterfall::member_period_exposure(
              (s + 1) * t.delta_f, 0, t.period, marks_with_im(r, s, i), cfg.waterfall, cap);
    auto ep_at = [&](int r, int s, int i) { return ep[(static_cast<std::size_t>(r) * steps + s) * members + i]; };

    // Baseline: every member taken as defaulting on the first step.
    std::vector<std::vector<double>> stressed(refs, std::vector<double>(members));
    for (int r = 0; r < refs; ++r)
      for (int i = 0; i < members; ++i) stressed[r][i] = ep_at(r, 0, i);
    const auto [c1, c2] = cover1_cover2_baseline(stressed);

    waterfall::ExposureSamples samples(members, sc.samples);
    for (int p = 0; p < paths; ++p) {
      if (events[p].defaults.empty()) continue;
      for (int r = 0; r < refs; ++r) {
        const std::size_t idx = static_cast<std::size_t>(p) * refs + r;
        for (auto [i, tau] : events[p].defaults) samples.add(idx, i, ep_at(r, tau - 1, i));
      }
    }
    const auto totals = samples.totals();

    std::vector<DfCell> row;
    for (double beta : betas) {
      DfCell cell;
      cell.alpha = alpha;
      cell.beta = beta;
      cell.im = im;
      cell.im_total = im_total;
      cell.c1 = c1;
      cell.c2 = c2;
      cell.c1_ratio = safe_ratio(c1, im_total);
      cell.c2_ratio = safe_ratio(c2, im_total);
      cell.exposed_fraction = static_cast<double>(totals.size()) / n;

      const auto fund = waterfall::default_fund(samples, beta);
      cell.df_total = fund.total;
      cell.df_allocation = fund.allocation;
      cell.ratio = safe_ratio(fund.total, im_total);
      cell.allocation_error =
          std::abs(std::accumulate(fund.allocation.begin(), fund.allocation.end(), 0.0) - fund.total);

      std::vector<double> batch_df;
      for (int b = 0; b < batches; ++b) {
        const std::size_t lo = static_cast<std::size_t>(paths) * b / batches * refs;
        const std::size_t hi = static_cast<std::size_t>(paths) * (b + 1) / batches * refs;
        batch_df.push_back(waterfall::default_fund(samples.slice(lo, hi), beta).total);
      }
      cell.df_se = stddev(batch_df) / std::sqrt(static_cast<double>(batch_df.size()));
      cell.ratio_se = safe_ratio(cell.df_se, im_total);

      // Covers: samples without exposure are covered trivially.
      std::size_t miss1 = 0, miss2 = 0, miss_all = 0, self1 = 0, self2 = 0;
      std::vector<double> e(members);
      std::vector<int> order(members);
      const auto& entries = samples.entries();
      for (std::size_t k = 0; k < entries.size();) {
        std::fill(e.begin(), e.end(), 0.0);
        const std::size_t s = entries[k].sample;
        double sum = 0.0;
        for (; k < entries.size() && entries[k].sample == s; ++k) {
          e[entries[k].member] += entries[k].ep;
          sum += entries[k].ep;
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e[a] > e[b]; });
        const int i1 = order[0];
        const int i2 = members > 1 ? order[1] : order[0];
        const double top1 = e[i1];
        const double top2 = members > 1 ? e[i1] + e[i2] : e[i1];
        if (fund.total < top1) ++miss1;
        if (fund.total < top2) ++miss2;
        if (fund.total < sum) ++miss_all;
        if (fund.allocation[i1] < e[i1]) ++self1;
        if (members > 1 ? fund.allocation[i1] + fund.allocation[i2] < top2 : fund.allocation[i1] < top1) ++self2;
      }
      cell.covers = {1.0 - miss1 / n, 1.0 - miss2 / n, 1.0 - miss_all / n, 1.0 - self1 / n, 1.0 - self2 / n};

      // Effective loss and unfunded calls per default step.
      double el_sum = 0.0;
      std::size_t el_positive = 0;
      std::vector<double> udf_sum(members, 0.0);
      std::vector<double> shortfalls;
      std::vector<bool> alive(members);
      for (int p = 0; p < paths; ++p) {
        const auto& ev = events[p];
        if (ev.defaults.empty()) continue;
        for (int r = 0; r < refs; ++r) {
          double el_sample = 0.0;
          for (int tau : default_steps(ev)) {
            shortfalls.clear();
            for (const auto& [i, tt] : ev.defaults)
              if (tt == tau)
                shortfalls.push_back(
                    waterfall::default_shortfall(marks_with_im(r, tau - 1, i), cfg.waterfall.liquidation_recovery));
            const double el = waterfall::effective_loss(shortfalls, cfg.waterfall.skin_in_game, fund.total);
            if (el <= 0.0) continue;
            std::fill(alive.begin(), alive.end(), true);
            for (int i : ev.initially_defaulted) alive[i] = false;
            for (const auto& [i, tt] : ev.defaults)
              if (tt <= tau) alive[i] = false;
            const auto udf = waterfall::unfunded_df(el, fund.allocation, alive);
            double denom = 0.0;
            for (int i = 0; i < members; ++i)
              if (alive[i]) denom += fund.allocation[i];
            const double udf_total = std::accumulate(udf.begin(), udf.end(), 0.0);
            if (denom > 0.0) cell.udf_error = std::max(cell.udf_error, std::abs(udf_total - el));
            for (int i = 0; i < members; ++i) udf_sum[i] += udf[i];
            el_sample += el;
          }
          el_sum += el_sample;
          if (el_sample > 0.0) ++el_positive;
        }
      }
      cell.mean_effective_loss = el_sum / n;
      cell.prob_effective_loss = static_cast<double>(el_positive) / n;
      cell.mean_udf.resize(members);
      for (int i = 0; i < members; ++i) cell.mean_udf[i] = udf_sum[i] / n;
      row.push_back(std::move(cell));
    }

    // Nonincreasing in beta, compared in ascending beta order.
    std::vector<std::size_t> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return row[a].beta < row[b].beta; });
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const double lo = row[idx[k - 1]].ratio;
      const double hi = row[idx[k]].ratio;
      if (hi > lo + 1e-12 * std::max(1.0, std::abs(lo))) sc.ratio_nonincreasing_in_beta = false;
    }
    for (auto& c : row) sc.cells.push_back(std::move(c));
  }
  return sc;
}

StudyResult run_df_study(const ExperimentConfig& cfg) {
  StudyResult res;
  for (auto dep : cfg.dependence)
    for (const auto& init : cfg.initial_states)
      res.scenarios.push_back(run_df_scenario(cfg, cfg.positions, dep, init, cfg.alpha_grid, cfg.beta_grid));
  return res;
}

std::vector<ScalingRow> run_scaling_study(const ExperimentConfig& cfg, std::vector<int> counts) {
  std::vector<int> unique;
  for (int c : counts)
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  const cds::PositionMatrix& base = cfg.scaling.base ? *cfg.scaling.base : cfg.positions;
  std::vector<ScalingRow> rows;
  for (int count : unique) {
    const auto book = base.replicated(count);
    const auto sc = run_df_scenario(cfg, book, cfg.scaling.dependence, cfg.scaling.initial, {cfg.scaling.alpha},
                                    {cfg.scaling.beta});
    const auto& cell = sc.cells.front();
    rows.push_back({count, cell.im_total, cell.df_total, cell.df_se, cell.ratio, cell.c1, cell.c2, cell.c1_ratio,
                    cell.c2_ratio});
  }
  return rows;
}

}  // namespace ccpwf::sim
