#include "ccpwf/waterfall/waterfall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ccpwf/errors.hpp"

namespace ccpwf::waterfall {

std::string to_string(ImMethod m) { return m == ImMethod::PosPart ? "POS_PART" : "POS_OF_RHO"; }
std::string to_string(ExposureMode m) { return m == ExposureMode::Netted ? "NETTED" : "REGULATORY"; }

ImMethod im_method_from_string(const std::string& s) {
  if (s == "POS_PART") return ImMethod::PosPart;
  if (s == "POS_OF_RHO") return ImMethod::PosOfRho;
  throw ConfigError("unknown IM method '" + s + "' (expected POS_PART or POS_OF_RHO)");
}

ExposureMode exposure_mode_from_string(const std::string& s) {
  if (s == "NETTED") return ExposureMode::Netted;
  if (s == "REGULATORY") return ExposureMode::Regulatory;
  throw ConfigError("unknown exposure mode '" + s + "' (expected NETTED or REGULATORY)");
}

void WaterfallConfig::validate() const {
  auto level = [](double v, const char* what) {
    if (!(v > 0.0 && v <= 1.0)) throw std::domain_error(std::string(what) + " must lie in (0,1]");
  };
  level(alpha_im, "alpha_im");
  level(beta_df, "beta_df");
  prob::RiskMeasureSpec{im_measure, alpha_im}.validate();
  if (!(liquidation_recovery >= 0.0 && liquidation_recovery <= 1.0))
    throw std::domain_error("liquidation recovery must lie in [0,1]");
  if (!(skin_in_game >= 0.0)) throw std::domain_error("skin in the game must be nonnegative");
  if (tenors.delta_f < 1 || tenors.delta < 1 || tenors.period < 1) throw std::domain_error("tenors must be positive");
  if (tenors.delta % tenors.delta_f != 0 || tenors.period % tenors.delta_f != 0)
    throw std::domain_error("delta and the DF period must be multiples of delta_f");
  if (exposure_cap && !(*exposure_cap > 0.0)) throw std::domain_error("exposure cap must be positive");
}

WaterfallConfig waterfall_config_from_json(const nlohmann::json& j) {
  WaterfallConfig c;
  try {
    c.alpha_im = j.value("alpha_im", c.alpha_im);
    c.beta_df = j.value("beta_df", c.beta_df);
    if (j.contains("im_method")) c.im_method = im_method_from_string(j.at("im_method").get<std::string>());
    if (j.contains("im_measure"))
      c.im_measure = prob::risk_measure_kind_from_string(j.at("im_measure").get<std::string>());
    c.liquidation_recovery = j.value("liquidation_recovery", c.liquidation_recovery);
    c.skin_in_game = j.value("skin_in_game", c.skin_in_game);
    c.tenors.delta_f = j.value("delta_f", c.tenors.delta_f);
    c.tenors.delta = j.value("delta", c.tenors.delta);
    c.tenors.period = j.value("period", c.tenors.period);
    if (j.contains("exposure_mode"))
      c.exposure_mode = exposure_mode_from_string(j.at("exposure_mode").get<std::string>());
    if (j.contains("exposure_cap") && !j.at("exposure_cap").is_null())
      c.exposure_cap = j.at("exposure_cap").get<double>();
    c.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("waterfall: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("waterfall: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("waterfall: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const WaterfallConfig& c) {
  nlohmann::json j = {{"alpha_im", c.alpha_im},
                      {"beta_df", c.beta_df},
                      {"im_method", to_string(c.im_method)},
                      {"im_measure", prob::to_string(c.im_measure)},
                      {"liquidation_recovery", c.liquidation_recovery},
                      {"skin_in_game", c.skin_in_game},
                      {"delta_f", c.tenors.delta_f},
                      {"delta", c.tenors.delta},
                      {"period", c.tenors.period},
                      {"exposure_mode", to_string(c.exposure_mode)}};
  j["exposure_cap"] = c.exposure_cap ? nlohmann::json(*c.exposure_cap) : nlohmann::json(nullptr);
  return j;
}

double variation_margin(double member_value_prev) { return member_value_prev; }

double initial_margin(const prob::DiscreteDistribution& x_law, ImMethod method, const prob::RiskMeasureSpec& rho) {
  rho.validate();
  switch (method) {
    case ImMethod::PosPart:
      return std::max(0.0, rho.evaluate(x_law.map([](double v) { return 0.0 - std::max(v, 0.0); })));
    case ImMethod::PosOfRho:
      return std::max(0.0, rho.evaluate(x_law.map([](double v) { return -v; })));
  }
  throw std::logic_error("unknown IM method");
}

double initial_margin(const prob::DiscreteDistribution& x_law, const WaterfallConfig& cfg) {
  return initial_margin(x_law, cfg.im_method, prob::RiskMeasureSpec{cfg.im_measure, cfg.alpha_im});
}

double exposure_summand(const DefaultMarks& m, double liquidation_recovery, ExposureMode mode) {
  if (mode == ExposureMode::Regulatory) return m.value_after - m.vm - m.im;
  return (1.0 - liquidation_recovery) * m.value_after + m.dividends - m.vm - m.im;
}

double member_period_exposure(int default_time, int period_start, int period_end, const DefaultMarks& marks,
                              const WaterfallConfig& cfg, double cap) {
  if (default_time <= period_start || default_time > period_end) return 0.0;
  const double s = exposure_summand(marks, cfg.liquidation_recovery, cfg.exposure_mode);
  return std::min(cap, std::max(0.0, s));
}

double default_shortfall(const DefaultMarks& m, double liquidation_recovery) {
  return (1.0 - liquidation_recovery) * m.value_after - m.vm - m.im;
}

ExposureSamples::ExposureSamples(int members, std::size_t sample_count) : members_(members), n_(sample_count) {
  if (members < 1) throw std::domain_error("exposure samples need at least one member");
}

ExposureSamples ExposureSamples::from_dense(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::domain_error("exposure samples: no rows");
  ExposureSamples s(static_cast<int>(rows.front().size()), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw std::domain_error("exposure samples: ragged rows");
    for (std::size_t i = 0; i < rows[r].size(); ++i) s.add(r, static_cast<int>(i), rows[r][i]);
  }
  return s;
}

void ExposureSamples::add(std::size_t sample, int member, double ep) {
  if (sample >= n_ || member < 0 || member >= members_) throw std::domain_error("exposure sample out of range");
  if (!(ep >= 0.0) || !std::isfinite(ep)) throw std::domain_error("exposures must be finite and nonnegative");
  if (!entries_.empty() && sample < entries_.back().sample)
    throw std::domain_error("exposure samples must be added in sample order");
  if (ep > 0.0) entries_.push_back({sample, member, ep});
}

ExposureSamples ExposureSamples::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > n_) throw std::domain_error("exposure sample slice out of range");
  ExposureSamples out(members_, end - begin);
  for (const auto& e : entries_)
    if (e.sample >= begin && e.sample < end) out.entries_.push_back({e.sample - begin, e.member, e.ep});
  return out;
}

std::vector<std::pair<std::size_t, double>> ExposureSamples::totals() const {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& e : entries_) {
    if (out.empty() || out.back().first != e.sample) out.emplace_back(e.sample, 0.0);
    out.back().second += e.ep;
  }
  return out;
}

DefaultFundResult default_fund(const ExposureSamples& samples, double beta) {
  if (samples.sample_count() == 0) throw std::domain_error("default_fund: no samples");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("default_fund: level must lie in (0,1]");
  const double n = static_cast<double>(samples.sample_count());
  auto totals = samples.totals();
  // Largest loss first; sample index breaks ties so the order is canonical.
  std::sort(totals.begin(), totals.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  // Loss levels with their sample counts; the zero level comes last.
  struct Level {
    double loss;
    std::size_t first, count;  // range in `totals`
  };
  std::vector<Level> levels;
  for (std::size_t k = 0; k < totals.size(); ++k) {
    if (!levels.empty() && prob::same_atom_value(levels.back().loss, totals[k].second)) ++levels.back().count;
    else levels.push_back({totals[k].second, k, 1});
  }
  const std::size_t zeros = samples.sample_count() - totals.size();
  if (zeros > 0) levels.push_back({0.0, totals.size(), zeros});

  DefaultFundResult r;
  // Total: the tail average over the first beta*n samples in loss order.
  {
    const double tail = beta * n;
    double taken = 0.0;
    double acc = 0.0;
    for (const auto& lv : levels) {
      const double c = static_cast<double>(lv.count);
      if (taken + c > tail) {
        acc += lv.loss * (tail - taken);
        taken = tail;
        break;
      }
      acc += lv.loss * c;
      taken += c;
    }
    r.total = acc / tail;
  }

  // Allocation: extreme density on the sample space.
  std::vector<double> weight(totals.size(), 0.0);
  double before = 0.0;
  for (const auto& lv : levels) {
    const double c = static_cast<double>(lv.count);
    if (before + c >= beta * n) {
      r.quantile = -lv.loss;
      r.epsilon = std::clamp((beta * n - before) / c, 0.0, 1.0);
      for (std::size_t k = lv.first; k < lv.first + lv.count && k < totals.size(); ++k) weight[k] = r.epsilon / beta;
      break;
    }
    for (std::size_t k = lv.first; k < lv.first + lv.count && k < totals.size(); ++k) weight[k] = 1.0 / beta;
    before += c;
  }
  std::vector<std::pair<std::size_t, double>> z_of_sample(totals.size());
  for (std::size_t k = 0; k < totals.size(); ++k) z_of_sample[k] = {totals[k].first, weight[k]};
  std::sort(z_of_sample.begin(), z_of_sample.end());

  r.allocation.assign(samples.members(), 0.0);
  std::size_t cursor = 0;
  for (const auto& e : samples.entries()) {
    while (z_of_sample[cursor].first != e.sample) ++cursor;
    r.allocation[e.member] += z_of_sample[cursor].second * e.ep;
  }
  for (auto& a : r.allocation) a /= n;
  return r;
}

double effective_loss(std::span<const double> shortfalls, double skin_in_game, double df_total) {
  const double s = std::accumulate(shortfalls.begin(), shortfalls.end(), 0.0);
  return std::max(0.0, s - skin_in_game - df_total);
}

std::vector<double> unfunded_df(double el, std::span<const double> df_contributions, const std::vector<bool>& alive) {
  if (alive.size() != df_contributions.size()) throw std::domain_error("unfunded_df: length mismatch");
  std::vector<double> out(df_contributions.size(), 0.0);
  double denom = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (alive[i]) denom += df_contributions[i];
  if (!(denom > 0.0) || el == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (alive[i]) out[i] = el * df_contributions[i] / denom;
  return out;
}

}  // namespace ccpwf::waterfall
