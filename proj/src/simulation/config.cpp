#include "ccpwf/simulation/config.hpp"

#include <fstream>

#include "ccpwf/errors.hpp"
#include "ccpwf/migration/matrix_io.hpp"

namespace ccpwf::sim {

using nlohmann::json;

migration::JointState InitialState::resolve(int members, int rating_count) const {
  migration::JointState s;
  if (!ratings.empty()) {
    if (static_cast<int>(ratings.size()) != members)
      throw ConfigError("initial state '" + name + "' has " + std::to_string(ratings.size()) +
                        " ratings for " + std::to_string(members) + " members");
    s.ratings = ratings;
  } else if (name == "ALL_ONES") {
    s.ratings.assign(members, 1);
  } else if (name == "ALL_SEVENS") {
    if (rating_count < 8) throw ConfigError("ALL_SEVENS needs at least 8 rating levels");
    s.ratings.assign(members, 7);
  } else {
    throw ConfigError("unknown initial state '" + name + "' (expected ALL_ONES, ALL_SEVENS or explicit ratings)");
  }
  for (int x : s.ratings)
    if (x < 1 || x > rating_count) throw ConfigError("initial rating " + std::to_string(x) + " out of range");
  return s;
}

int ExperimentConfig::steps_per_year() const { return days_per_year / waterfall.tenors.delta_f; }

double ExperimentConfig::exposure_cap() const {
  if (waterfall.exposure_cap) return *waterfall.exposure_cap;
  const double cap = 10.0 * positions.long_notional();
  return cap > 0.0 ? cap : 1.0;
}

void ExperimentConfig::validate() const {
  try {
    waterfall.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  if (days_per_year < 1 || days_per_year % waterfall.tenors.delta_f != 0)
    throw ConfigError("days_per_year must be a positive multiple of delta_f");
  if (contracts.empty()) throw ConfigError("no contracts configured");
  if (static_cast<int>(contracts.size()) != positions.contracts())
    throw ConfigError("positions have " + std::to_string(positions.contracts()) + " columns for " +
                      std::to_string(contracts.size()) + " contracts");
  if (static_cast<int>(contracts.size()) > 20) throw ConfigError("at most 20 contracts are supported");
  for (const auto& c : contracts) {
    if (evaluation_date < c.inception || evaluation_date > c.maturity)
      throw ConfigError("evaluation date lies outside a contract's life");
  }
  for (const auto& p : im_portfolios)
    if (p.positions.size() != contracts.size())
      throw ConfigError("IM portfolio '" + p.name + "' does not match the contract count");
  if (paths_reference < 1 || paths_migration < 1) throw ConfigError("path counts must be positive");
  if (batches < 2) throw ConfigError("at least two batches are needed for standard errors");
  auto grid = [](const std::vector<double>& g, const char* what) {
    if (g.empty()) throw ConfigError(std::string(what) + " is empty");
    for (double v : g)
      if (!(v > 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " entries must lie in (0,1]");
  };
  grid(alpha_grid, "alpha_grid");
  grid(beta_grid, "beta_grid");
  if (waterfall.im_measure != prob::RiskMeasureKind::AVaR)
    for (double a : alpha_grid)
      if (a >= 1.0) throw ConfigError("alpha_grid entries must be below 1 for " + prob::to_string(waterfall.im_measure));
  if (dependence.empty()) throw ConfigError("no dependence types configured");
  if (initial_states.empty()) throw ConfigError("no initial states configured");
  for (const auto& s : initial_states) s.resolve(positions.members(), annual.size());
  for (int x : trigger_ratings)
    if (x < 1 || x >= annual.size()) throw ConfigError("trigger rating out of range");
  for (int n : scaling.counts)
    if (n < 2) throw ConfigError("scaling counts must be at least 2 (a matched book needs two members)");
  if (scaling.base && scaling.base->contracts() != positions.contracts())
    throw ConfigError("scaling base does not match the contract count");
}

namespace {

cds::PositionMatrix positions_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (j.is_string()) return cds::PositionMatrix::preset(j.get<std::string>());
  if (j.is_array()) {
    io::NumericTable rows = j.get<io::NumericTable>();
    return cds::PositionMatrix::from_table(rows);
  }
  if (j.is_object() && j.contains("csv")) return cds::PositionMatrix::read_csv(base_dir / j.at("csv").get<std::string>());
  throw ConfigError("positions must be a preset name, an array of rows or {\"csv\": path}");
}

InitialState initial_from_json(const json& j) {
  if (j.is_string()) return {j.get<std::string>(), {}};
  if (j.is_object()) return {j.value("name", std::string("CUSTOM")), j.at("ratings").get<std::vector<int>>()};
  throw ConfigError("initial state must be a name or {\"name\", \"ratings\"}");
}

json initial_to_json(const InitialState& s) {
  if (s.ratings.empty()) return s.name;
  return {{"name", s.name}, {"ratings", s.ratings}};
}

json positions_to_json(const cds::PositionMatrix& p) {
  json rows = json::array();
  for (int i = 0; i < p.members(); ++i) {
    const auto r = p.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    if (j.contains("evaluation_date")) c.evaluation_date = cds::parse_date(j.at("evaluation_date").get<std::string>());
    c.days_per_year = j.value("days_per_year", c.days_per_year);
    for (const auto& cj : j.at("contracts")) c.contracts.push_back(cds::contract_from_json(cj));
    if (j.contains("positions")) c.positions = positions_from_json(j.at("positions"), base_dir);
    if (j.contains("im_portfolios"))
      for (const auto& [name, v] : j.at("im_portfolios").items())
        c.im_portfolios.push_back({name, v.get<std::vector<double>>()});
    if (j.contains("migration")) {
      const auto& m = j.at("migration");
      if (m.contains("annual")) {
        const auto& a = m.at("annual");
        if (a.is_object() && a.contains("csv")) c.annual = migration::read_matrix_csv(base_dir / a.at("csv").get<std::string>());
        else c.annual = migration::matrix_from_json(a);
      }
      if (m.contains("trigger_ratings")) c.trigger_ratings = m.at("trigger_ratings").get<std::vector<int>>();
    }
    if (j.contains("dependence")) {
      c.dependence.clear();
      for (const auto& d : j.at("dependence")) c.dependence.push_back(migration::dependence_from_string(d.get<std::string>()));
    }
    if (j.contains("initial_states")) {
      c.initial_states.clear();
      for (const auto& s : j.at("initial_states")) c.initial_states.push_back(initial_from_json(s));
    }
    if (j.contains("waterfall")) c.waterfall = waterfall::waterfall_config_from_json(j.at("waterfall"));
    c.paths_reference = j.value("paths_reference", c.paths_reference);
    c.paths_migration = j.value("paths_migration", c.paths_migration);
    c.batches = j.value("batches", c.batches);
    c.seed = j.value("seed", c.seed);
    if (j.contains("alpha_grid")) c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    if (j.contains("beta_grid")) c.beta_grid = j.at("beta_grid").get<std::vector<double>>();
    c.threads = j.value("threads", c.threads);
    if (j.contains("scaling")) {
      const auto& s = j.at("scaling");
      if (s.contains("counts")) c.scaling.counts = s.at("counts").get<std::vector<int>>();
      if (s.contains("base")) c.scaling.base = positions_from_json(s.at("base"), base_dir);
      if (s.contains("dependence")) c.scaling.dependence = migration::dependence_from_string(s.at("dependence").get<std::string>());
      if (s.contains("initial")) c.scaling.initial = initial_from_json(s.at("initial"));
      c.scaling.alpha = s.value("alpha", c.scaling.alpha);
      c.scaling.beta = s.value("beta", c.scaling.beta);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["evaluation_date"] = cds::format_date(c.evaluation_date);
  j["days_per_year"] = c.days_per_year;
  j["contracts"] = json::array();
  for (const auto& k : c.contracts) j["contracts"].push_back(cds::to_json(k));
  j["positions"] = positions_to_json(c.positions);
  j["im_portfolios"] = json::object();
  for (const auto& p : c.im_portfolios) j["im_portfolios"][p.name] = p.positions;
  j["migration"] = {{"annual", migration::to_json(c.annual)}, {"trigger_ratings", c.trigger_ratings}};
  j["dependence"] = json::array();
  for (auto d : c.dependence) j["dependence"].push_back(migration::to_string(d));
  j["initial_states"] = json::array();
  for (const auto& s : c.initial_states) j["initial_states"].push_back(initial_to_json(s));
  j["waterfall"] = waterfall::to_json(c.waterfall);
  j["paths_reference"] = c.paths_reference;
  j["paths_migration"] = c.paths_migration;
  j["batches"] = c.batches;
  j["seed"] = c.seed;
  j["alpha_grid"] = c.alpha_grid;
  j["beta_grid"] = c.beta_grid;
  json s = {{"counts", c.scaling.counts},
            {"dependence", migration::to_string(c.scaling.dependence)},
            {"initial", initial_to_json(c.scaling.initial)},
            {"alpha", c.scaling.alpha},
            {"beta", c.scaling.beta}};
  if (c.scaling.base) s["base"] = positions_to_json(*c.scaling.base);
  j["scaling"] = s;
  return j;
}

}  // namespace ccpwf::sim
