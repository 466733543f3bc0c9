#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccpwf/cds/contract.hpp"
#include "ccpwf/cds/exposure.hpp"
#include "ccpwf/migration/joint_model.hpp"
#include "ccpwf/migration/transition_matrix.hpp"
#include "ccpwf/waterfall/waterfall.hpp"
#include "json.hpp"

namespace ccpwf::sim {

// Named initial rating configuration. ALL_ONES and ALL_SEVENS expand to the
// book's member count; otherwise `ratings` is used as given.
struct InitialState {
  std::string name;
  std::vector<int> ratings;

  migration::JointState resolve(int members, int rating_count) const;
};

struct NamedPortfolio {
  std::string name;
  std::vector<double> positions;
};

struct ScalingConfig {
  std::vector<int> counts = {4, 8, 16};
  // Block replicated across member counts; unset means the study book.
  std::optional<cds::PositionMatrix> base;
  migration::Dependence dependence = migration::Dependence::TypeI;
  InitialState initial{"ALL_SEVENS", {}};
  double alpha = 0.01;
  double beta = 0.01;
};

struct ExperimentConfig {
  cds::Date evaluation_date = cds::make_date(2015, 9, 22);
  int days_per_year = 252;
  std::vector<cds::CdsContract> contracts;
  cds::PositionMatrix positions = cds::PositionMatrix::preset("balanced");
  // Single-member books for the IM study.
  std::vector<NamedPortfolio> im_portfolios;

  migration::RatingTransitionMatrix annual = migration::RatingFamily{}.annual_matrix();
  std::vector<int> trigger_ratings;  // empty: {3, ..., K-1}
  std::vector<migration::Dependence> dependence = {migration::Dependence::TypeI, migration::Dependence::TypeII,
                                                   migration::Dependence::TypeIII};
  std::vector<InitialState> initial_states = {{"ALL_ONES", {}}, {"ALL_SEVENS", {}}};

  waterfall::WaterfallConfig waterfall;
  int paths_reference = 100;
  int paths_migration = 10000;
  int batches = 20;
  std::uint64_t seed = 20150922;
  std::vector<double> alpha_grid = {0.01};
  std::vector<double> beta_grid = {0.01};
  ScalingConfig scaling;
  int threads = 0;  // 0: hardware concurrency

  // Steps of the rating chain per year (days_per_year / delta_f).
  int steps_per_year() const;
  double exposure_cap() const;

  // Throws ConfigError on any inconsistency.
  void validate() const;
};

// Relative paths inside the JSON (position CSV, matrix CSV) resolve against
// `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace ccpwf::sim
