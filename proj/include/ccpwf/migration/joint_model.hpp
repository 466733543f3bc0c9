#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ccpwf/migration/transition_matrix.hpp"
#include "ccpwf/rng.hpp"

namespace ccpwf::migration {

// Dependence between the members' one-step moves.
//   TypeI   independent members.
//   TypeII  a jump to default by any member rules out upgrades of the others
//           on the same step.
//   TypeIII either all active members move in the same direction together,
//           or exactly one member moves while the rest stay put.
enum class Dependence { TypeI, TypeII, TypeIII };

std::string to_string(Dependence d);
// Accepts "TYPE_I", "TYPE_II", "TYPE_III"; throws ConfigError otherwise.
Dependence dependence_from_string(const std::string& s);

struct JointState {
  std::vector<int> ratings;

  bool operator==(const JointState&) const = default;
  auto operator<=>(const JointState&) const = default;
};

class JointMigrationModel {
 public:
  // trigger_ratings: ratings whose transition to default counts as a jump to
  // default for TypeII. Empty means {3, ..., K-1}.
  JointMigrationModel(std::vector<RatingTransitionMatrix> marginals, Dependence dependence,
                      std::vector<int> trigger_ratings = {});

  static JointMigrationModel homogeneous(const RatingTransitionMatrix& p, int members,
                                         Dependence dependence,
                                         std::vector<int> trigger_ratings = {});

  int member_count() const { return static_cast<int>(marginals_.size()); }
  int rating_count() const { return marginals_.front().size(); }
  Dependence dependence() const { return dependence_; }
  const RatingTransitionMatrix& marginal(int member) const { return marginals_.at(member); }
  const std::vector<int>& trigger_ratings() const { return triggers_; }
  bool is_trigger(int rating) const;

  // Throws std::domain_error on wrong length or ratings outside 1..K.
  void validate(const JointState& s) const;

 private:
  std::vector<RatingTransitionMatrix> marginals_;
  Dependence dependence_;
  std::vector<int> triggers_;
};

struct JointOutcome {
  JointState next;
  double prob = 0.0;
};

// Full one-step law from `state`, merged and sorted by next state. Size grows
// exponentially in the member count; meant for small books and verification.
// Throws InfeasibleRowError when the dependence construction cannot match the
// marginal rows.
std::vector<JointOutcome> joint_transition_row(const JointState& state,
                                               const JointMigrationModel& model);

// Draws the next joint state from the same law as joint_transition_row
// without materializing it.
JointState sample_next(const JointState& state, const JointMigrationModel& model, CounterRng& rng);

struct MigrationPath {
  static constexpr int kNoDefault = std::numeric_limits<int>::max();

  // states[t] for t = 0..horizon.
  std::vector<JointState> states;
  // First step at which each member sits in K, or kNoDefault.
  std::vector<int> default_times;

  int horizon() const { return static_cast<int>(states.size()) - 1; }
};

// Path `path_index` of the family fixed by `seed`; draws come from the
// Migration stream with the path index as substream.
MigrationPath simulate_path(const JointMigrationModel& model, const JointState& initial,
                            int horizon_steps, std::uint64_t seed, std::uint64_t path_index = 0);

// True iff member survives past step t.
bool survival_indicator(const MigrationPath& path, int member, int t);

}  // namespace ccpwf::migration
