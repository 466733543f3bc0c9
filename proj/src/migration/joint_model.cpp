#include "ccpwf/migration/joint_model.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ccpwf/errors.hpp"

namespace ccpwf::migration {

std::string to_string(Dependence d) {
  switch (d) {
    case Dependence::TypeI: return "TYPE_I";
    case Dependence::TypeII: return "TYPE_II";
    case Dependence::TypeIII: return "TYPE_III";
  }
  return "?";
}

Dependence dependence_from_string(const std::string& s) {
  if (s == "TYPE_I") return Dependence::TypeI;
  if (s == "TYPE_II") return Dependence::TypeII;
  if (s == "TYPE_III") return Dependence::TypeIII;
  throw ConfigError("unknown dependence type '" + s + "' (expected TYPE_I, TYPE_II or TYPE_III)");
}

JointMigrationModel::JointMigrationModel(std::vector<RatingTransitionMatrix> marginals,
                                         Dependence dependence, std::vector<int> trigger_ratings)
    : marginals_(std::move(marginals)), dependence_(dependence), triggers_(std::move(trigger_ratings)) {
  if (marginals_.empty()) throw std::domain_error("joint model needs at least one member");
  const int k = marginals_.front().size();
  for (const auto& m : marginals_)
    if (m.size() != k) throw std::domain_error("joint model: marginals differ in size");
  if (triggers_.empty())
    for (int x = 3; x <= k - 1; ++x) triggers_.push_back(x);
  for (int x : triggers_)
    if (x < 1 || x >= k) throw std::domain_error("joint model: trigger rating out of range");
}

JointMigrationModel JointMigrationModel::homogeneous(const RatingTransitionMatrix& p, int members,
                                                     Dependence dependence,
                                                     std::vector<int> trigger_ratings) {
  if (members < 1) throw std::domain_error("joint model needs at least one member");
  return JointMigrationModel(std::vector<RatingTransitionMatrix>(members, p), dependence,
                             std::move(trigger_ratings));
}

bool JointMigrationModel::is_trigger(int rating) const {
  return std::find(triggers_.begin(), triggers_.end(), rating) != triggers_.end();
}

void JointMigrationModel::validate(const JointState& s) const {
  if (static_cast<int>(s.ratings.size()) != member_count())
    throw std::domain_error("joint state has " + std::to_string(s.ratings.size()) + " ratings, expected " +
                            std::to_string(member_count()));
  for (int x : s.ratings)
    if (x < 1 || x > rating_count()) throw std::domain_error("rating " + std::to_string(x) + " out of range");
}

namespace {

using Outcomes = std::vector<std::pair<int, double>>;  // (next rating, prob)

constexpr double kFeasibilityTolerance = 1e-14;

Outcomes marginal_outcomes(const JointMigrationModel& model, int member, int x) {
  Outcomes out;
  const auto row = model.marginal(member).row(x);
  for (int y = 1; y <= model.rating_count(); ++y)
    if (row[y - 1] > 0.0) out.emplace_back(y, row[y - 1]);
  return out;
}

// ---- Type II ----------------------------------------------------------------
//
// Trigger indicators D_i ~ Bernoulli(q_i) are independent, q_i being the
// marginal default probability of a member sitting on a trigger rating.
// Given D_j = 0, member j keeps its non-upgrade moves at p/(1-q_j). Upgrades
// happen only when no other member triggers, with probability
// u/((1-q_j) pi_j), pi_j = prod_{i != j} (1-q_i). Stay absorbs the rest.

struct TypeTwoMember {
  int rating = 0;
  double q = 0.0;
  double pi = 1.0;
  Outcomes moves;     // non-stay, non-trigger-default moves, unconditional probs
  bool eligible = false;
};

std::vector<TypeTwoMember> type_two_setup(const JointState& s, const JointMigrationModel& model) {
  const int k = model.rating_count();
  const int n = model.member_count();
  std::vector<TypeTwoMember> m(n);
  for (int i = 0; i < n; ++i) {
    const int x = s.ratings[i];
    m[i].rating = x;
    if (x == k) continue;
    for (auto [y, p] : marginal_outcomes(model, i, x)) {
      if (y == x) continue;
      if (y == k && model.is_trigger(x)) {
        m[i].q = p;
        m[i].eligible = true;
        continue;
      }
      m[i].moves.emplace_back(y, p);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      if (l != i && m[l].eligible) m[i].pi *= 1.0 - m[l].q;
  for (int i = 0; i < n; ++i) {
    if (m[i].rating == k || m[i].q >= 1.0) continue;
    double moved = 0.0;
    for (auto [y, p] : m[i].moves) {
      if (y < m[i].rating) {
        if (m[i].pi <= 0.0)
          throw InfeasibleRowError(static_cast<std::size_t>(i), "upgrade",
                                   "TYPE_II: member " + std::to_string(i) +
                                       " cannot upgrade, another member defaults surely");
        moved += p / ((1.0 - m[i].q) * m[i].pi);
      } else {
        moved += p / (1.0 - m[i].q);
      }
    }
    if (moved > 1.0 + kFeasibilityTolerance)
      throw InfeasibleRowError(static_cast<std::size_t>(i), "upgrade",
                               "TYPE_II: upgrade mass of member " + std::to_string(i) + " from rating " +
                                   std::to_string(m[i].rating) + " exceeds the stay probability");
  }
  return m;
}

// Law of member i given its own trigger flag and whether another member
// triggered.
Outcomes type_two_conditional(const TypeTwoMember& m, int k, bool triggered, bool other_triggered) {
  if (m.rating == k || triggered) return {{k, 1.0}};
  Outcomes out;
  double moved = 0.0;
  for (auto [y, p] : m.moves) {
    double c;
    if (y < m.rating) c = other_triggered ? 0.0 : p / ((1.0 - m.q) * m.pi);
    else c = p / (1.0 - m.q);
    if (c > 0.0) {
      out.emplace_back(y, c);
      moved += c;
    }
  }
  const double stay = std::max(0.0, 1.0 - moved);
  if (stay > 0.0) out.emplace_back(m.rating, stay);
  return out;
}

// ---- Type III ---------------------------------------------------------------
//
// Direction key: offset y - x, or kDefaultKey for a move into K. The common
// move in direction k carries w_k = min over active members of p_i(k); member
// i alone moves in direction k with the residual p_i(k) - w_k.

constexpr int kDefaultKey = std::numeric_limits<int>::min();

struct TypeThreeCategory {
  int member = -1;  // -1: all active members move together
  int key = 0;
  double prob = 0.0;
  bool stay_all = false;
};

int target_of(int x, int key, int k) { return key == kDefaultKey ? k : x + key; }

std::vector<TypeThreeCategory> type_three_categories(const JointState& s, const JointMigrationModel& model) {
  const int k = model.rating_count();
  const int n = model.member_count();
  std::vector<std::map<int, double>> dir(n);
  std::vector<int> keys;
  bool any_active = false;
  for (int i = 0; i < n; ++i) {
    const int x = s.ratings[i];
    if (x == k) continue;
    any_active = true;
    for (auto [y, p] : marginal_outcomes(model, i, x)) {
      if (y == x) continue;
      const int key = (y == k) ? kDefaultKey : y - x;
      dir[i][key] += p;
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<TypeThreeCategory> cats;
  if (!any_active) {
    cats.push_back({-1, 0, 1.0, true});
    return cats;
  }
  double total = 0.0;
  std::vector<double> w(keys.size(), 0.0);
  for (std::size_t a = 0; a < keys.size(); ++a) {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (s.ratings[i] == k) continue;
      auto it = dir[i].find(keys[a]);
      lo = std::min(lo, it == dir[i].end() ? 0.0 : it->second);
    }
    w[a] = lo;
    if (lo > 0.0) {
      cats.push_back({-1, keys[a], lo, false});
      total += lo;
    }
  }
  int worst_member = 0;
  double worst_mass = -1.0;
  for (int i = 0; i < n; ++i) {
    if (s.ratings[i] == k) continue;
    double mass = 0.0;
    for (std::size_t a = 0; a < keys.size(); ++a) {
      auto it = dir[i].find(keys[a]);
      const double r = (it == dir[i].end() ? 0.0 : it->second) - w[a];
      if (r > 0.0) {
        cats.push_back({i, keys[a], r, false});
        total += r;
        mass += r;
      }
    }
    if (mass > worst_mass) {
      worst_mass = mass;
      worst_member = i;
    }
  }
  double stay = 1.0 - total;
  if (stay < -kFeasibilityTolerance)
    throw InfeasibleRowError(static_cast<std::size_t>(worst_member), "stay",
                             "TYPE_III: single-member residuals exceed one (stay-all mass " +
                                 std::to_string(stay) + ", largest residual at member " +
                                 std::to_string(worst_member) + ")");
  stay = std::max(stay, 0.0);
  if (stay > 0.0) cats.push_back({-1, 0, stay, true});
  return cats;
}

JointState apply_category(const JointState& s, const TypeThreeCategory& c, int k) {
  JointState next = s;
  if (c.stay_all) return next;
  if (c.member >= 0) {
    next.ratings[c.member] = target_of(s.ratings[c.member], c.key, k);
    return next;
  }
  for (auto& x : next.ratings)
    if (x != k) x = target_of(x, c.key, k);
  return next;
}

// Walks a discrete law with a uniform draw. The last entry absorbs rounding.
template <class T, class Prob>
const T& pick(const std::vector<T>& items, double u, Prob prob) {
  double cum = 0.0;
  for (const auto& it : items) {
    cum += prob(it);
    if (u < cum) return it;
  }
  return items.back();
}

void add_product(std::map<JointState, double>& acc, const std::vector<Outcomes>& per_member, double weight) {
  const std::size_t n = per_member.size();
  std::vector<std::size_t> idx(n, 0);
  JointState s;
  s.ratings.resize(n);
  while (true) {
    double p = weight;
    for (std::size_t i = 0; i < n; ++i) {
      s.ratings[i] = per_member[i][idx[i]].first;
      p *= per_member[i][idx[i]].second;
    }
    if (p > 0.0) acc[s] += p;
    std::size_t i = 0;
    while (i < n && ++idx[i] == per_member[i].size()) idx[i++] = 0;
    if (i == n) break;
  }
}

std::vector<JointOutcome> flatten(const std::map<JointState, double>& acc) {
  std::vector<JointOutcome> out;
  out.reserve(acc.size());
  for (const auto& [s, p] : acc) out.push_back({s, p});
  return out;
}

}  // namespace

std::vector<JointOutcome> joint_transition_row(const JointState& state, const JointMigrationModel& model) {
  model.validate(state);
  const int n = model.member_count();
  const int k = model.rating_count();
  std::map<JointState, double> acc;

  switch (model.dependence()) {
    case Dependence::TypeI: {
      std::vector<Outcomes> per(n);
      for (int i = 0; i < n; ++i) per[i] = marginal_outcomes(model, i, state.ratings[i]);
      add_product(acc, per, 1.0);
      break;
    }
    case Dependence::TypeII: {
      const auto m = type_two_setup(state, model);
      std::vector<int> eligible;
      for (int i = 0; i < n; ++i)
        if (m[i].eligible) eligible.push_back(i);
      const std::size_t patterns = std::size_t{1} << eligible.size();
      std::vector<char> fired(n, 0);
      for (std::size_t mask = 0; mask < patterns; ++mask) {
        double w = 1.0;
        int fired_count = 0;
        std::fill(fired.begin(), fired.end(), 0);
        for (std::size_t b = 0; b < eligible.size(); ++b) {
          const int i = eligible[b];
          if (mask >> b & 1U) {
            fired[i] = 1;
            ++fired_count;
            w *= m[i].q;
          } else {
            w *= 1.0 - m[i].q;
          }
        }
        if (w <= 0.0) continue;
        std::vector<Outcomes> per(n);
        for (int i = 0; i < n; ++i)
          per[i] = type_two_conditional(m[i], k, fired[i] != 0, fired_count - fired[i] > 0);
        add_product(acc, per, w);
      }
      break;
    }
    case Dependence::TypeIII: {
      for (const auto& c : type_three_categories(state, model)) acc[apply_category(state, c, k)] += c.prob;
      break;
    }
  }
  return flatten(acc);
}

JointState sample_next(const JointState& state, const JointMigrationModel& model, CounterRng& rng) {
  const int n = model.member_count();
  const int k = model.rating_count();
  switch (model.dependence()) {
    case Dependence::TypeI: {
      JointState next = state;
      for (int i = 0; i < n; ++i) {
        const int x = state.ratings[i];
        if (x == k) continue;
        const auto row = model.marginal(i).row(x);
        const double u = rng.uniform();
        double cum = 0.0;
        int y = x;
        for (int c = 1; c <= k; ++c) {
          if (row[c - 1] <= 0.0) continue;
          cum += row[c - 1];
          y = c;
          if (u < cum) break;
        }
        next.ratings[i] = y;
      }
      return next;
    }
    case Dependence::TypeII: {
      const auto m = type_two_setup(state, model);
      std::vector<char> fired(n, 0);
      int fired_count = 0;
      for (int i = 0; i < n; ++i) {
        if (!m[i].eligible) continue;
        if (rng.uniform() < m[i].q) {
          fired[i] = 1;
          ++fired_count;
        }
      }
      JointState next = state;
      for (int i = 0; i < n; ++i) {
        const auto law = type_two_conditional(m[i], k, fired[i] != 0, fired_count - fired[i] > 0);
        next.ratings[i] = pick(law, rng.uniform(), [](const auto& o) { return o.second; }).first;
      }
      return next;
    }
    case Dependence::TypeIII: {
      const auto cats = type_three_categories(state, model);
      const auto& c = pick(cats, rng.uniform(), [](const auto& x) { return x.prob; });
      return apply_category(state, c, k);
    }
  }
  throw std::logic_error("unknown dependence type");
}

MigrationPath simulate_path(const JointMigrationModel& model, const JointState& initial, int horizon_steps,
                            std::uint64_t seed, std::uint64_t path_index) {
  model.validate(initial);
  if (horizon_steps < 1) throw std::domain_error("simulate_path: horizon must be >= 1");
  const int n = model.member_count();
  const int k = model.rating_count();
  CounterRng rng(seed, Stream::Migration, path_index);
  MigrationPath path;
  path.states.reserve(horizon_steps + 1);
  path.states.push_back(initial);
  path.default_times.assign(n, MigrationPath::kNoDefault);
  for (int i = 0; i < n; ++i)
    if (initial.ratings[i] == k) path.default_times[i] = 0;
  for (int t = 1; t <= horizon_steps; ++t) {
    JointState next = sample_next(path.states.back(), model, rng);
    for (int i = 0; i < n; ++i) {
      if (path.default_times[i] != MigrationPath::kNoDefault) next.ratings[i] = k;
      else if (next.ratings[i] == k) path.default_times[i] = t;
    }
    path.states.push_back(std::move(next));
  }
  return path;
}

bool survival_indicator(const MigrationPath& path, int member, int t) {
  if (member < 0 || member >= static_cast<int>(path.default_times.size()))
    throw std::domain_error("survival_indicator: member out of range");
  if (t < 0 || t > path.horizon()) throw std::domain_error("survival_indicator: time out of range");
  return path.default_times[member] > t;
}

}  // namespace ccpwf::migration
