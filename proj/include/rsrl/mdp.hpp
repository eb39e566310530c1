#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsrl {

/// Bad user-facing configuration (schedules, initial iterates, sizes).
class ConfigurationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A bound that holds exactly in exact arithmetic was violated at runtime.
/// Firing means an implementation bug, never bad luck.
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Finite MDP with a uniform action count.
///
/// Flat layouts:
///   rewards[s*A + a]
///   transitions[(s*A + a)*S + s']
/// The state-action index s*A + a is also the layout of every UtilityVector,
/// QVector and policy table.
struct TabularMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  double discount = 0.0;  // gamma
  double risk = 0.0;      // theta; the operators use theta/gamma internally
  std::vector<double> rewards;
  std::vector<double> transitions;

  std::size_t num_pairs() const { return num_states * num_actions; }
  std::size_t pair(std::size_t s, std::size_t a) const { return s * num_actions + a; }

  double reward(std::size_t s, std::size_t a) const { return rewards[pair(s, a)]; }
  double prob(std::size_t s, std::size_t a, std::size_t next) const {
    return transitions[pair(s, a) * num_states + next];
  }
  /// Pointer to the row P(.|s,a), length num_states.
  const double* row(std::size_t sa) const { return transitions.data() + sa * num_states; }

  double reward_sup() const;
  double theta_hat() const { return risk / discount; }

  bool operator==(const TabularMdp&) const = default;
};

/// Positive vector on the exponential-utility scale.
struct UtilityVector {
  std::vector<double> values;

  UtilityVector() = default;
  explicit UtilityVector(std::vector<double> v) : values(std::move(v)) {}
  static UtilityVector constant(std::size_t n, double c) { return UtilityVector(std::vector<double>(n, c)); }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const UtilityVector&) const = default;
};

/// Real vector on the certainty-equivalent (reward) scale.
struct QVector {
  std::vector<double> values;

  QVector() = default;
  explicit QVector(std::vector<double> v) : values(std::move(v)) {}
  static QVector constant(std::size_t n, double c) { return QVector(std::vector<double>(n, c)); }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const QVector&) const = default;
};

struct StationaryPolicy {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> probs;  // probs[s*A + a] = pi(a|s)

  StationaryPolicy() = default;
  StationaryPolicy(std::size_t states, std::size_t actions)
      : num_states(states), num_actions(actions), probs(states * actions, 0.0) {}

  static StationaryPolicy deterministic(std::size_t num_actions, const std::vector<std::size_t>& actions);
  static StationaryPolicy uniform(std::size_t num_states, std::size_t num_actions);

  double operator()(std::size_t s, std::size_t a) const { return probs[s * num_actions + a]; }
  double& operator()(std::size_t s, std::size_t a) { return probs[s * num_actions + a]; }

  bool is_deterministic() const;
  /// Chosen action per state; throws std::logic_error for randomized policies.
  std::vector<std::size_t> actions() const;
  /// Empty when valid; otherwise one message per bad row.
  std::vector<std::string> validate() const;

  bool operator==(const StationaryPolicy&) const = default;
};

struct DerivedConstants {
  double theta_hat = 0.0;
  double c_max = 0.0;
  double c_ell = 1.0;
  double c_u = 1.0;
  /// ln c_u; kept separately because c_u itself can overflow.
  double log_c_u = 0.0;
};

struct Violation {
  std::string what;  // e.g. "row_sum", "discount", "probability_range"
  std::ptrdiff_t state = -1;
  std::ptrdiff_t action = -1;
  std::ptrdiff_t next_state = -1;
  std::string message;
};

constexpr double kRowSumTolerance = 1e-12;

std::vector<Violation> validate_mdp(const TabularMdp& mdp);

/// Throws ConfigurationError listing the first violations when the report is
/// not empty.
void require_valid(const TabularMdp& mdp);

DerivedConstants derived_constants(const TabularMdp& mdp);

/// max_i |ln x1_i - ln x2_i|. Throws std::domain_error on non-positive input
/// and std::invalid_argument on a length mismatch.
double sup_log_distance(const UtilityVector& x1, const UtilityVector& x2);

double linf_distance(const QVector& q1, const QVector& q2);
double linf_norm(const std::vector<double>& v);

/// Two states {s, s_bar}. At s: action 0 "safe" (reward 0, self loop),
/// action 1 "risk" (reward 1, moves to s_bar with probability 0.01).
/// s_bar is absorbing with reward -10; its single action is duplicated into
/// both action slots. gamma = 0.9, theta = 0.1.
TabularMdp two_state_risky_fixture();

namespace fixture {
inline constexpr std::size_t kS = 0;
inline constexpr std::size_t kSBar = 1;
inline constexpr std::size_t kSafe = 0;
inline constexpr std::size_t kRisk = 1;
}  // namespace fixture

struct RewardRange {
  double lo = -1.0;
  double hi = 1.0;
};

/// Random MDP with strictly positive transition rows (normalized exponential
/// draws) and rewards uniform in the range. Deterministic in `seed`.
TabularMdp random_mdp(std::size_t num_states, std::size_t num_actions, RewardRange rewards,
                      double discount, double risk, std::uint64_t seed);

/// One state, one action, deterministic reward r.
TabularMdp single_state_mdp(double reward, double discount, double risk);

}  // namespace rsrl
