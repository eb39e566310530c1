#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rsrl/mdp.hpp"

namespace rsrl {

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iter = 1'000'000;
};

/// Picard iteration output. `final_residual` is the metric distance between
/// the last two iterates. converged => final_residual <= tol*(1-gamma)/gamma,
/// which certifies distance to the fixed point <= tol.
template <class Vector>
struct FixedPointResult {
  Vector solution;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

/// Utility-scale result. `log_solution` is always filled; `solution` may hold
/// +inf / 0 entries when ln c_u > kLogSpaceThreshold (the iteration then runs
/// entirely in log coordinates).
struct UtilityFixedPoint : FixedPointResult<UtilityVector> {
  std::vector<double> log_solution;
};

inline constexpr double kLogSpaceThreshold = 300.0;

/// Stopping threshold on successive differences that certifies `tol` distance
/// to the fixed point of a gamma-contraction.
double a_posteriori_threshold(double tol, double gamma);

UtilityFixedPoint fixed_point_F(const TabularMdp& mdp, std::optional<UtilityVector> x0 = std::nullopt,
                                const SolverOptions& opts = {});

FixedPointResult<QVector> fixed_point_T(const TabularMdp& mdp, std::optional<QVector> q0 = std::nullopt,
                                        const SolverOptions& opts = {});

/// Value iteration on the risk-neutral Bellman operator (sup-norm stopping
/// rule as for T).
FixedPointResult<QVector> fixed_point_risk_neutral(const TabularMdp& mdp, std::optional<QVector> q0 = std::nullopt,
                                                   const SolverOptions& opts = {});

/// X_pi as the fixed point of F_pi, iterated from all-ones.
UtilityFixedPoint policy_utility(const TabularMdp& mdp, const StationaryPolicy& pi, const SolverOptions& opts = {});

struct EnumeratedPolicy {
  std::vector<std::size_t> actions;
  UtilityFixedPoint utility;
};

inline constexpr std::size_t kDefaultEnumerationCap = 100'000;

/// Decodes policy index k (mixed radix, state 0 least significant).
std::vector<std::size_t> decode_policy_index(std::size_t index, std::size_t num_states, std::size_t num_actions);

/// Number of deterministic stationary policies, or nullopt when it exceeds `cap`.
std::optional<std::size_t> count_deterministic_policies(std::size_t num_states, std::size_t num_actions,
                                                        std::size_t cap);

/// Evaluates every deterministic stationary policy, in index order.
/// Throws ConfigurationError when A^S exceeds `cap`.
std::vector<EnumeratedPolicy> enumerate_policy_utilities(const TabularMdp& mdp, const SolverOptions& opts = {},
                                                         std::size_t cap = kDefaultEnumerationCap);

/// Raised when no enumerated policy dominates all others elementwise.
class OracleInconsistency : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct BruteForceResult {
  StationaryPolicy policy;
  UtilityFixedPoint utility;
  std::size_t policy_index = 0;
  std::size_t num_policies = 0;
};

/// Elementwise-minimal X_pi over all deterministic stationary policies.
/// Dominance is checked in log coordinates with slack 10*tol.
BruteForceResult brute_force_optimal(const TabularMdp& mdp, const SolverOptions& opts = {},
                                     std::size_t cap = kDefaultEnumerationCap);

struct MonteCarloOptions {
  std::size_t horizon = 0;  // 0: use truncation_horizon(mdp)
  std::size_t num_episodes = 100'000;
  std::uint64_t seed = 0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t horizon = 0;
  std::size_t num_episodes = 0;
};

/// Smallest H >= 1 with gamma^H * theta_hat * |r|_inf / (1-gamma) <= 1e-6.
std::size_t truncation_horizon(const TabularMdp& mdp);

/// Mean and standard error of exp(-theta_hat sum_{j<H} gamma^j r_j) over
/// episodes that start at (s,a) and then follow pi. Episode i draws from
/// CounterRng(seed, i + 1); the reduction runs in episode order.
MonteCarloEstimate monte_carlo_utility(const TabularMdp& mdp, const StationaryPolicy& pi, std::size_t s,
                                       std::size_t a, const MonteCarloOptions& opts = {});

}  // namespace rsrl
