#pragma once

#include <cstddef>
#include <vector>

#include "rsrl/mdp.hpp"

// Bellman-type operators on the exponential-utility (x) and certainty-
// equivalent (Q) scales. The functions in namespace rsrl are the OpenMP
// kernels (parallel over state-action pairs once the problem is large
// enough); rsrl::serial holds plain-loop reference versions with identical
// per-entry arithmetic, kept for testing and benchmarking.
//
// Throughout, theta_hat = theta / gamma and powers x^gamma are evaluated as
// exp(gamma * ln x).

namespace rsrl {

/// Pairs below this count run single-threaded.
inline constexpr std::size_t kParallelPairThreshold = 512;

/// F(x)(s,a) = exp(-theta_hat r(s,a)) * sum_s' P(s'|s,a) [min_a' x(s',a')]^gamma
UtilityVector apply_F(const TabularMdp& mdp, const UtilityVector& x);

/// F_pi(x)(s,a) = exp(-theta_hat r(s,a)) * sum_{s',a'} P(s'|s,a) pi(a'|s') x(s',a')^gamma
UtilityVector apply_F_pi(const TabularMdp& mdp, const StationaryPolicy& pi, const UtilityVector& x);

/// F on log-coordinates: returns ln F(exp(log_x)). Used when x itself would
/// overflow a double.
std::vector<double> apply_F_log(const TabularMdp& mdp, const std::vector<double>& log_x);
std::vector<double> apply_F_pi_log(const TabularMdp& mdp, const StationaryPolicy& pi,
                                   const std::vector<double>& log_x);

/// T(Q)(s,a) = r(s,a) - (gamma/theta) ln sum_s' P(s'|s,a) exp(-theta max_a' Q(s',a')),
/// with the log-sum-exp shifted by its largest exponent.
QVector apply_T(const TabularMdp& mdp, const QVector& q);

/// r(s,a) + gamma * sum_s' P(s'|s,a) max_a' Q(s',a')
QVector apply_bellman_risk_neutral(const TabularMdp& mdp, const QVector& q);

/// q = -(gamma/theta) ln x
QVector x_to_q(const TabularMdp& mdp, const UtilityVector& x);
/// x = exp(-(theta/gamma) q)
UtilityVector q_to_x(const TabularMdp& mdp, const QVector& q);

/// Lowest-index argmin per state.
StationaryPolicy greedy_policy_from_x(std::size_t num_actions, const UtilityVector& x);
/// Lowest-index argmax per state.
StationaryPolicy greedy_policy_from_q(std::size_t num_actions, const QVector& q);

std::size_t argmin_action(const std::vector<double>& v, std::size_t num_actions, std::size_t s);
std::size_t argmax_action(const std::vector<double>& v, std::size_t num_actions, std::size_t s);

/// Single-transition estimate of F(x)(s,a):
/// exp(-(theta/gamma) r(s,a)) [min_a' x(s',a')]^gamma.
double sample_F_hat(const TabularMdp& mdp, const UtilityVector& x, std::size_t s, std::size_t a, std::size_t next);

/// G(Q,s,a,s') = exp(-(theta/gamma) r(s,a) - theta max_a' Q(s',a')).
double sample_G(const TabularMdp& mdp, const QVector& q, std::size_t s, std::size_t a, std::size_t next);

namespace serial {

UtilityVector apply_F(const TabularMdp& mdp, const UtilityVector& x);
UtilityVector apply_F_pi(const TabularMdp& mdp, const StationaryPolicy& pi, const UtilityVector& x);
std::vector<double> apply_F_log(const TabularMdp& mdp, const std::vector<double>& log_x);
std::vector<double> apply_F_pi_log(const TabularMdp& mdp, const StationaryPolicy& pi,
                                   const std::vector<double>& log_x);
QVector apply_T(const TabularMdp& mdp, const QVector& q);
QVector apply_bellman_risk_neutral(const TabularMdp& mdp, const QVector& q);

}  // namespace serial
}  // namespace rsrl
