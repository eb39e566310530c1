#include "rsrl/operators.hpp"

#include <cmath>

#include "operator_kernels.hpp"

namespace rsrl {

namespace {

template <class Fn>
void parallel_over(std::size_t n, std::size_t threshold, Fn&& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= threshold)
  for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

// Per-state precomputations are O(S*A); worth threading only with the rows.
template <class Fn>
std::vector<double> per_state(const TabularMdp& mdp, Fn&& fn) {
  std::vector<double> out(mdp.num_states);
  parallel_over(mdp.num_states, kParallelPairThreshold, [&](std::size_t s) { out[s] = fn(s); });
  return out;
}

}  // namespace

UtilityVector apply_F(const TabularMdp& mdp, const UtilityVector& x) {
  detail::require_size(mdp, x.size(), "apply_F");
  detail::require_positive(x.values, "apply_F");
  const auto A = mdp.num_actions;
  const auto w = per_state(mdp, [&](std::size_t s) { return detail::min_pow(x.values, A, s, mdp.discount); });
  UtilityVector out(std::vector<double>(mdp.num_pairs()));
  parallel_over(mdp.num_pairs(), kParallelPairThreshold,
                [&](std::size_t sa) { out.values[sa] = detail::weighted_row(mdp, sa, w); });
  return out;
}

UtilityVector apply_F_pi(const TabularMdp& mdp, const StationaryPolicy& pi, const UtilityVector& x) {
  detail::require_size(mdp, x.size(), "apply_F_pi");
  detail::require_policy_shape(mdp, pi, "apply_F_pi");
  detail::require_positive(x.values, "apply_F_pi");
  const auto w = per_state(mdp, [&](std::size_t s) { return detail::policy_pow(x.values, pi, s, mdp.discount); });
  UtilityVector out(std::vector<double>(mdp.num_pairs()));
  parallel_over(mdp.num_pairs(), kParallelPairThreshold,
                [&](std::size_t sa) { out.values[sa] = detail::weighted_row(mdp, sa, w); });
  return out;
}

std::vector<double> apply_F_log(const TabularMdp& mdp, const std::vector<double>& log_x) {
  detail::require_size(mdp, log_x.size(), "apply_F_log");
  const auto A = mdp.num_actions;
  const auto z = per_state(mdp, [&](std::size_t s) { return mdp.discount * detail::state_min(log_x, A, s); });
  std::vector<double> out(mdp.num_pairs());
  parallel_over(mdp.num_pairs(), kParallelPairThreshold,
                [&](std::size_t sa) { out[sa] = detail::log_weighted_row(mdp, sa, z); });
  return out;
}

std::vector<double> apply_F_pi_log(const TabularMdp& mdp, const StationaryPolicy& pi,
                                   const std::vector<double>& log_x) {
  detail::require_size(mdp, log_x.size(), "apply_F_pi_log");
  detail::require_policy_shape(mdp, pi, "apply_F_pi_log");
  const auto z = per_state(mdp, [&](std::size_t s) { return detail::policy_pow_log(log_x, pi, s, mdp.discount); });
  std::vector<double> out(mdp.num_pairs());
  parallel_over(mdp.num_pairs(), kParallelPairThreshold,
                [&](std::size_t sa) { out[sa] = detail::log_weighted_row(mdp, sa, z); });
  return out;
}

QVector apply_T(const TabularMdp& mdp, const QVector& q) {
  detail::require_size(mdp, q.size(), "apply_T");
  const auto A = mdp.num_actions;
  const auto m = per_state(mdp, [&](std::size_t s) { return detail::state_max(q.values, A, s); });
  QVector out(std::vector<double>(mdp.num_pairs()));
  parallel_over(mdp.num_pairs(), kParallelPairThreshold,
                [&](std::size_t sa) { out.values[sa] = detail::t_row(mdp, sa, m); });
  return out;
}

QVector apply_bellman_risk_neutral(const TabularMdp& mdp, const QVector& q) {
  detail::require_size(mdp, q.size(), "apply_bellman_risk_neutral");
  const auto A = mdp.num_actions;
  const auto m = per_state(mdp, [&](std::size_t s) { return detail::state_max(q.values, A, s); });
  QVector out(std::vector<double>(mdp.num_pairs()));
  parallel_over(mdp.num_pairs(), kParallelPairThreshold,
                [&](std::size_t sa) { out.values[sa] = detail::risk_neutral_row(mdp, sa, m); });
  return out;
}

QVector x_to_q(const TabularMdp& mdp, const UtilityVector& x) {
  detail::require_positive(x.values, "x_to_q");
  const double scale = -mdp.discount / mdp.risk;
  QVector q(std::vector<double>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) q[i] = scale * std::log(x[i]);
  return q;
}

UtilityVector q_to_x(const TabularMdp& mdp, const QVector& q) {
  const double scale = -mdp.risk / mdp.discount;
  UtilityVector x(std::vector<double>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) x[i] = std::exp(scale * q[i]);
  return x;
}

std::size_t argmin_action(const std::vector<double>& v, std::size_t num_actions, std::size_t s) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < num_actions; ++a)
    if (v[s * num_actions + a] < v[s * num_actions + best]) best = a;
  return best;
}

std::size_t argmax_action(const std::vector<double>& v, std::size_t num_actions, std::size_t s) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < num_actions; ++a)
    if (v[s * num_actions + a] > v[s * num_actions + best]) best = a;
  return best;
}

StationaryPolicy greedy_policy_from_x(std::size_t num_actions, const UtilityVector& x) {
  if (num_actions == 0 || x.size() % num_actions != 0)
    throw std::invalid_argument("greedy_policy_from_x: length not a multiple of num_actions");
  detail::require_positive(x.values, "greedy_policy_from_x");
  std::vector<std::size_t> acts(x.size() / num_actions);
  for (std::size_t s = 0; s < acts.size(); ++s) acts[s] = argmin_action(x.values, num_actions, s);
  return StationaryPolicy::deterministic(num_actions, acts);
}

StationaryPolicy greedy_policy_from_q(std::size_t num_actions, const QVector& q) {
  if (num_actions == 0 || q.size() % num_actions != 0)
    throw std::invalid_argument("greedy_policy_from_q: length not a multiple of num_actions");
  std::vector<std::size_t> acts(q.size() / num_actions);
  for (std::size_t s = 0; s < acts.size(); ++s) acts[s] = argmax_action(q.values, num_actions, s);
  return StationaryPolicy::deterministic(num_actions, acts);
}

double sample_F_hat(const TabularMdp& mdp, const UtilityVector& x, std::size_t s, std::size_t a, std::size_t next) {
  return std::exp(-mdp.theta_hat() * mdp.reward(s, a)) * detail::min_pow(x.values, mdp.num_actions, next, mdp.discount);
}

double sample_G(const TabularMdp& mdp, const QVector& q, std::size_t s, std::size_t a, std::size_t next) {
  return std::exp(-mdp.theta_hat() * mdp.reward(s, a) -
                  mdp.risk * detail::state_max(q.values, mdp.num_actions, next));
}

}  // namespace rsrl
