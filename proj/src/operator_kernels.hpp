#pragma once

// Per-row arithmetic shared by the OpenMP and serial operator drivers, so the
// two produce bitwise-identical results.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rsrl/mdp.hpp"

namespace rsrl::detail {

inline void require_positive(const std::vector<double>& x, const char* who) {
  for (double v : x)
    if (!(v > 0.0)) throw std::domain_error(std::string(who) + ": entries must be strictly positive");
}

inline void require_size(const TabularMdp& mdp, std::size_t n, const char* who) {
  if (n != mdp.num_pairs()) throw std::invalid_argument(std::string(who) + ": vector length must be S*A");
}

inline void require_policy_shape(const TabularMdp& mdp, const StationaryPolicy& pi, const char* who) {
  if (pi.num_states != mdp.num_states || pi.num_actions != mdp.num_actions || pi.probs.size() != mdp.num_pairs())
    throw std::invalid_argument(std::string(who) + ": policy shape does not match the MDP");
}

inline double state_min(const std::vector<double>& v, std::size_t A, std::size_t s) {
  double m = v[s * A];
  for (std::size_t a = 1; a < A; ++a) m = std::min(m, v[s * A + a]);
  return m;
}

inline double state_max(const std::vector<double>& v, std::size_t A, std::size_t s) {
  double m = v[s * A];
  for (std::size_t a = 1; a < A; ++a) m = std::max(m, v[s * A + a]);
  return m;
}

/// [min_a x(s,a)]^gamma
inline double min_pow(const std::vector<double>& x, std::size_t A, std::size_t s, double gamma) {
  return std::exp(gamma * std::log(state_min(x, A, s)));
}

/// sum_a pi(a|s) x(s,a)^gamma
inline double policy_pow(const std::vector<double>& x, const StationaryPolicy& pi, std::size_t s, double gamma) {
  const std::size_t A = pi.num_actions;
  double acc = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    const double p = pi.probs[s * A + a];
    if (p != 0.0) acc += p * std::exp(gamma * std::log(x[s * A + a]));
  }
  return acc;
}

/// sum_a pi(a|s) exp(gamma * log_x(s,a)) returned as a log, shifted.
inline double policy_pow_log(const std::vector<double>& log_x, const StationaryPolicy& pi, std::size_t s,
                             double gamma) {
  const std::size_t A = pi.num_actions;
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < A; ++a)
    if (pi.probs[s * A + a] != 0.0) shift = std::max(shift, gamma * log_x[s * A + a]);
  double acc = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    const double p = pi.probs[s * A + a];
    if (p != 0.0) acc += p * std::exp(gamma * log_x[s * A + a] - shift);
  }
  return shift + std::log(acc);
}

/// exp(-theta_hat r) * sum_s' P(s'|sa) w[s']
inline double weighted_row(const TabularMdp& mdp, std::size_t sa, const std::vector<double>& w) {
  const double* row = mdp.row(sa);
  double acc = 0.0;
  for (std::size_t n = 0; n < mdp.num_states; ++n) acc += row[n] * w[n];
  return std::exp(-mdp.theta_hat() * mdp.rewards[sa]) * acc;
}

/// -theta_hat r + ln sum_s' P(s'|sa) exp(z[s']), shifted by the max z over the support.
inline double log_weighted_row(const TabularMdp& mdp, std::size_t sa, const std::vector<double>& z) {
  const double* row = mdp.row(sa);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < mdp.num_states; ++n)
    if (row[n] > 0.0) shift = std::max(shift, z[n]);
  double acc = 0.0;
  for (std::size_t n = 0; n < mdp.num_states; ++n)
    if (row[n] > 0.0) acc += row[n] * std::exp(z[n] - shift);
  return -mdp.theta_hat() * mdp.rewards[sa] + shift + std::log(acc);
}

/// T row: r - (gamma/theta) ln sum_s' P exp(-theta m[s']) where m = per-state max Q.
inline double t_row(const TabularMdp& mdp, std::size_t sa, const std::vector<double>& state_max_q) {
  const double theta = mdp.risk;
  const double* row = mdp.row(sa);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < mdp.num_states; ++n)
    if (row[n] > 0.0) shift = std::max(shift, -theta * state_max_q[n]);
  double acc = 0.0;
  for (std::size_t n = 0; n < mdp.num_states; ++n)
    if (row[n] > 0.0) acc += row[n] * std::exp(-theta * state_max_q[n] - shift);
  return mdp.rewards[sa] - (mdp.discount / theta) * (shift + std::log(acc));
}

inline double risk_neutral_row(const TabularMdp& mdp, std::size_t sa, const std::vector<double>& state_max_q) {
  const double* row = mdp.row(sa);
  double acc = 0.0;
  for (std::size_t n = 0; n < mdp.num_states; ++n) acc += row[n] * state_max_q[n];
  return mdp.rewards[sa] + mdp.discount * acc;
}

}  // namespace rsrl::detail
