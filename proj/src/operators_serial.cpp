#include "operator_kernels.hpp"
#include "rsrl/operators.hpp"

namespace rsrl::serial {

UtilityVector apply_F(const TabularMdp& mdp, const UtilityVector& x) {
  detail::require_size(mdp, x.size(), "serial::apply_F");
  detail::require_positive(x.values, "serial::apply_F");
  std::vector<double> w(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) w[s] = detail::min_pow(x.values, mdp.num_actions, s, mdp.discount);
  UtilityVector out(std::vector<double>(mdp.num_pairs()));
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) out[sa] = detail::weighted_row(mdp, sa, w);
  return out;
}

UtilityVector apply_F_pi(const TabularMdp& mdp, const StationaryPolicy& pi, const UtilityVector& x) {
  detail::require_size(mdp, x.size(), "serial::apply_F_pi");
  detail::require_policy_shape(mdp, pi, "serial::apply_F_pi");
  detail::require_positive(x.values, "serial::apply_F_pi");
  std::vector<double> w(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) w[s] = detail::policy_pow(x.values, pi, s, mdp.discount);
  UtilityVector out(std::vector<double>(mdp.num_pairs()));
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) out[sa] = detail::weighted_row(mdp, sa, w);
  return out;
}

std::vector<double> apply_F_log(const TabularMdp& mdp, const std::vector<double>& log_x) {
  detail::require_size(mdp, log_x.size(), "serial::apply_F_log");
  std::vector<double> z(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s)
    z[s] = mdp.discount * detail::state_min(log_x, mdp.num_actions, s);
  std::vector<double> out(mdp.num_pairs());
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) out[sa] = detail::log_weighted_row(mdp, sa, z);
  return out;
}

std::vector<double> apply_F_pi_log(const TabularMdp& mdp, const StationaryPolicy& pi,
                                   const std::vector<double>& log_x) {
  detail::require_size(mdp, log_x.size(), "serial::apply_F_pi_log");
  detail::require_policy_shape(mdp, pi, "serial::apply_F_pi_log");
  std::vector<double> z(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) z[s] = detail::policy_pow_log(log_x, pi, s, mdp.discount);
  std::vector<double> out(mdp.num_pairs());
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) out[sa] = detail::log_weighted_row(mdp, sa, z);
  return out;
}

QVector apply_T(const TabularMdp& mdp, const QVector& q) {
  detail::require_size(mdp, q.size(), "serial::apply_T");
  std::vector<double> m(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) m[s] = detail::state_max(q.values, mdp.num_actions, s);
  QVector out(std::vector<double>(mdp.num_pairs()));
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) out[sa] = detail::t_row(mdp, sa, m);
  return out;
}

QVector apply_bellman_risk_neutral(const TabularMdp& mdp, const QVector& q) {
  detail::require_size(mdp, q.size(), "serial::apply_bellman_risk_neutral");
  std::vector<double> m(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) m[s] = detail::state_max(q.values, mdp.num_actions, s);
  QVector out(std::vector<double>(mdp.num_pairs()));
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) out[sa] = detail::risk_neutral_row(mdp, sa, m);
  return out;
}

}  // namespace rsrl::serial
