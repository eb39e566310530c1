#include "rsrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsrl/rng.hpp"

namespace rsrl {

double TabularMdp::reward_sup() const {
  double m = 0.0;
  for (double r : rewards) m = std::max(m, std::abs(r));
  return m;
}

StationaryPolicy StationaryPolicy::deterministic(std::size_t num_actions, const std::vector<std::size_t>& actions) {
  StationaryPolicy pi(actions.size(), num_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= num_actions) throw std::invalid_argument("deterministic policy: action index out of range");
    pi(s, actions[s]) = 1.0;
  }
  return pi;
}

StationaryPolicy StationaryPolicy::uniform(std::size_t num_states, std::size_t num_actions) {
  StationaryPolicy pi(num_states, num_actions);
  std::fill(pi.probs.begin(), pi.probs.end(), 1.0 / static_cast<double>(num_actions));
  return pi;
}

bool StationaryPolicy::is_deterministic() const {
  for (std::size_t s = 0; s < num_states; ++s) {
    std::size_t ones = 0, zeros = 0;
    for (std::size_t a = 0; a < num_actions; ++a) {
      if ((*this)(s, a) == 1.0) ++ones;
      else if ((*this)(s, a) == 0.0) ++zeros;
    }
    if (ones != 1 || ones + zeros != num_actions) return false;
  }
  return true;
}

std::vector<std::size_t> StationaryPolicy::actions() const {
  if (!is_deterministic()) throw std::logic_error("policy is not deterministic");
  std::vector<std::size_t> out(num_states);
  for (std::size_t s = 0; s < num_states; ++s)
    for (std::size_t a = 0; a < num_actions; ++a)
      if ((*this)(s, a) == 1.0) out[s] = a;
  return out;
}

std::vector<std::string> StationaryPolicy::validate() const {
  std::vector<std::string> out;
  if (probs.size() != num_states * num_actions) {
    out.push_back("policy table has wrong size");
    return out;
  }
  for (std::size_t s = 0; s < num_states; ++s) {
    double sum = 0.0;
    for (std::size_t a = 0; a < num_actions; ++a) {
      double p = (*this)(s, a);
      if (!(p >= 0.0 && p <= 1.0)) out.push_back("pi(.|" + std::to_string(s) + ") has an entry outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) out.push_back("pi(.|" + std::to_string(s) + ") does not sum to 1");
  }
  return out;
}

namespace {

Violation make_violation(std::string what, std::ptrdiff_t s, std::ptrdiff_t a, std::ptrdiff_t next,
                         std::string message) {
  return Violation{std::move(what), s, a, next, std::move(message)};
}

}  // namespace

std::vector<Violation> validate_mdp(const TabularMdp& mdp) {
  std::vector<Violation> out;
  const auto S = mdp.num_states, A = mdp.num_actions;
  if (S == 0) out.push_back(make_violation("num_states", -1, -1, -1, "num_states must be positive"));
  if (A == 0) out.push_back(make_violation("num_actions", -1, -1, -1, "num_actions must be positive"));
  if (!(mdp.discount >= 0.0 && mdp.discount < 1.0))
    out.push_back(make_violation("discount", -1, -1, -1, "discount must lie in [0,1)"));
  if (!(mdp.risk > 0.0) || !std::isfinite(mdp.risk))
    out.push_back(make_violation("risk", -1, -1, -1, "risk parameter must be finite and > 0"));
  if (mdp.rewards.size() != S * A) {
    out.push_back(make_violation("rewards_shape", -1, -1, -1, "rewards must have num_states*num_actions entries"));
  } else {
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t a = 0; a < A; ++a)
        if (!std::isfinite(mdp.reward(s, a)))
          out.push_back(make_violation("reward_finite", s, a, -1, "reward is not finite"));
  }
  if (mdp.transitions.size() != S * A * S) {
    out.push_back(make_violation("transitions_shape", -1, -1, -1, "transitions must have S*A*S entries"));
    return out;
  }
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      double sum = 0.0;
      for (std::size_t n = 0; n < S; ++n) {
        double p = mdp.prob(s, a, n);
        // entries above 1 in a non-negative row already show up as a row-sum violation
        if (!(p >= 0.0) || !std::isfinite(p))
          out.push_back(make_violation("probability_range", s, a, n, "transition probability negative or not finite"));
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "row P(.|" << s << "," << a << ") sums to " << sum;
        out.push_back(make_violation("row_sum", s, a, -1, msg.str()));
      }
    }
  }
  return out;
}

void require_valid(const TabularMdp& mdp) {
  auto report = validate_mdp(mdp);
  if (report.empty()) return;
  std::string msg = "invalid MDP:";
  for (std::size_t i = 0; i < report.size() && i < 5; ++i) msg += " [" + report[i].message + "]";
  if (report.size() > 5) msg += " ...";
  throw ConfigurationError(msg);
}

DerivedConstants derived_constants(const TabularMdp& mdp) {
  DerivedConstants c;
  const double r_inf = mdp.reward_sup();
  const double g = mdp.discount;
  c.theta_hat = mdp.risk / g;
  c.c_max = r_inf / (1.0 - g);
  c.log_c_u = mdp.risk * r_inf / (g * (1.0 - g));
  c.c_ell = std::exp(-c.log_c_u);
  c.c_u = std::exp(c.log_c_u);
  return c;
}

double sup_log_distance(const UtilityVector& x1, const UtilityVector& x2) {
  if (x1.size() != x2.size()) throw std::invalid_argument("sup_log_distance: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    if (!(x1[i] > 0.0) || !(x2[i] > 0.0)) throw std::domain_error("sup_log_distance: non-positive entry");
    d = std::max(d, std::abs(std::log(x1[i]) - std::log(x2[i])));
  }
  return d;
}

double linf_distance(const QVector& q1, const QVector& q2) {
  if (q1.size() != q2.size()) throw std::invalid_argument("linf_distance: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < q1.size(); ++i) d = std::max(d, std::abs(q1[i] - q2[i]));
  return d;
}

double linf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

TabularMdp two_state_risky_fixture() {
  using namespace fixture;
  TabularMdp m;
  m.num_states = 2;
  m.num_actions = 2;
  m.discount = 0.9;
  m.risk = 0.1;
  m.rewards.assign(4, 0.0);
  m.transitions.assign(8, 0.0);
  auto P = [&](std::size_t s, std::size_t a, std::size_t n) -> double& { return m.transitions[m.pair(s, a) * 2 + n]; };

  m.rewards[m.pair(kS, kSafe)] = 0.0;
  P(kS, kSafe, kS) = 1.0;

  m.rewards[m.pair(kS, kRisk)] = 1.0;
  P(kS, kRisk, kS) = 0.99;
  P(kS, kRisk, kSBar) = 0.01;

  for (std::size_t a = 0; a < 2; ++a) {
    m.rewards[m.pair(kSBar, a)] = -10.0;
    P(kSBar, a, kSBar) = 1.0;
  }
  return m;
}

TabularMdp random_mdp(std::size_t num_states, std::size_t num_actions, RewardRange rewards, double discount,
                      double risk, std::uint64_t seed) {
  if (num_states == 0 || num_actions == 0) throw std::domain_error("random_mdp: sizes must be positive");
  if (!(discount >= 0.0 && discount < 1.0)) throw std::domain_error("random_mdp: discount must lie in [0,1)");
  if (!(risk > 0.0) || !std::isfinite(risk)) throw std::domain_error("random_mdp: risk must be positive");
  if (!std::isfinite(rewards.lo) || !std::isfinite(rewards.hi) || rewards.lo > rewards.hi)
    throw std::domain_error("random_mdp: bad reward range");

  CounterRng rng(seed, /*stream=*/0x6d6470);
  TabularMdp m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.discount = discount;
  m.risk = risk;
  m.rewards.resize(num_states * num_actions);
  m.transitions.resize(num_states * num_actions * num_states);

  for (std::size_t sa = 0; sa < m.num_pairs(); ++sa) {
    double* row = m.transitions.data() + sa * num_states;
    double sum = 0.0;
    for (std::size_t n = 0; n < num_states; ++n) {
      // Exp(1) draws normalized give a flat Dirichlet row; 1-u is in (0,1].
      row[n] = -std::log(1.0 - rng.uniform()) + 1e-3;
      sum += row[n];
    }
    for (std::size_t n = 0; n < num_states; ++n) row[n] /= sum;
    // push the rounding residue into the largest entry
    double resid = 1.0;
    std::size_t big = 0;
    for (std::size_t n = 0; n < num_states; ++n) {
      resid -= row[n];
      if (row[n] > row[big]) big = n;
    }
    row[big] += resid;
  }
  for (auto& r : m.rewards) r = rewards.lo + (rewards.hi - rewards.lo) * rng.uniform();
  return m;
}

TabularMdp single_state_mdp(double reward, double discount, double risk) {
  TabularMdp m;
  m.num_states = 1;
  m.num_actions = 1;
  m.discount = discount;
  m.risk = risk;
  m.rewards = {reward};
  m.transitions = {1.0};
  return m;
}

}  // namespace rsrl
