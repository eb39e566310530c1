#include "rsrl/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rsrl/operators.hpp"
#include "rsrl/sampler.hpp"

namespace rsrl {

double a_posteriori_threshold(double tol, double gamma) {
  if (gamma <= 0.0) return std::numeric_limits<double>::infinity();
  return tol * (1.0 - gamma) / gamma;
}

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Picard iteration in log coordinates; step maps ln x -> ln G(x).
template <class Step>
UtilityFixedPoint iterate_log(const TabularMdp& mdp, std::vector<double> log_x, const SolverOptions& opts,
                              Step&& step) {
  UtilityFixedPoint res;
  const double stop = a_posteriori_threshold(opts.tol, mdp.discount);
  while (res.iterations < opts.max_iter) {
    auto next = step(log_x);
    res.final_residual = max_abs_diff(next, log_x);
    log_x = std::move(next);
    ++res.iterations;
    if (res.final_residual <= stop) {
      res.converged = true;
      break;
    }
  }
  res.solution.values.resize(log_x.size());
  for (std::size_t i = 0; i < log_x.size(); ++i) res.solution[i] = std::exp(log_x[i]);
  res.log_solution = std::move(log_x);
  return res;
}

template <class Step>
UtilityFixedPoint iterate_x(const TabularMdp& mdp, UtilityVector x, const SolverOptions& opts, Step&& step) {
  UtilityFixedPoint res;
  const double stop = a_posteriori_threshold(opts.tol, mdp.discount);
  while (res.iterations < opts.max_iter) {
    auto next = step(x);
    res.final_residual = sup_log_distance(next, x);
    x = std::move(next);
    ++res.iterations;
    if (res.final_residual <= stop) {
      res.converged = true;
      break;
    }
  }
  res.log_solution.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) res.log_solution[i] = std::log(x[i]);
  res.solution = std::move(x);
  return res;
}

template <class Step>
FixedPointResult<QVector> iterate_q(const TabularMdp& mdp, QVector q, const SolverOptions& opts, Step&& step) {
  FixedPointResult<QVector> res;
  const double stop = a_posteriori_threshold(opts.tol, mdp.discount);
  while (res.iterations < opts.max_iter) {
    auto next = step(q);
    res.final_residual = linf_distance(next, q);
    q = std::move(next);
    ++res.iterations;
    if (res.final_residual <= stop) {
      res.converged = true;
      break;
    }
  }
  res.solution = std::move(q);
  return res;
}

bool use_log_space(const TabularMdp& mdp) { return derived_constants(mdp).log_c_u > kLogSpaceThreshold; }

}  // namespace

UtilityFixedPoint fixed_point_F(const TabularMdp& mdp, std::optional<UtilityVector> x0, const SolverOptions& opts) {
  UtilityVector start = x0 ? std::move(*x0) : UtilityVector::constant(mdp.num_pairs(), 1.0);
  if (start.size() != mdp.num_pairs()) throw std::invalid_argument("fixed_point_F: x0 must have S*A entries");
  for (double v : start.values)
    if (!(v > 0.0)) throw std::domain_error("fixed_point_F: x0 must be strictly positive");
  if (use_log_space(mdp)) {
    std::vector<double> log_x(start.size());
    for (std::size_t i = 0; i < start.size(); ++i) log_x[i] = std::log(start[i]);
    return iterate_log(mdp, std::move(log_x), opts, [&](const std::vector<double>& v) { return apply_F_log(mdp, v); });
  }
  return iterate_x(mdp, std::move(start), opts, [&](const UtilityVector& v) { return apply_F(mdp, v); });
}

FixedPointResult<QVector> fixed_point_T(const TabularMdp& mdp, std::optional<QVector> q0, const SolverOptions& opts) {
  QVector start = q0 ? std::move(*q0) : QVector::constant(mdp.num_pairs(), 0.0);
  if (start.size() != mdp.num_pairs()) throw std::invalid_argument("fixed_point_T: q0 must have S*A entries");
  return iterate_q(mdp, std::move(start), opts, [&](const QVector& v) { return apply_T(mdp, v); });
}

FixedPointResult<QVector> fixed_point_risk_neutral(const TabularMdp& mdp, std::optional<QVector> q0,
                                                   const SolverOptions& opts) {
  QVector start = q0 ? std::move(*q0) : QVector::constant(mdp.num_pairs(), 0.0);
  if (start.size() != mdp.num_pairs())
    throw std::invalid_argument("fixed_point_risk_neutral: q0 must have S*A entries");
  return iterate_q(mdp, std::move(start), opts, [&](const QVector& v) { return apply_bellman_risk_neutral(mdp, v); });
}

UtilityFixedPoint policy_utility(const TabularMdp& mdp, const StationaryPolicy& pi, const SolverOptions& opts) {
  if (auto bad = pi.validate(); !bad.empty()) throw std::invalid_argument("policy_utility: " + bad.front());
  if (use_log_space(mdp)) {
    return iterate_log(mdp, std::vector<double>(mdp.num_pairs(), 0.0), opts,
                       [&](const std::vector<double>& v) { return apply_F_pi_log(mdp, pi, v); });
  }
  return iterate_x(mdp, UtilityVector::constant(mdp.num_pairs(), 1.0), opts,
                   [&](const UtilityVector& v) { return apply_F_pi(mdp, pi, v); });
}

std::vector<std::size_t> decode_policy_index(std::size_t index, std::size_t num_states, std::size_t num_actions) {
  std::vector<std::size_t> acts(num_states);
  for (std::size_t s = 0; s < num_states; ++s) {
    acts[s] = index % num_actions;
    index /= num_actions;
  }
  return acts;
}

std::optional<std::size_t> count_deterministic_policies(std::size_t num_states, std::size_t num_actions,
                                                        std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t s = 0; s < num_states; ++s) {
    if (count > cap / num_actions) return std::nullopt;
    count *= num_actions;
  }
  if (count > cap) return std::nullopt;
  return count;
}

std::vector<EnumeratedPolicy> enumerate_policy_utilities(const TabularMdp& mdp, const SolverOptions& opts,
                                                         std::size_t cap) {
  const auto count = count_deterministic_policies(mdp.num_states, mdp.num_actions, cap);
  if (!count)
    throw ConfigurationError("brute force: " + std::to_string(mdp.num_actions) + "^" +
                             std::to_string(mdp.num_states) + " policies exceed the enumeration cap " +
                             std::to_string(cap));
  std::vector<EnumeratedPolicy> out(*count);
  const auto n = static_cast<std::ptrdiff_t>(*count);
#pragma omp parallel for schedule(dynamic, 8) if (n >= 64)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    auto& e = out[static_cast<std::size_t>(k)];
    e.actions = decode_policy_index(static_cast<std::size_t>(k), mdp.num_states, mdp.num_actions);
    e.utility = policy_utility(mdp, StationaryPolicy::deterministic(mdp.num_actions, e.actions), opts);
  }
  return out;
}

BruteForceResult brute_force_optimal(const TabularMdp& mdp, const SolverOptions& opts, std::size_t cap) {
  auto all = enumerate_policy_utilities(mdp, opts, cap);

  // candidate: smallest total log-utility, lowest index on ties
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < all.size(); ++k) {
    double sum = 0.0;
    for (double v : all[k].utility.log_solution) sum += v;
    if (sum < best_sum) {
      best_sum = sum;
      best = k;
    }
  }

  const double slack = 10.0 * opts.tol;
  const auto& winner = all[best].utility.log_solution;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const auto& other = all[k].utility.log_solution;
    for (std::size_t i = 0; i < winner.size(); ++i) {
      if (winner[i] > other[i] + slack) {
        throw OracleInconsistency("brute force: policy " + std::to_string(best) + " does not dominate policy " +
                                  std::to_string(k) + " at pair " + std::to_string(i) +
                                  " (log gap " + std::to_string(winner[i] - other[i]) + ")");
      }
    }
  }

  BruteForceResult res;
  res.policy = StationaryPolicy::deterministic(mdp.num_actions, all[best].actions);
  res.utility = std::move(all[best].utility);
  res.policy_index = best;
  res.num_policies = all.size();
  return res;
}

std::size_t truncation_horizon(const TabularMdp& mdp) {
  const double scale = mdp.theta_hat() * mdp.reward_sup() / (1.0 - mdp.discount);
  if (!(scale > 1e-6) || mdp.discount <= 0.0) return 1;
  const double h = std::ceil(std::log(1e-6 / scale) / std::log(mdp.discount));
  return std::max<std::size_t>(1, static_cast<std::size_t>(h));
}

MonteCarloEstimate monte_carlo_utility(const TabularMdp& mdp, const StationaryPolicy& pi, std::size_t s,
                                       std::size_t a, const MonteCarloOptions& opts) {
  if (auto bad = pi.validate(); !bad.empty()) throw std::invalid_argument("monte_carlo_utility: " + bad.front());
  if (s >= mdp.num_states || a >= mdp.num_actions) throw std::invalid_argument("monte_carlo_utility: bad start pair");
  const std::size_t H = opts.horizon ? opts.horizon : truncation_horizon(mdp);
  const std::size_t N = opts.num_episodes;
  const double theta_hat = mdp.theta_hat();

  std::vector<double> samples(N);
  const auto n = static_cast<std::ptrdiff_t>(N);
#pragma omp parallel for schedule(static) if (N >= 1024)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(e) + 1);
    std::size_t state = s, action = a;
    double ret = 0.0, disc = 1.0;
    for (std::size_t j = 0; j < H; ++j) {
      ret += disc * mdp.reward(state, action);
      disc *= mdp.discount;
      if (j + 1 == H) break;
      state = inverse_cdf_sample({mdp.row(mdp.pair(state, action)), mdp.num_states}, rng.uniform());
      action = inverse_cdf_sample({pi.probs.data() + state * mdp.num_actions, mdp.num_actions}, rng.uniform());
    }
    samples[static_cast<std::size_t>(e)] = std::exp(-theta_hat * ret);
  }

  // Welford, in episode order
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double delta = samples[k] - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (samples[k] - mean);
  }
  MonteCarloEstimate est;
  est.mean = mean;
  est.horizon = H;
  est.num_episodes = N;
  est.std_error = N > 1 ? std::sqrt(m2 / static_cast<double>(N - 1) / static_cast<double>(N)) : 0.0;
  return est;
}

}  // namespace rsrl
