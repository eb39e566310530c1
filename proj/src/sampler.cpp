#include "rsrl/sampler.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rsrl/operators.hpp"

namespace rsrl {

std::size_t inverse_cdf_sample(std::span<const double> row, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    cum += row[i];
    if (row[i] > 0.0) last_positive = i;
    if (cum > u) return i;
  }
  return last_positive;
}

SamplerConfig SamplerConfig::generative(std::uint64_t seed, std::vector<double> nu) {
  SamplerConfig c;
  c.mode = SamplingMode::generative_iid;
  c.nu = std::move(nu);
  c.seed = seed;
  return c;
}

SamplerConfig SamplerConfig::markovian_uniform(std::uint64_t seed) {
  SamplerConfig c;
  c.mode = SamplingMode::markovian;
  c.behavior = BehaviorKind::uniform_random;
  c.seed = seed;
  return c;
}

SamplerConfig SamplerConfig::markovian_epsilon_greedy(std::uint64_t seed, double epsilon) {
  SamplerConfig c;
  c.mode = SamplingMode::markovian;
  c.behavior = BehaviorKind::epsilon_greedy;
  c.epsilon = epsilon;
  c.seed = seed;
  return c;
}

Sampler::Sampler(const TabularMdp& mdp, SamplerConfig config) : config_(std::move(config)), rng_(config_.seed) {
  if (mdp.num_pairs() == 0) throw ConfigurationError("sampler: empty MDP");
  if (config_.mode == SamplingMode::generative_iid) {
    if (config_.nu.empty()) {
      nu_.assign(mdp.num_pairs(), 1.0 / static_cast<double>(mdp.num_pairs()));
    } else {
      if (config_.nu.size() != mdp.num_pairs()) throw ConfigurationError("sampler: nu must have S*A entries");
      double sum = 0.0;
      for (double p : config_.nu) {
        if (!(p > 0.0)) throw ConfigurationError("sampler: nu needs full support (min entry > 0)");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) throw ConfigurationError("sampler: nu must sum to 1");
      nu_ = config_.nu;
    }
  } else if (config_.behavior == BehaviorKind::epsilon_greedy) {
    if (!(config_.epsilon > 0.0 && config_.epsilon <= 1.0))
      throw ConfigurationError("sampler: epsilon must lie in (0,1]");
  }
}

double Sampler::min_nu() const {
  double m = 1.0;
  for (double p : nu_) m = std::min(m, p);
  return m;
}

template <class Greedy>
Transition Sampler::step(const TabularMdp& mdp, Greedy&& greedy) {
  Transition t;
  t.step = n_++;
  if (config_.mode == SamplingMode::generative_iid) {
    const std::size_t sa = inverse_cdf_sample(nu_, rng_.uniform());
    t.state = sa / mdp.num_actions;
    t.action = sa % mdp.num_actions;
  } else {
    if (!state_) state_ = static_cast<std::size_t>(rng_.below(mdp.num_states));
    t.state = *state_;
    if (config_.behavior == BehaviorKind::uniform_random) {
      t.action = static_cast<std::size_t>(rng_.below(mdp.num_actions));
    } else if (rng_.uniform() < config_.epsilon) {
      t.action = static_cast<std::size_t>(rng_.below(mdp.num_actions));
    } else {
      t.action = greedy(t.state);
    }
  }
  t.next_state = inverse_cdf_sample({mdp.row(mdp.pair(t.state, t.action)), mdp.num_states}, rng_.uniform());
  state_ = t.next_state;
  return t;
}

Transition Sampler::next(const TabularMdp& mdp) {
  return step(mdp, [](std::size_t) -> std::size_t {
    throw ConfigurationError("sampler: epsilon-greedy behavior needs the current estimate");
  });
}

Transition Sampler::next(const TabularMdp& mdp, const QVector& q) {
  return step(mdp, [&](std::size_t s) { return argmax_action(q.values, mdp.num_actions, s); });
}

Transition Sampler::next(const TabularMdp& mdp, const UtilityVector& x) {
  return step(mdp, [&](std::size_t s) { return argmin_action(x.values, mdp.num_actions, s); });
}

void write_transition_log(std::ostream& out, std::span<const Transition> log) {
  out << "n,s,a,s_next\n";
  for (const auto& t : log) out << t.step << ',' << t.state << ',' << t.action << ',' << t.next_state << '\n';
}

std::vector<Transition> read_transition_log(std::istream& in) {
  std::vector<Transition> out;
  std::string line;
  if (!std::getline(in, line) || line != "n,s,a,s_next") throw std::runtime_error("transition log: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Transition t;
    char c1, c2, c3;
    if (!(row >> t.step >> c1 >> t.state >> c2 >> t.action >> c3 >> t.next_state))
      throw std::runtime_error("transition log: malformed row '" + line + "'");
    out.push_back(t);
  }
  return out;
}

}  // namespace rsrl
