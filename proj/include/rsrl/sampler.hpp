#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rsrl/mdp.hpp"
#include "rsrl/rng.hpp"

namespace rsrl {

/// Smallest index i with cumulative sum through i strictly greater than u.
/// Falls back to the last index with positive mass when rounding leaves the
/// total just below u.
std::size_t inverse_cdf_sample(std::span<const double> row, double u);

enum class SamplingMode { generative_iid, markovian };
enum class BehaviorKind { uniform_random, epsilon_greedy };

inline constexpr double kDefaultEpsilon = 0.1;

struct SamplerConfig {
  SamplingMode mode = SamplingMode::generative_iid;
  std::vector<double> nu;  // over S*A pairs; empty means uniform
  BehaviorKind behavior = BehaviorKind::uniform_random;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = 0;

  static SamplerConfig generative(std::uint64_t seed, std::vector<double> nu = {});
  static SamplerConfig markovian_uniform(std::uint64_t seed);
  static SamplerConfig markovian_epsilon_greedy(std::uint64_t seed, double epsilon = kDefaultEpsilon);
};

struct Transition {
  std::size_t step = 0;
  std::size_t state = 0;
  std::size_t action = 0;
  std::size_t next_state = 0;

  bool operator==(const Transition&) const = default;
};

/// Produces the (s_n, a_n, s_{n+1}) stream for one run. Single-stream: not
/// shareable between runs.
///
/// Draw order per step:
///   generative: u -> (s,a) ~ nu; u -> s' ~ P(.|s,a)
///   markovian:  (first step only) u -> s_0 uniform;
///               uniform behavior: u -> a uniform
///               epsilon-greedy:   u -> explore iff u < eps; if exploring, u -> a uniform,
///                                 otherwise a = greedy action of the live estimate;
///               u -> s' ~ P(.|s,a)
class Sampler {
public:
  Sampler(const TabularMdp& mdp, SamplerConfig config);

  /// For generative sampling and uniform behavior.
  Transition next(const TabularMdp& mdp);
  /// Epsilon-greedy w.r.t. argmax_a q(s,a).
  Transition next(const TabularMdp& mdp, const QVector& q);
  /// Epsilon-greedy w.r.t. argmin_a x(s,a).
  Transition next(const TabularMdp& mdp, const UtilityVector& x);

  const SamplerConfig& config() const { return config_; }
  /// lambda = min nu(s,a) (generative mode).
  double min_nu() const;

private:
  template <class Greedy>
  Transition step(const TabularMdp& mdp, Greedy&& greedy);

  SamplerConfig config_;
  std::vector<double> nu_;
  CounterRng rng_;
  std::optional<std::size_t> state_;
  std::size_t n_ = 0;
};

/// Columns n,s,a,s_next.
void write_transition_log(std::ostream& out, std::span<const Transition> log);
std::vector<Transition> read_transition_log(std::istream& in);

}  // namespace rsrl
