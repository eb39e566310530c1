#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rsrl/mdp.hpp"
#include "rsrl/sampler.hpp"

namespace rsrl {

/// Step-size sequence indexed from n = 0.
///   power_law(e):        (n+1)^-e
///   scalar_harmonic(C1): 1 / (2 C1 (n+1))
/// power_law(0) is the constant-one schedule.
struct StepSchedule {
  enum class Kind { power_law, scalar_harmonic };

  Kind kind = Kind::power_law;
  double param = 1.0;

  static StepSchedule power_law(double exponent);
  static StepSchedule scalar_harmonic(double c1);

  double operator()(std::size_t n) const;
};

/// Snapshot steps 1, 2, 4, ... below num_steps, plus num_steps itself.
std::vector<std::size_t> geometric_grid(std::size_t num_steps);

/// geometric_grid(num_steps) merged with `extra`, sorted and deduplicated.
std::vector<std::size_t> snapshot_grid(std::size_t num_steps, std::span<const std::size_t> extra);

struct LearnerTrace {
  std::vector<std::size_t> steps;
  /// sup-norm error to Q* (two-timescale) or sup-log error to x* (one-timescale)
  std::vector<double> error;
  /// ||g_n - exp(-(theta/gamma) T(Q_n))||_inf; two-timescale only
  std::vector<double> g_track_error;
  std::vector<std::vector<double>> iterates;
  /// First TraceOptions::log_transitions transitions of the sampler stream.
  std::vector<Transition> transitions;
  std::size_t violations = 0;
  std::uint64_t seed = 0;
};

struct TraceOptions {
  bool record_iterates = false;
  /// Promote a stability-bound violation to InvariantViolation. When false the
  /// counter is incremented and the run continues.
  bool throw_on_violation = true;
  std::size_t log_transitions = 0;
  /// Extra snapshot steps merged into the geometric grid (values above
  /// num_steps are ignored).
  std::vector<std::size_t> extra_snapshots;
};

struct TwoTsState {
  QVector q;
  std::vector<double> g;
};

struct TwoTimescaleOptions {
  StepSchedule alpha = StepSchedule::power_law(0.9);
  StepSchedule beta = StepSchedule::power_law(0.6);
  std::size_t num_steps = 0;
  std::optional<QVector> q0;           // default zero
  std::optional<std::vector<double>> g0;  // default all-ones
  /// Q* for the error column; when absent the error column is left empty.
  std::optional<QVector> reference;
  /// Reject power-law pairs without beta < alpha.
  bool require_timescale_separation = true;
  TraceOptions trace;
};

struct TwoTimescaleResult {
  TwoTsState state;
  LearnerTrace trace;
};

/// Q_{n+1} = Q_n + alpha_n [-(gamma/theta) ln g_n - Q_n]             (all pairs)
/// g_{n+1}(s_n,a_n) = g_n(s_n,a_n) + beta_n [G(Q_n,s_n,a_n,s_{n+1}) - g_n(s_n,a_n)]
/// Checks max{||Q||_inf, (gamma/theta)||ln g||_inf} <= c_max + 1e-9 after every step.
TwoTimescaleResult two_timescale_run(const TabularMdp& mdp, Sampler& sampler, const TwoTimescaleOptions& opts);

struct OneTimescaleOptions {
  StepSchedule alpha = StepSchedule::power_law(0.7);
  std::size_t num_steps = 0;
  std::optional<UtilityVector> x0;  // default all-ones
  std::optional<UtilityVector> reference;
  TraceOptions trace;
};

struct OneTimescaleResult {
  UtilityVector x;
  LearnerTrace trace;
};

/// x_{n+1}(s_n,a_n) = x_n(s_n,a_n) + alpha_n [F_hat_n - x_n(s_n,a_n)], with
/// F_hat_n = exp(-(theta/gamma) r(s_n,a_n)) [min_a' x_n(s_{n+1},a')]^gamma.
/// Checks x_n in [c_ell, c_u] and F_hat_n in [c_ell, c_u] after every step.
OneTimescaleResult one_timescale_run(const TabularMdp& mdp, Sampler& sampler, const OneTimescaleOptions& opts);

/// (y - y^gamma)/(y - 1) with y = c_ell / x_star; 1 - gamma when |y - 1| <= 1e-12.
double compute_C1(double c_ell, double x_star, double gamma);

/// [max{(c_u/x*)^(2 gamma), (c_u/x*)^2} + (c_u/x*)^2] / (4 C1^2)
double compute_C2_tilde(double c_u, double x_star, double gamma, double c1);

struct ScalarRecursionParams {
  double c_ell = 0.5;
  double c_u = 2.0;
  double x_star = 1.0;
  double gamma = 0.9;
  double noise = 0.3;  // zeta ~ U[-noise, noise]
  std::optional<double> x0;  // default c_ell
};

struct ScalarTrace {
  std::vector<std::size_t> steps;
  std::vector<double> abs_rel_error;  // |x_n / x* - 1|
  std::uint64_t seed = 0;
};

/// x_{n+1} = clamp(x_n + alpha_n [F(x_n) - x_n + zeta_{n+1}], c_ell, c_u),
/// F(x) = x* (x/x*)^gamma, alpha_n = 1/(2 C1 (n+1)). Snapshots on
/// geometric_grid(num_steps) unless `steps` is given.
ScalarTrace scalar_recursion_run(const ScalarRecursionParams& params, std::size_t num_steps, std::uint64_t seed,
                                 std::span<const std::size_t> steps = {});

void validate_scalar_params(const ScalarRecursionParams& params);

/// Runs one learner per seed (OpenMP over seeds); results are in seed order.
std::vector<TwoTimescaleResult> two_timescale_runs(const TabularMdp& mdp, const SamplerConfig& sampler,
                                                   const TwoTimescaleOptions& opts,
                                                   std::span<const std::uint64_t> seeds);
std::vector<OneTimescaleResult> one_timescale_runs(const TabularMdp& mdp, const SamplerConfig& sampler,
                                                   const OneTimescaleOptions& opts,
                                                   std::span<const std::uint64_t> seeds);

double median(std::vector<double> v);

/// Per-snapshot median across traces (all traces must share steps).
std::vector<double> median_error(std::span<const LearnerTrace> traces);
std::vector<double> median_g_track_error(std::span<const LearnerTrace> traces);

}  // namespace rsrl
