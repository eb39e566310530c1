#include "rsrl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <string>

#include "rsrl/operators.hpp"

namespace rsrl {

StepSchedule StepSchedule::power_law(double exponent) {
  if (!(exponent >= 0.0) || !std::isfinite(exponent))
    throw ConfigurationError("power-law step exponent must be finite and >= 0");
  return StepSchedule{Kind::power_law, exponent};
}

StepSchedule StepSchedule::scalar_harmonic(double c1) {
  if (!(c1 > 0.0) || !std::isfinite(c1)) throw ConfigurationError("harmonic step constant C1 must be positive");
  return StepSchedule{Kind::scalar_harmonic, c1};
}

double StepSchedule::operator()(std::size_t n) const {
  const double k = static_cast<double>(n) + 1.0;
  if (kind == Kind::power_law) return param == 0.0 ? 1.0 : std::pow(k, -param);
  return 1.0 / (2.0 * param * k);
}

std::vector<std::size_t> geometric_grid(std::size_t num_steps) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n < num_steps; n *= 2) out.push_back(n);
  if (num_steps > 0) out.push_back(num_steps);
  return out;
}

std::vector<std::size_t> snapshot_grid(std::size_t num_steps, std::span<const std::size_t> extra) {
  auto out = geometric_grid(num_steps);
  for (auto n : extra)
    if (n >= 1 && n <= num_steps) out.push_back(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kBoxSlack = 1e-12;

void report_violation(LearnerTrace& trace, const TraceOptions& opts, const std::string& what) {
  ++trace.violations;
  if (opts.throw_on_violation) throw InvariantViolation(what);
}

double g_tracking_error(const TabularMdp& mdp, const QVector& q, const std::vector<double>& g) {
  const auto tq = apply_T(mdp, q);
  const double scale = -mdp.risk / mdp.discount;
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g[i] - std::exp(scale * tq[i])));
  return err;
}

void check_power_law_pair(const TwoTimescaleOptions& opts) {
  if (!opts.require_timescale_separation) return;
  if (opts.alpha.kind == StepSchedule::Kind::power_law && opts.beta.kind == StepSchedule::Kind::power_law &&
      !(opts.beta.param < opts.alpha.param)) {
    std::ostringstream msg;
    msg << "two-timescale schedules need beta < alpha (got alpha=" << opts.alpha.param
        << ", beta=" << opts.beta.param << ")";
    throw ConfigurationError(msg.str());
  }
}

}  // namespace

TwoTimescaleResult two_timescale_run(const TabularMdp& mdp, Sampler& sampler, const TwoTimescaleOptions& opts) {
  check_power_law_pair(opts);
  const auto SA = mdp.num_pairs();
  const auto consts = derived_constants(mdp);
  const double ce_scale = mdp.discount / mdp.risk;  // gamma / theta
  const double bound = consts.c_max + kBoundSlack;

  TwoTimescaleResult res;
  auto& q = res.state.q;
  auto& g = res.state.g;
  q = opts.q0 ? *opts.q0 : QVector::constant(SA, 0.0);
  g = opts.g0 ? *opts.g0 : std::vector<double>(SA, 1.0);
  if (q.size() != SA || g.size() != SA) throw ConfigurationError("two-timescale: q0 and g0 need S*A entries");
  if (opts.reference && opts.reference->size() != SA)
    throw ConfigurationError("two-timescale: reference Q* needs S*A entries");

  std::vector<double> log_g(SA);
  for (std::size_t i = 0; i < SA; ++i) {
    if (!(g[i] > 0.0)) throw ConfigurationError("two-timescale: g0 must be strictly positive");
    log_g[i] = std::log(g[i]);
  }
  if (std::max(linf_norm(q.values), ce_scale * linf_norm(log_g)) > bound)
    throw ConfigurationError("two-timescale: initial iterates violate max{|Q0|, (gamma/theta)|ln g0|} <= C_max");

  auto& trace = res.trace;
  trace.seed = sampler.config().seed;
  const auto grid = snapshot_grid(opts.num_steps, opts.trace.extra_snapshots);
  std::size_t next_snap = 0;

  for (std::size_t n = 0; n < opts.num_steps; ++n) {
    const Transition t = sampler.next(mdp, q);
    if (n < opts.trace.log_transitions) trace.transitions.push_back(t);
    const std::size_t sa = mdp.pair(t.state, t.action);
    const double alpha = opts.alpha(n);
    const double beta = opts.beta(n);
    const double g_hat = sample_G(mdp, q, t.state, t.action, t.next_state);

    double q_norm = 0.0;
    for (std::size_t i = 0; i < SA; ++i) {
      q[i] += alpha * (-ce_scale * log_g[i] - q[i]);
      q_norm = std::max(q_norm, std::abs(q[i]));
    }
    g[sa] += beta * (g_hat - g[sa]);
    log_g[sa] = std::log(g[sa]);

    const double radius = std::max(q_norm, ce_scale * linf_norm(log_g));
    if (!(radius <= bound)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "two-timescale stability bound violated at step " << n + 1 << ": " << radius << " > C_max "
          << consts.c_max;
      report_violation(trace, opts.trace, msg.str());
    }

    if (next_snap < grid.size() && grid[next_snap] == n + 1) {
      trace.steps.push_back(n + 1);
      if (opts.reference) {
        trace.error.push_back(linf_distance(q, *opts.reference));
        trace.g_track_error.push_back(g_tracking_error(mdp, q, g));
      }
      if (opts.trace.record_iterates) trace.iterates.push_back(q.values);
      ++next_snap;
    }
  }
  return res;
}

OneTimescaleResult one_timescale_run(const TabularMdp& mdp, Sampler& sampler, const OneTimescaleOptions& opts) {
  const auto SA = mdp.num_pairs();
  const auto consts = derived_constants(mdp);
  if (consts.log_c_u > 700.0)
    throw ConfigurationError("one-timescale: utility scale exp(theta |r| / (gamma (1-gamma))) overflows a double");
  const double lo = consts.c_ell - kBoxSlack;
  const double hi = consts.c_u * (1.0 + kBoxSlack);

  OneTimescaleResult res;
  auto& x = res.x;
  x = opts.x0 ? *opts.x0 : UtilityVector::constant(SA, 1.0);
  if (x.size() != SA) throw ConfigurationError("one-timescale: x0 needs S*A entries");
  if (opts.reference && opts.reference->size() != SA)
    throw ConfigurationError("one-timescale: reference x* needs S*A entries");
  for (double v : x.values)
    if (!(v >= lo && v <= hi)) throw ConfigurationError("one-timescale: x0 must lie in [C_l, C_u]^{SA}");

  auto& trace = res.trace;
  trace.seed = sampler.config().seed;
  const auto grid = snapshot_grid(opts.num_steps, opts.trace.extra_snapshots);
  std::size_t next_snap = 0;

  for (std::size_t n = 0; n < opts.num_steps; ++n) {
    const Transition t = sampler.next(mdp, x);
    if (n < opts.trace.log_transitions) trace.transitions.push_back(t);
    const std::size_t sa = mdp.pair(t.state, t.action);
    const double alpha = opts.alpha(n);
    const double f_hat = sample_F_hat(mdp, x, t.state, t.action, t.next_state);
    if (!(f_hat >= lo && f_hat <= hi)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "one-timescale: F_hat = " << f_hat << " outside [C_l, C_u] at step " << n + 1;
      report_violation(trace, opts.trace, msg.str());
    }
    x[sa] += alpha * (f_hat - x[sa]);
    if (!(x[sa] >= lo && x[sa] <= hi)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "one-timescale: x(" << t.state << "," << t.action << ") = " << x[sa] << " left [C_l, C_u] at step "
          << n + 1;
      report_violation(trace, opts.trace, msg.str());
    }

    if (next_snap < grid.size() && grid[next_snap] == n + 1) {
      trace.steps.push_back(n + 1);
      if (opts.reference) trace.error.push_back(sup_log_distance(x, *opts.reference));
      if (opts.trace.record_iterates) trace.iterates.push_back(x.values);
      ++next_snap;
    }
  }
  return res;
}

double compute_C1(double c_ell, double x_star, double gamma) {
  const double y = c_ell / x_star;
  if (std::abs(y - 1.0) <= 1e-12) return 1.0 - gamma;
  return (y - std::pow(y, gamma)) / (y - 1.0);
}

double compute_C2_tilde(double c_u, double x_star, double gamma, double c1) {
  const double ratio = c_u / x_star;
  const double sq = ratio * ratio;
  return (std::max(std::pow(ratio, 2.0 * gamma), sq) + sq) / (4.0 * c1 * c1);
}

void validate_scalar_params(const ScalarRecursionParams& p) {
  if (!(p.c_ell > 0.0)) throw ConfigurationError("scalar recursion: c_ell must be positive");
  if (!(p.c_ell <= p.x_star && p.x_star <= p.c_u))
    throw ConfigurationError("scalar recursion: need c_ell <= x_star <= c_u");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw ConfigurationError("scalar recursion: gamma must lie in [0,1)");
  if (!(p.noise >= 0.0 && p.noise <= p.c_u - p.c_ell))
    throw ConfigurationError("scalar recursion: noise amplitude must lie in [0, c_u - c_ell]");
  if (p.x0 && !(*p.x0 >= p.c_ell && *p.x0 <= p.c_u))
    throw ConfigurationError("scalar recursion: x0 must lie in [c_ell, c_u]");
}

ScalarTrace scalar_recursion_run(const ScalarRecursionParams& p, std::size_t num_steps, std::uint64_t seed,
                                 std::span<const std::size_t> steps) {
  validate_scalar_params(p);
  const auto default_grid = steps.empty() ? geometric_grid(num_steps) : std::vector<std::size_t>{};
  const std::span<const std::size_t> grid = steps.empty() ? std::span<const std::size_t>(default_grid) : steps;
  const auto alpha = StepSchedule::scalar_harmonic(compute_C1(p.c_ell, p.x_star, p.gamma));

  ScalarTrace out;
  out.seed = seed;
  CounterRng rng(seed);
  double x = p.x0.value_or(p.c_ell);
  std::size_t next_snap = 0;
  for (std::size_t n = 0; n < num_steps; ++n) {
    const double drift = p.x_star * std::exp(p.gamma * std::log(x / p.x_star)) - x;
    const double zeta = p.noise * (2.0 * rng.uniform() - 1.0);
    x = std::clamp(x + alpha(n) * (drift + zeta), p.c_ell, p.c_u);
    while (next_snap < grid.size() && grid[next_snap] == n + 1) {
      out.steps.push_back(n + 1);
      out.abs_rel_error.push_back(std::abs(x / p.x_star - 1.0));
      ++next_snap;
    }
  }
  return out;
}

namespace {

// Runs body(i) for i in [0, n) across threads; the first exception (lowest
// index) is rethrown after the region instead of terminating the process.
template <class Body>
void parallel_over_seeds(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<TwoTimescaleResult> two_timescale_runs(const TabularMdp& mdp, const SamplerConfig& sampler,
                                                   const TwoTimescaleOptions& opts,
                                                   std::span<const std::uint64_t> seeds) {
  check_power_law_pair(opts);
  std::vector<TwoTimescaleResult> out(seeds.size());
  parallel_over_seeds(seeds.size(), [&](std::size_t i) {
    auto cfg = sampler;
    cfg.seed = seeds[i];
    Sampler smp(mdp, cfg);
    out[i] = two_timescale_run(mdp, smp, opts);
  });
  return out;
}

std::vector<OneTimescaleResult> one_timescale_runs(const TabularMdp& mdp, const SamplerConfig& sampler,
                                                   const OneTimescaleOptions& opts,
                                                   std::span<const std::uint64_t> seeds) {
  std::vector<OneTimescaleResult> out(seeds.size());
  parallel_over_seeds(seeds.size(), [&](std::size_t i) {
    auto cfg = sampler;
    cfg.seed = seeds[i];
    Sampler smp(mdp, cfg);
    out[i] = one_timescale_run(mdp, smp, opts);
  });
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

namespace {

template <class Member>
std::vector<double> median_column(std::span<const LearnerTrace> traces, Member member) {
  if (traces.empty()) return {};
  const auto len = (traces.front().*member).size();
  std::vector<double> out(len);
  for (std::size_t k = 0; k < len; ++k) {
    std::vector<double> col;
    col.reserve(traces.size());
    for (const auto& t : traces) {
      if ((t.*member).size() != len) throw std::invalid_argument("median over traces with different snapshot grids");
      col.push_back((t.*member)[k]);
    }
    out[k] = median(std::move(col));
  }
  return out;
}

}  // namespace

std::vector<double> median_error(std::span<const LearnerTrace> traces) {
  return median_column(traces, &LearnerTrace::error);
}

std::vector<double> median_g_track_error(std::span<const LearnerTrace> traces) {
  return median_column(traces, &LearnerTrace::g_track_error);
}

}  // namespace rsrl
