// OpenMP operator kernels against the serial reference loops.
//
//   ./bench_operators --benchmark_filter=F/
//   OMP_NUM_THREADS=8 ./bench_operators

#include <benchmark/benchmark.h>

#include <cmath>

#include "rsrl/operators.hpp"
#include "rsrl/rng.hpp"

namespace {

using namespace rsrl;

struct Problem {
  TabularMdp mdp;
  UtilityVector x;
  QVector q;
  StationaryPolicy pi;
};

Problem make_problem(std::size_t states, std::size_t actions) {
  Problem p;
  p.mdp = random_mdp(states, actions, {-1, 1}, 0.9, 0.5, 17);
  CounterRng rng(3);
  p.x.values.resize(p.mdp.num_pairs());
  p.q.values.resize(p.mdp.num_pairs());
  for (std::size_t i = 0; i < p.mdp.num_pairs(); ++i) {
    p.x[i] = std::exp(rng.uniform() * 4.0 - 2.0);
    p.q[i] = rng.uniform() * 20.0 - 10.0;
  }
  p.pi = StationaryPolicy::uniform(states, actions);
  return p;
}

template <class Op>
void run(benchmark::State& state, Op&& op) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(op(p));
  // one multiply-add per transition entry
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.mdp.transitions.size()));
}

void F_parallel(benchmark::State& s) { run(s, [](const Problem& p) { return apply_F(p.mdp, p.x); }); }
void F_serial(benchmark::State& s) { run(s, [](const Problem& p) { return serial::apply_F(p.mdp, p.x); }); }
void Fpi_parallel(benchmark::State& s) { run(s, [](const Problem& p) { return apply_F_pi(p.mdp, p.pi, p.x); }); }
void Fpi_serial(benchmark::State& s) { run(s, [](const Problem& p) { return serial::apply_F_pi(p.mdp, p.pi, p.x); }); }
void T_parallel(benchmark::State& s) { run(s, [](const Problem& p) { return apply_T(p.mdp, p.q); }); }
void T_serial(benchmark::State& s) { run(s, [](const Problem& p) { return serial::apply_T(p.mdp, p.q); }); }

}  // namespace

BENCHMARK(F_parallel)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();
BENCHMARK(F_serial)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();
BENCHMARK(Fpi_parallel)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();
BENCHMARK(Fpi_serial)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();
BENCHMARK(T_parallel)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();
BENCHMARK(T_serial)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();

BENCHMARK_MAIN();
