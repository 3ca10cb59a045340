#include <benchmark/benchmark.h>

#include <random>

#include "fnls/schemes.hpp"

using namespace fnls;

namespace {

StateVector soliton_state(const Grid& g) { return ModulatedSech{}.sample(g); }

void BM_StepApply(benchmark::State& state) {
  const Grid g(20.0, static_cast<std::size_t>(state.range(0)));
  const auto u = soliton_state(g);
  const StepOperator op(build_symbol(g, 1.6), 0.02, density_of(u));
  std::vector<Complex> out(g.size());
  for (auto _ : state) {
    op.apply(u.span(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StepApply)->Arg(401)->Arg(1001)->Arg(4001)->Complexity();

void BM_TransformedApply(benchmark::State& state) {
  const Grid g(20.0, static_cast<std::size_t>(state.range(0)));
  const auto u = soliton_state(g);
  const TransformedOperator op(StepOperator(build_symbol(g, 1.6), 0.02, density_of(u)));
  const auto y = dft_forward(g, u);
  std::vector<Complex> out(g.size());
  for (auto _ : state) {
    op.apply(y.span(), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_TransformedApply)->Arg(401)->Arg(1001)->Arg(4001);

// One linearly implicit step from the soliton, per strategy.
void BM_LiStep(benchmark::State& state) {
  const auto strategy = static_cast<Strategy>(state.range(0));
  const ProblemSpec spec{Grid(20.0, 401), 2.0, 1, 0.02, 0.02, ModulatedSech{}};
  const auto u0 = soliton_state(spec.grid);
  const auto u1 = cn_start(u0, spec).next;
  const SchemeState st{1, 0.02, {u1, u0}};
  const Stepper stepper(spec, SolverConfig{}, strategy);
  int iterations = 0;
  for (auto _ : state) {
    auto r = stepper.advance(st);
    iterations = r.report.iterations;
    benchmark::DoNotOptimize(r.next.values().data());
  }
  state.SetLabel(to_string(strategy));
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_LiStep)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
