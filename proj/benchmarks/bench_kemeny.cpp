#include "kemeny/euclidean.hpp"
#include "kemeny/generators.hpp"
#include "kemeny/kemeny.hpp"
#include "kemeny/manifold.hpp"
#include "kemeny/riemannian.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace kemeny;

GeneratedChain chain_for(const benchmark::State& state) {
  return generate_test_chain(ChainKind::random_reversible, state.range(0), 7);
}

void BM_KemenyTrace(benchmark::State& state) {
  const GeneratedChain g = chain_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_trace(g.chain.P()));
}
BENCHMARK(BM_KemenyTrace)->RangeMultiplier(2)->Range(16, 256);

void BM_KemenyEigen(benchmark::State& state) {
  const GeneratedChain g = chain_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_eigen(g.chain));
}
BENCHMARK(BM_KemenyEigen)->RangeMultiplier(2)->Range(16, 256);

void BM_RiemannianGradient(benchmark::State& state) {
  const GeneratedChain g = chain_for(state);
  const manifold::ManifoldSpec spec(g.chain, g.pattern);
  const Matrix X = manifold::random_point(spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(manifold::riemannian_grad(X, spec));
}
BENCHMARK(BM_RiemannianGradient)->RangeMultiplier(2)->Range(16, 128);

template <riemannian::SolverResult (*Solve)(const manifold::ManifoldSpec&, const Matrix&,
                                            const riemannian::SolverOptions&)>
void BM_Riemannian(benchmark::State& state) {
  const GeneratedChain g = chain_for(state);
  const manifold::ManifoldSpec spec(g.chain, g.pattern);
  const Matrix x0 = riemannian::default_start(spec);
  Index iters = 0;
  for (auto _ : state) {
    const riemannian::SolverResult r = Solve(spec, x0, {});
    iters = r.report.iterations;
  }
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_Riemannian<riemannian::riemannian_cg>)
    ->Name("BM_RiemannianCG")->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Riemannian<riemannian::riemannian_bb>)
    ->Name("BM_RiemannianBB")->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_Constrained(benchmark::State& state) {
  const GeneratedChain g = chain_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(ipm::solve_constrained(g.chain, g.pattern).X);
}
BENCHMARK(BM_Constrained)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
