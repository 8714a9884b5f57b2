#include <benchmark/benchmark.h>

#include "momentest/avar.hpp"
#include "momentest/estimators.hpp"
#include "momentest/model.hpp"
#include "momentest/specialfn.hpp"

using namespace momentest;

namespace {

void digamma_trigamma(benchmark::State& state) {
  double x = 0.37, acc = 0.0;
  for (auto _ : state) {
    acc += specialfn::digamma(x) + specialfn::trigamma(x);
    x = x < 50.0 ? x * 1.07 : 0.37;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(digamma_trigamma);

void dirichlet_sampling(benchmark::State& state) {
  const DirichletParams p({0.8, 0.2, 1.0, 2.0, 5.0});
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_dirichlet(p, static_cast<std::size_t>(state.range(0)), {1, stream++}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(dirichlet_sampling)->Arg(50)->Arg(5000);

void dirichlet_estimator(benchmark::State& state) {
  const auto method = static_cast<Method>(state.range(0));
  const auto s = sample_dirichlet(DirichletParams({0.8, 0.2, 1.0, 2.0, 5.0}), 500, {2, 0});
  for (auto _ : state) benchmark::DoNotOptimize(estimate(s, method));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(dirichlet_estimator)
    ->Arg(static_cast<int>(Method::me))
    ->Arg(static_cast<int>(Method::same))
    ->Arg(static_cast<int>(Method::mle));

void mgamma_estimator(benchmark::State& state) {
  const auto method = static_cast<Method>(state.range(0));
  const auto s = sample_mgamma(MGammaParams({0.2, 1.0, 2.0, 5.0}, 1.5), 500, {3, 0});
  for (auto _ : state) benchmark::DoNotOptimize(estimate(s, method));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(mgamma_estimator)
    ->Arg(static_cast<int>(Method::me))
    ->Arg(static_cast<int>(Method::same))
    ->Arg(static_cast<int>(Method::mle))
    ->Arg(static_cast<int>(Method::dir_same));

void mgamma_avar(benchmark::State& state) {
  const MGammaParams g({0.2, 1.0, 2.0, 5.0}, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(avar(g, Method::dir_same));
}
BENCHMARK(mgamma_avar);

}  // namespace

BENCHMARK_MAIN();
