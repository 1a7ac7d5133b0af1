// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "adleg/adaptive.hpp"
#include "adleg/experiment.hpp"
#include "adleg/galerkin.hpp"
#include "adleg/stiffness.hpp"

namespace {

adleg::ExperimentConfig catalog_config(const char* name, adleg::Algorithm algorithm, double theta) {
  adleg::ExperimentConfig c;
  c.problem = name;
  c.adaptive.algorithm = algorithm;
  c.adaptive.theta = theta;
  c.adaptive.tol = 1e-9;
  return c;
}

const adleg::StiffnessOperator& p3() {
  static const adleg::StiffnessOperator A(adleg::build_problem(catalog_config("P3", adleg::Algorithm::adleg, 0.5)));
  return A;
}

void BM_EntryAssembly(benchmark::State& state) {
  const auto nu = p3().problem().nu;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double sum = 0.0;
    for (int m = 2; m < n + 2; ++m) sum += adleg::entry_diffusion(m, n + 1, nu);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EntryAssembly)->Arg(32)->Arg(128)->Arg(512);

void BM_Galerkin(benchmark::State& state) {
  const auto& A = p3();
  const auto f = adleg::assemble_rhs(A);
  const auto lambda = adleg::IndexSet::range(2, static_cast<int>(state.range(0)) + 1);
  for (auto _ : state) benchmark::DoNotOptimize(adleg::gal(A, f, lambda));
}
BENCHMARK(BM_Galerkin)->Arg(8)->Arg(32)->Arg(128);

void BM_Residual(benchmark::State& state) {
  const auto& A = p3();
  const auto f = adleg::assemble_rhs(A);
  const auto sol = adleg::gal(A, f, adleg::IndexSet::range(2, static_cast<int>(state.range(0)) + 1));
  for (auto _ : state) benchmark::DoNotOptimize(adleg::res(A, f, sol));
}
BENCHMARK(BM_Residual)->Arg(8)->Arg(32);

void BM_Run(benchmark::State& state) {
  static const char* names[] = {"P1", "P2", "P3"};
  const char* name = names[state.range(0)];
  const auto algorithm = state.range(1) ? adleg::Algorithm::pc_adleg : adleg::Algorithm::adleg;
  const double theta = state.range(1) ? (state.range(0) == 1 ? 0.9995 : 0.999) : 0.5;
  const auto config = catalog_config(name, algorithm, theta);
  for (auto _ : state) benchmark::DoNotOptimize(adleg::run_experiment(config));
  state.SetLabel(std::string(name) + " " + adleg::to_string(algorithm));
}
BENCHMARK(BM_Run)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
