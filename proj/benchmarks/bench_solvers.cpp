#include <benchmark/benchmark.h>

#include <cmath>
#include <span>

#include "eikonal/astar.hpp"
#include "eikonal/fmm.hpp"
#include "eikonal/heuristics.hpp"

using namespace eikonal;

namespace {

struct Problem {
  Grid grid;
  SpeedField speed;
  NodeId s;
  NodeId t;
  std::vector<double> f;
  Heuristic phi;

  explicit Problem(int m)
      : grid(Grid::make(2, m)),
        speed(SpeedField::sinusoid2d()),
        s(grid.node_at({0.95, 0.7, 0}, true)),
        t(grid.node_at({0.5, 0.5, 0}, true)),
        f(speed.sample(grid)),
        phi(Heuristic::naive(grid.position(s), speed.bounds().f2, 1.0, 2)) {}
};

void BM_FmmFull(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmm_solve(p.grid, std::span<const double>(p.f), ExitSet::single(p.t)).value.data());
  }
  state.SetItemsProcessed(state.iterations() * p.grid.size());
}

void BM_FmmStopAtSource(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmm_solve(p.grid, std::span<const double>(p.f), ExitSet::single(p.t), p.s).value.data());
  }
}

void BM_SaStar(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const bool cache = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sa_star_solve(p.grid, p.speed, p.t, p.s, p.phi, cache).value_at_source);
  }
}

void BM_AaStar(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const double psi = compute_psi(PsiKind::kPsi2, p.grid, p.speed, p.s, p.t);
  const bool bb = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aa_star_solve(p.grid, p.speed, p.t, p.s, p.phi, psi, 0.25, 0.5, bb).value_at_source);
  }
}

void BM_Bidirectional(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bidirectional_solve(p.grid, p.speed, p.s, p.t).value);
  }
}

}  // namespace

BENCHMARK(BM_FmmFull)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FmmStopAtSource)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SaStar)->Args({101, 1})->Args({401, 1})->Args({401, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AaStar)->Args({101, 0})->Args({401, 0})->Args({401, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bidirectional)->Arg(401)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
