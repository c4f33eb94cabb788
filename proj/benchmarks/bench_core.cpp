#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "chfem/assembly.hpp"
#include "chfem/exact_solutions.hpp"
#include "chfem/galerkin_periodic.hpp"
#include "chfem/projections.hpp"
#include "chfem/time_integration.hpp"

namespace {

using namespace chfem;

void BM_AssembleGram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SplineSpace space = SplineSpace::periodic(n, 4, -40, 40);
  const QuadratureRule rule = gauss_legendre(5);
  for (auto _ : state) {
    BandedSystem sys = assemble_gram(space, GramForm::h1, rule);
    benchmark::DoNotOptimize(sys);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_AssembleGram)->Range(1 << 10, 1 << 15)->Complexity(benchmark::oN);

void BM_BandedSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SplineSpace space = SplineSpace::periodic(n, 4, -40, 40);
  const QuadratureRule rule = gauss_legendre(5);
  BandedSystem sys = assemble_gram(space, GramForm::h1, rule);
  sys.factorize();
  std::vector<double> b(n, 1.0);
  for (auto _ : state) {
    std::vector<double> x = b;
    sys.solve_factored(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BandedSolve)->Range(1 << 10, 1 << 15)->Complexity(benchmark::oN);

void BM_ModifiedRhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SplineSpace space = SplineSpace::periodic(n, 4, -40, 40);
  PeriodicGalerkin engine(space, gauss_legendre(5));
  ProfileSpec spec;
  spec.name = "peakon";
  spec.amplitudes = {1.0};
  spec.centers = {0.0};
  CoefficientArray u = h1_project(space, make_profile(spec), engine.rule());
  std::vector<double> m(n), out(n);
  engine.h1().matvec(u.c.data(), m.data());
  engine.mass().solve_factored(m.data());
  for (auto _ : state) {
    engine.modified_rhs(m, u.c, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ModifiedRhs)->Range(1 << 10, 1 << 15)->Complexity(benchmark::oN);

void BM_StandardRhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SplineSpace space = SplineSpace::periodic(n, 4, -40, 40);
  PeriodicGalerkin engine(space, gauss_legendre(5));
  ProfileSpec spec;
  spec.name = "gaussian-bump";
  CoefficientArray u = h1_project(space, make_profile(spec), engine.rule());
  std::vector<double> out(n);
  for (auto _ : state) {
    engine.standard_rhs(u.c, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_StandardRhs)->Range(1 << 10, 1 << 15)->Complexity(benchmark::oN);

void BM_SmoothTwEval(benchmark::State& state) {
  const WaveParams wp = WaveParams::from_speed(1.0, 4.0);
  double x = -50.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smooth_tw_eval(wp, x, 0.0));
    x += 0.01;
    if (x > 50) x = -50;
  }
}
BENCHMARK(BM_SmoothTwEval);

}  // namespace

BENCHMARK_MAIN();
