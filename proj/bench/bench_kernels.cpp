#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "navierlab/kernels.hpp"

using namespace navierlab;
namespace k = navierlab::kernels;

namespace {

std::vector<double> profile(std::size_t n, double top) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(n);
    u[i] = top * (1 - r * r);
  }
  return u;
}

template <k::Backend B>
void BM_Nonlinearity(benchmark::State& state) {
  const auto fam = NonlinearityFamily::power(2.5);
  const std::vector<double> u = profile(state.range(0), 3.0);
  std::vector<double> f(u.size()), fp(u.size()), fpp(u.size());
  for (auto _ : state) {
    k::nonlinearity(B, fam, u, f, fp, fpp);
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <k::Backend B>
void BM_Auxiliary(benchmark::State& state) {
  const auto fam = NonlinearityFamily::exponential();
  const std::vector<double> u = profile(state.range(0), 3.0);
  std::vector<double> g(u.size()), H(u.size());
  for (auto _ : state) {
    k::auxiliary(B, fam, u, g, H);
    benchmark::DoNotOptimize(H.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <k::Backend B>
void BM_Residual(benchmark::State& state) {
  const RadialGrid grid(3, static_cast<int>(state.range(0)));
  const BandedOperator lap = laplacian_matrix(grid);
  const RadialField u = sample(grid, [](double r) { return 1 - r * r; });
  const RadialField v = sample(grid, [](double r) { return 2 * (1 - r); });
  std::vector<double> f(grid.unknown_count());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(u[i]);
  std::vector<double> res(2 * f.size());
  const double h2 = grid.h() * grid.h();
  for (auto _ : state) {
    k::navier_residual(B, lap, h2, 10.0, u, v, f, res);
    benchmark::DoNotOptimize(res.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Nonlinearity<k::Backend::Serial>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Nonlinearity<k::Backend::OpenMP>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Auxiliary<k::Backend::Serial>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Auxiliary<k::Backend::OpenMP>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Residual<k::Backend::Serial>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Residual<k::Backend::OpenMP>)->Arg(1 << 12)->Arg(1 << 16);

BENCHMARK_MAIN();
