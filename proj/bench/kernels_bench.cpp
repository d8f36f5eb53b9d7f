// Serial against OpenMP node kernels on synthetic data of solver size.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "nls/kernels.hpp"

namespace {

using nls::kernels::Backend;

struct Data {
  std::vector<double> cond, mass, V, K, e2h, u, g, dg, out;
  std::vector<unsigned char> inside;

  explicit Data(std::size_t n)
      : cond(n - 1), mass(n), V(n), K(n, 1.0), e2h(n), u(n), g(n), dg(n), out(n), inside(n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.1, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = uni(rng);
      V[i] = uni(rng);
      e2h[i] = 1e-3 * uni(rng);
      u[i] = std::exp(-1e-4 * static_cast<double>(i)) * uni(rng);
      inside[i] = i < n / 4;
    }
    for (auto& c : cond) c = uni(rng);
  }

  nls::kernels::NodeCoefficients coeff() const { return {K, e2h, inside, 4.0}; }
};

template <Backend B>
void BM_residual(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    nls::kernels::nonlinearity(B, d.coeff(), d.u, d.g, {});
    nls::kernels::residual(B, 0.01, d.cond, 0.5, d.mass, d.V, d.g, d.u, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Backend B>
void BM_nonlinearity(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    nls::kernels::nonlinearity(B, d.coeff(), d.u, d.g, d.dg);
    benchmark::DoNotOptimize(d.dg.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Backend B>
void BM_stiffness(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    nls::kernels::stiffness_apply(B, d.cond, 0.5, d.u, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Backend B>
void BM_energy(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(nls::kernels::potential_energy(B, d.coeff(), d.mass, d.u));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Backend B>
void BM_dot(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(nls::kernels::weighted_dot(B, d.mass, d.u, d.V));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

#define NLS_BENCH_PAIR(fn)                                                        \
  BENCHMARK_TEMPLATE(fn, Backend::serial)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20); \
  BENCHMARK_TEMPLATE(fn, Backend::openmp)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);

NLS_BENCH_PAIR(BM_residual)
NLS_BENCH_PAIR(BM_nonlinearity)
NLS_BENCH_PAIR(BM_stiffness)
NLS_BENCH_PAIR(BM_energy)
NLS_BENCH_PAIR(BM_dot)

BENCHMARK_MAIN();
