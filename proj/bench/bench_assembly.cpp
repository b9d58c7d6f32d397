#include <benchmark/benchmark.h>

#include "kpz/fredholm.hpp"
#include "kpz/kernels.hpp"
#include "kpz/pfaffian.hpp"

namespace {

kpz::NystromSpec spec(int nodes, bool reference) {
  kpz::NystromSpec s;
  s.nodes = nodes;
  s.scale = 2.0;
  s.reference = reference;
  return s;
}

void BM_GseAssemblyParallel(benchmark::State& st) {
  const kpz::GseKernel k;
  const auto s = spec(static_cast<int>(st.range(0)), false);
  for (auto _ : st) benchmark::DoNotOptimize(kpz::assemble_pf_matrix(k, kpz::DomainDk{{-1.0}}, s));
}

void BM_GseAssemblySerialReference(benchmark::State& st) {
  const kpz::GseKernel k;
  const auto s = spec(static_cast<int>(st.range(0)), true);
  for (auto _ : st) benchmark::DoNotOptimize(kpz::assemble_pf_matrix(k, kpz::DomainDk{{-1.0}}, s));
}

void BM_CrossAssemblyParallel(benchmark::State& st) {
  const kpz::CrossKernel k(kpz::CrossKernelParams{0.5, {0.0, 0.5}});
  const auto s = spec(static_cast<int>(st.range(0)), false);
  for (auto _ : st)
    benchmark::DoNotOptimize(kpz::assemble_pf_matrix(k, kpz::DomainDk{{-1.0, 0.0}}, s));
}

void BM_CrossAssemblySerialReference(benchmark::State& st) {
  const kpz::CrossKernel k(kpz::CrossKernelParams{0.5, {0.0, 0.5}});
  const auto s = spec(static_cast<int>(st.range(0)), true);
  for (auto _ : st)
    benchmark::DoNotOptimize(kpz::assemble_pf_matrix(k, kpz::DomainDk{{-1.0, 0.0}}, s));
}

void BM_Pfaffian(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  a = (a - a.transpose()).eval();
  for (auto _ : st) benchmark::DoNotOptimize(kpz::pfaffian(a));
}

}  // namespace

BENCHMARK(BM_GseAssemblyParallel)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GseAssemblySerialReference)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossAssemblyParallel)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossAssemblySerialReference)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pfaffian)->Arg(96)->Arg(192)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
