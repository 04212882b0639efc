#include <benchmark/benchmark.h>

#include <map>

#include "epss/krylov/gmres.hpp"
#include "epss/linalg/lu.hpp"
#include "epss/precond/config.hpp"
#include "epss/precond/operator.hpp"
#include "epss/precond/parameters.hpp"
#include "epss/problems/generators.hpp"

namespace {

const epss::SaddleSystem& oseen(std::size_t q) {
  static std::map<std::size_t, epss::SaddleSystem> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, epss::gen_oseen({.grid = q})).first;
  return it->second;
}

epss::EpssOperator sepss(const epss::SaddleSystem& sys) {
  const double alpha = 1e-4;
  const double beta = epss::sepss_beta_star(sys, alpha).value;
  return epss::EpssOperator::build(sys, epss::preset_config(epss::Preset::sepss, sys, alpha, beta));
}

void BM_Spmv(benchmark::State& state) {
  const auto& a = oseen(static_cast<std::size_t>(state.range(0))).a();
  epss::Vector x(a.cols(), 1.0), y(a.rows());
  for (auto _ : state) {
    a.multiply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}
BENCHMARK(BM_Spmv)->Arg(16)->Arg(32)->Arg(64);

void BM_SparseLu(benchmark::State& state) {
  const auto& a = oseen(static_cast<std::size_t>(state.range(0))).a();
  for (auto _ : state) {
    auto lu = epss::lu_factor(a, epss::LuBackend::sparse);
    benchmark::DoNotOptimize(lu);
  }
}
BENCHMARK(BM_SparseLu)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SepssBuild(benchmark::State& state) {
  const auto& sys = oseen(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto op = sepss(sys);
    benchmark::DoNotOptimize(op);
  }
}
BENCHMARK(BM_SepssBuild)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SepssApply(benchmark::State& state) {
  const auto& sys = oseen(static_cast<std::size_t>(state.range(0)));
  const auto op = sepss(sys);
  epss::Vector x(sys.size(), 1.0), y(sys.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_SepssApply)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_GmresSepss(benchmark::State& state) {
  const auto& sys = oseen(static_cast<std::size_t>(state.range(0)));
  const auto op = sepss(sys);
  const epss::Vector b = epss::rhs_from_ones(sys).flatten();
  const epss::LinearMap a = [&](std::span<const double> in, std::span<double> out) {
    epss::apply_full(sys, in, out);
  };
  const epss::LinearMap m = [&](std::span<const double> in, std::span<double> out) { op.apply(in, out); };
  for (auto _ : state) {
    auto r = epss::gmres(a, m, b, epss::Vector(sys.size(), 0.0));
    benchmark::DoNotOptimize(r.u.data());
    state.counters["IT"] = static_cast<double>(r.report.iterations);
  }
}
BENCHMARK(BM_GmresSepss)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
