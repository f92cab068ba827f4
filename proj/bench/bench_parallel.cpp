// Serial reference vs OpenMP version of the parallel kernels.

#include "gre/design.hpp"
#include "gre/diagnostics.hpp"
#include "gre/order.hpp"
#include "gre/problems.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace gre;

namespace {

DesignProblem design_problem(int n) {
  DesignProblem p;
  for (int k = 1; k <= n; ++k) {
    p.candidates.push_back({static_cast<double>(k) / n});
    p.costs.push_back(static_cast<double>(n) / k);
  }
  double total = 0.0;
  for (double c : p.costs) total += c;
  p.budget = 0.4 * total;
  p.bound = ErrorBound::monomial(1.0);
  p.kernel = KernelSpec::matern(0, LengthScales({1.0}));
  return p;
}

Dataset order_data() {
  std::vector<std::vector<double>> rows;
  std::vector<double> vals;
  for (double x : {1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.125, 0.09}) {
    rows.push_back({x});
    vals.push_back(1.0 + x * x * std::cos(x));
  }
  return Dataset::from_rows(rows, vals);
}

std::vector<std::vector<double>> cloud(std::size_t n, std::size_t d) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  for (auto& p : pts) {
    for (auto& v : p) v = u(rng);
  }
  return pts;
}

void BM_DesignSerial(benchmark::State& s) {
  const auto p = design_problem(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(optimize_design_serial(p, {DesignMethod::Exhaustive}));
}
void BM_DesignParallel(benchmark::State& s) {
  const auto p = design_problem(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(optimize_design(p, {DesignMethod::Exhaustive}));
}
BENCHMARK(BM_DesignSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DesignParallel)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_OrderSerial(benchmark::State& s) {
  const auto data = order_data();
  const auto grid = OrderGrid::defaults(1.0);
  for (auto _ : s) benchmark::DoNotOptimize(estimate_order_serial(data, grid, BoundFamily::Monomial));
}
void BM_OrderParallel(benchmark::State& s) {
  const auto data = order_data();
  const auto grid = OrderGrid::defaults(1.0);
  for (auto _ : s) benchmark::DoNotOptimize(estimate_order(data, grid, BoundFamily::Monomial));
}
BENCHMARK(BM_OrderSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrderParallel)->Unit(benchmark::kMillisecond);

void BM_BoxFillSerial(benchmark::State& s) {
  const auto pts = cloud(40, 2);
  for (auto _ : s) benchmark::DoNotOptimize(box_fill_distance_serial(pts, 2));
}
void BM_BoxFillParallel(benchmark::State& s) {
  const auto pts = cloud(40, 2);
  for (auto _ : s) benchmark::DoNotOptimize(box_fill_distance(pts, 2));
}
BENCHMARK(BM_BoxFillSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoxFillParallel)->Unit(benchmark::kMillisecond);

const std::vector<std::vector<double>> kBase = {{0.2}, {0.4}, {0.6}, {0.8}, {1.0}};
const std::vector<double> kH = {1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.125, 0.09};
const std::vector<StudyMethod> kMethods = {StudyMethod::gre(KernelFamily::Matern, 2), StudyMethod::raw(),
                                           StudyMethod::richardson(2)};

void BM_StudySerial(benchmark::State& s) {
  const auto p = central_difference_oracle(2);
  for (auto _ : s) benchmark::DoNotOptimize(run_convergence_study_serial(p, kBase, kH, kMethods));
}
void BM_StudyParallel(benchmark::State& s) {
  const auto p = central_difference_oracle(2);
  for (auto _ : s) benchmark::DoNotOptimize(run_convergence_study(p, kBase, kH, kMethods));
}
BENCHMARK(BM_StudySerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StudyParallel)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
