#include <benchmark/benchmark.h>

#include <random>

#include "blindguard/attacks.hpp"
#include "blindguard/model.hpp"
#include "blindguard/ops.hpp"
#include "blindguard/preprocessing.hpp"

using namespace blindguard;

namespace {

Tensor uniform(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = uniform({n, n}, 1), b = uniform({n, n}, 2);
  for (auto _ : state) {
    Graph g;
    benchmark::DoNotOptimize(matmul(g.constant(a), g.constant(b)).value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

// First MNIST layer: 5x5, 32 output channels, on raw pixels or a 15-level encoding.
void BM_Conv2dForwardBackward(benchmark::State& state) {
  const auto cin = static_cast<std::size_t>(state.range(0));
  const Tensor x = uniform({100, cin, 28, 28}, 3), k = uniform({32, cin, 5, 5}, 4);
  for (auto _ : state) {
    Graph g;
    Var kv = g.leaf(k, true);
    g.backward(sum(conv2d(g.constant(x), kv, Padding::same)));
    benchmark::DoNotOptimize(kv.grad().data());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Conv2dForwardBackward)->Arg(1)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_PipelineApply(benchmark::State& state) {
  const Tensor x = uniform({100, 1, 28, 28}, 5);
  const Pipeline p = Pipeline::canonical(state.range(0) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(pipeline_apply(p, x).data.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_PipelineApply)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_MnistForward(benchmark::State& state) {
  const Model model = build_model(Architecture::mnist(15), 6);
  const Tensor x = pipeline_apply(Pipeline::canonical(), uniform({100, 1, 28, 28}, 7)).data;
  for (auto _ : state) benchmark::DoNotOptimize(model.logits(x).data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_MnistForward)->Unit(benchmark::kMillisecond);

// One LS-PGA step (relaxation, forward, backward, update) on a batch of 100.
void BM_LspgaStep(benchmark::State& state) {
  const Model model = build_model(Architecture::mnist(15), 8);
  const Tensor x = uniform({100, 1, 28, 28}, 9);
  LspgaProblem problem;
  problem.model = &model;
  problem.mask = compute_mask(x, 0.3, 15);
  problem.labels.assign(100, 3);
  AttackConfig cfg;
  cfg.steps = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lspga_once(problem, cfg).loss.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_LspgaStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
