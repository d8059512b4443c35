#include <benchmark/benchmark.h>

#include "agedecor/eval.hpp"
#include "agedecor/penalty.hpp"
#include "agedecor/rng.hpp"
#include "agedecor/trainer.hpp"
#include "agedecor/trendfit.hpp"

using namespace agedecor;

namespace {

struct BatchFixture {
  std::vector<double> z, w, logits;
  std::vector<int> y;

  explicit BatchFixture(std::size_t n) {
    auto rng = rng_stream(1, "bench");
    for (std::size_t i = 0; i < n; ++i) {
      z.push_back(rng.uniform());
      y.push_back(rng.bernoulli(0.5) ? 1 : 0);
      w.push_back(rng.uniform(0.05, 1.0));
      logits.push_back(rng.normal(0, 1.5));
    }
    y[0] = 0;
    y[1] = 1;
  }

  PenaltyBatch view() const { return {z, y, w}; }
};

}  // namespace

static void BM_TotalLoss(benchmark::State& state) {
  const BatchFixture b(static_cast<std::size_t>(state.range(0)));
  const PenaltyConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_loss(b.logits, b.view(), cfg));
  }
}
BENCHMARK(BM_TotalLoss)->Arg(64)->Arg(256);

static void BM_PenaltyGradLogits(benchmark::State& state) {
  const BatchFixture b(static_cast<std::size_t>(state.range(0)));
  const PenaltyConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(penalty_grad_logits(b.logits, b.view(), cfg));
  }
}
BENCHMARK(BM_PenaltyGradLogits)->Arg(64)->Arg(256);

static void BM_HuberFit(benchmark::State& state) {
  auto rng = rng_stream(2, "bench");
  std::vector<DifficultyRecord> recs;
  const auto n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    const double z = rng.uniform();
    recs.push_back({i, 0.4 + 0.2 * z + rng.normal(0, 0.05), z, 0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(huber_fit(recs));
  }
}
BENCHMARK(BM_HuberFit)->Arg(1000)->Arg(4000);

static void BM_Auc(benchmark::State& state) {
  auto rng = rng_stream(3, "bench");
  ScoredSet s;
  for (int i = 0; i < state.range(0); ++i)
    s.samples.push_back({rng.uniform(), rng.bernoulli(0.5) ? 1 : 0, 50.0, 0.5});
  s.samples[0].y = 1;
  s.samples[1].y = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(auc(s));
  }
}
BENCHMARK(BM_Auc)->Arg(2000)->Arg(10000);

static void BM_TrainCell(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.n_pool = 3000;
  cfg.feature_dim = 16;
  const Dataset pool = generate_population(cfg, 4);
  const SplitBundle split =
      shift_split(pool, make_shift_config(pool, 4.0, 1200, 600), 5);
  TrainConfig tc;
  tc.epochs = static_cast<int>(state.range(0));
  tc.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(split, tc));
  }
}
BENCHMARK(BM_TrainCell)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
