#include <benchmark/benchmark.h>

#include "xstab/attack.hpp"
#include "xstab/data_gen.hpp"
#include "xstab/experiment.hpp"
#include "xstab/lime.hpp"
#include "xstab/model.hpp"
#include "xstab/rank_sim.hpp"
#include "xstab/rng.hpp"

namespace {

using namespace xstab;

const BowClassifier& short_model() {
  static const BowClassifier model = train_bow(builtin_short_corpus());
  return model;
}

const EmbeddingStore& embeddings() {
  static const EmbeddingStore store = builtin_embeddings();
  return store;
}

RankedList random_ranked_list(Rng& rng, int length) {
  static const std::vector<std::string> pool = {
      "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
      "india", "juliet", "kilo", "lima", "mike", "november", "oscar"};
  std::vector<std::string> items = pool;
  rng.shuffle(items);
  items.resize(static_cast<std::size_t>(length));
  std::vector<double> weights;
  for (int i = 0; i < length; ++i) weights.push_back(rng.uniform());
  return RankedList::with_weights(std::move(items), std::move(weights));
}

void BM_similarity(benchmark::State& state, Measure measure) {
  Rng rng(42);
  std::vector<std::pair<RankedList, RankedList>> pairs;
  for (int i = 0; i < 64; ++i) {
    pairs.emplace_back(random_ranked_list(rng, 10), random_ranked_list(rng, 10));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 63];
    benchmark::DoNotOptimize(similarity(measure, a, b));
  }
}
BENCHMARK_CAPTURE(BM_similarity, rbo05, Measure::kRbo05);
BENCHMARK_CAPTURE(BM_similarity, jaccard_w, Measure::kJaccardWeighted);
BENCHMARK_CAPTURE(BM_similarity, kendall_w, Measure::kKendallWeighted);
BENCHMARK_CAPTURE(BM_similarity, spearman_w, Measure::kSpearmanWeighted);

void BM_explain(benchmark::State& state) {
  Document doc = tokenize(builtin_short_corpus()[0].text);
  ExplainerParams params;
  params.samples = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain(short_model(), doc, params, seed++));
  }
}
BENCHMARK(BM_explain)->Arg(100)->Arg(500)->Arg(1000);

void BM_greedy_attack(benchmark::State& state) {
  Document doc = tokenize(builtin_short_corpus()[0].text);
  AttackConfig cfg;
  cfg.measure = Measure::kRbo05;
  cfg.tau = 0.5;
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(greedy_attack(short_model(), embeddings(), doc, cfg));
  }
}
BENCHMARK(BM_greedy_attack)->Unit(benchmark::kMillisecond);

void BM_genetic_attack(benchmark::State& state) {
  Document doc = tokenize(builtin_short_corpus()[0].text);
  AttackConfig cfg;
  cfg.measure = Measure::kRbo05;
  cfg.tau = 0.5;
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(genetic_attack(short_model(), embeddings(), doc, cfg));
  }
}
BENCHMARK(BM_genetic_attack)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
