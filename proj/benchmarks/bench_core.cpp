#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "glosskit/crosslingual.hpp"
#include "glosskit/embedding.hpp"
#include "glosskit/gloss.hpp"
#include "glosskit/lexicon.hpp"
#include "glosskit/ngram_lm.hpp"
#include "glosskit/rng.hpp"

using namespace glosskit;

namespace {

EmbeddingMatrix random_embeddings(int n, int dim, uint64_t seed,
                                  const char* prefix) {
  EmbeddingMatrix m;
  m.vectors.resize(n, dim);
  SplitMix64 rng(seed);
  for (int i = 0; i < n; ++i) {
    m.tokens.push_back(prefix + std::to_string(i));
    for (int d = 0; d < dim; ++d) m.vectors(i, d) = rng.next_gaussian();
  }
  m.finalize();
  return m;
}

NGramModel toy_lm(int sentences, uint64_t seed) {
  SplitMix64 rng(seed);
  std::ostringstream corpus;
  for (int s = 0; s < sentences; ++s) {
    int len = 5 + static_cast<int>(rng.next_below(15));
    for (int i = 0; i < len; ++i) {
      if (i) corpus << ' ';
      corpus << 'w' << rng.next_below(200);
    }
    corpus << '\n';
  }
  // Kneser-Ney fits its discounts from singleton and doubleton predecessor
  // counts; a uniform corpus has neither, so q0 and q1 supply them.
  corpus << "q0 q1 q1\n";
  std::istringstream in(corpus.str());
  return train_lm(in, 5, Smoothing::kKneserNey);
}

void BM_TopKNeighbors(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto tgt = random_embeddings(n, 64, 1, "t");
  auto query = tgt.vectors.row(n / 2).transpose().eval();
  for (auto _ : state) {
    auto hits = top_k_neighbors(query, tgt, 20);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_TopKNeighbors)->Arg(2000)->Arg(10000);

void BM_Procrustes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto src = random_embeddings(n, 64, 2, "s");
  auto tgt = random_embeddings(n, 64, 3, "t");
  SeedLexicon seed;
  for (int i = 0; i < n; ++i)
    seed.pairs.emplace_back(src.tokens[i], tgt.tokens[i]);
  for (auto _ : state) {
    auto map = procrustes(src, tgt, seed);
    benchmark::DoNotOptimize(map);
  }
}
BENCHMARK(BM_Procrustes)->Arg(500)->Arg(5000);

void BM_LmQuery(benchmark::State& state) {
  auto lm = toy_lm(2000, 4);
  SplitMix64 rng(5);
  std::vector<int> ids;
  for (int i = 0; i < 4096; ++i)
    ids.push_back(lm.id_or_unk("w" + std::to_string(rng.next_below(220))));
  size_t at = 0;
  for (auto _ : state) {
    std::vector<int> ctx = {ids[at % ids.size()], ids[(at + 1) % ids.size()],
                            ids[(at + 2) % ids.size()],
                            ids[(at + 3) % ids.size()]};
    benchmark::DoNotOptimize(lm.logprob_ids(ctx, ids[(at + 4) % ids.size()]));
    ++at;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LmQuery);

void BM_GlossSentence(benchmark::State& state) {
  auto lm = toy_lm(2000, 6);
  BilingualLexicon lex(4, Metric::kCosine);
  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    LexiconEntry e;
    e.source = "s" + std::to_string(i);
    for (int o = 0; o < 4; ++o)
      e.options.push_back({"w" + std::to_string(rng.next_below(200)),
                           1.0 - 0.1 * o});
    lex.add(std::move(e));
  }
  std::vector<std::string> sentence;
  for (int i = 0; i < 20; ++i)
    sentence.push_back("s" + std::to_string(rng.next_below(200)));
  GlossConfig cfg;
  for (auto _ : state) {
    auto out = gloss_sentence(lm, lex, sentence, cfg);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * sentence.size());
}
BENCHMARK(BM_GlossSentence);

}  // namespace

BENCHMARK_MAIN();
