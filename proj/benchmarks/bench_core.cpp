#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "srlproj/aligner.hpp"
#include "srlproj/io.hpp"
#include "srlproj/langid.hpp"
#include "srlproj/projector.hpp"

using namespace srlproj;

namespace {

std::vector<align::TokenizedPair> dictionary_pairs(int n_pairs) {
  std::mt19937_64 rng(1);
  std::vector<align::TokenizedPair> out;
  for (int k = 0; k < n_pairs; ++k) {
    align::TokenizedPair p;
    const int len = 5 + static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i) {
      const int w = static_cast<int>(rng() % 200);
      p.source.push_back("e" + std::to_string(w));
      p.target.push_back("f" + std::to_string(w));
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Right-branching tree: every token hangs from its left neighbour.
AnnotatedSentence chain(int n) {
  AnnotatedSentence s;
  s.id = "s";
  for (int i = 0; i < n; ++i) {
    Token t;
    t.index = i;
    t.form = "w" + std::to_string(i);
    t.upos = i == 0 ? "VERB" : "NOUN";
    t.head = i == 0 ? kRoot : i - 1;
    s.tokens.push_back(t);
  }
  return s;
}

void BM_EmIteration(benchmark::State& state) {
  const auto corpus = dictionary_pairs(static_cast<int>(state.range(0)));
  align::AlignerOptions opts;
  opts.iterations = 1;
  opts.workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(align::em_train(corpus, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmIteration)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);

void BM_ViterbiDecode(benchmark::State& state) {
  const auto corpus = dictionary_pairs(2000);
  const auto model = align::em_train(corpus);
  for (auto _ : state) benchmark::DoNotOptimize(align::viterbi_decode_all(model, corpus));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_ViterbiDecode)->Unit(benchmark::kMillisecond);

void BM_ProjectPair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SentencePair pair;
  pair.id = "p";
  pair.source = chain(n);
  pair.target = chain(n);
  for (int i = 0; i < n; ++i) pair.alignment.push_back({i, i});
  pair.source.frames.push_back({"F", {0, 0}, "x.v", {{"A", {1, n - 1}, true}}});
  for (auto _ : state) benchmark::DoNotOptimize(project::project_pair(pair));
}
BENCHMARK(BM_ProjectPair)->Arg(10)->Arg(40);

void BM_LangIdDetect(benchmark::State& state) {
  std::map<std::string, std::vector<std::string>> corpora;
  for (int k = 0; k < 200; ++k) {
    corpora["en"].push_back("the quick brown fox number " + std::to_string(k) + " jumps over the lazy dog");
    corpora["he"].push_back("השועל החום המהיר מספר " + std::to_string(k) + " קופץ מעל הכלב העצלן");
  }
  const auto model = langid::train_langid(corpora);
  const std::string text = langid::clean_text("where are you going tonight, my friend?");
  for (auto _ : state) benchmark::DoNotOptimize(model.detect(text));
}
BENCHMARK(BM_LangIdDetect);

void BM_ConlluParse(benchmark::State& state) {
  std::vector<AnnotatedSentence> sentences;
  for (int k = 0; k < 1000; ++k) {
    sentences.push_back(chain(5 + k % 20));
    sentences.back().id = "s" + std::to_string(k);
  }
  const std::string text = io::write_conllu(sentences);
  for (auto _ : state) benchmark::DoNotOptimize(io::parse_conllu(text));
  state.SetBytesProcessed(state.iterations() * static_cast<long long>(text.size()));
}
BENCHMARK(BM_ConlluParse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
