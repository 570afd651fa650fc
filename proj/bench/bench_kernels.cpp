// Serial reference kernels against their OpenMP counterparts on a
// synthetic corpus. OMP_NUM_THREADS controls the parallel runs.

#include <benchmark/benchmark.h>

#include "histnorm/eval.hpp"
#include "histnorm/pipeline.hpp"
#include "synthetic.hpp"

using namespace histnorm;

namespace {

struct Fixture {
  std::vector<AlignedSentence> train, test;
  SubstitutionLexicon lex;
  RuleModel rules;
  NgramModel lm;
  TokenSentences sentences;
  std::vector<std::string> types;
  GeneratedHypotheses generated;
  Predictions predictions;
  std::set<std::string> vocab;

  Fixture() {
    const auto corpus = synthetic::corpus(12000, 11);
    train.assign(corpus.begin(), corpus.begin() + 8000);
    test.assign(corpus.begin() + 8000, corpus.end());
    lex = build_lexicon(train);
    rules = learn_rules(train);
    std::vector<std::vector<std::string>> target;
    for (const auto& s : train) target.push_back(lm_words(s.norm_tokens()));
    lm = train_ngram(target, 3);
    sentences = orig_sentences(test);
    std::set<std::string> seen;
    for (const auto& s : sentences)
      for (const auto& w : s)
        if (seen.insert(w).second) types.push_back(w);
    RuleGenerator gen(rules);
    generated = generate_oov(sentences, lex, gen, 4);
    predictions = normalize_corpus(sentences, lex, generated, {&lm, nullptr}, {});
    vocab = lex.orig_types();
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_NormalizeSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(normalize_corpus_serial(f.sentences, f.lex, f.generated, {&f.lm, nullptr}, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.sentences.size()));
}

void BM_NormalizeParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(normalize_corpus(f.sentences, f.lex, f.generated, {&f.lm, nullptr}, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.sentences.size()));
}

void BM_GenerateSerial(benchmark::State& state) {
  const auto& f = fixture();
  RuleGenerator gen(f.rules);
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate_serial(f.types, 4));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.types.size()));
}

void BM_GenerateParallel(benchmark::State& state) {
  const auto& f = fixture();
  RuleGenerator gen(f.rules);
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate(f.types, 4));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.types.size()));
}

void BM_TallySerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(tally_serial(f.predictions, f.test, f.vocab));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.test.size()));
}

void BM_TallyParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(tally_parallel(f.predictions, f.test, f.vocab));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.test.size()));
}

}  // namespace

BENCHMARK(BM_NormalizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalizeParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TallySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TallyParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
