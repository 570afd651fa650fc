// The OpenMP kernels must agree exactly with their serial references.
#include <doctest.h>

#include <random>

#include "histnorm/eval.hpp"
#include "histnorm/pipeline.hpp"
#include "synthetic.hpp"

using namespace histnorm;

TEST_CASE("parallel kernels equal serial references") {
  const auto corpus = synthetic::corpus(400, 7);
  const std::vector<AlignedSentence> train(corpus.begin(), corpus.begin() + 300);
  const std::vector<AlignedSentence> test(corpus.begin() + 300, corpus.end());

  const auto lex = build_lexicon(train);
  const auto rules = learn_rules(train);
  std::vector<std::vector<std::string>> target;
  for (const auto& s : train) target.push_back(lm_words(s.norm_tokens()));
  const auto lm = train_ngram(target, 3);

  RuleGenerator gen(rules);
  const auto sentences = orig_sentences(test);
  const auto types = oov_types(sentences, lex);
  REQUIRE(!types.empty());
  CHECK(gen.generate(types, 4) == gen.generate_serial(types, 4));

  const auto generated = generate_oov(sentences, lex, gen, 4);
  for (auto mode : {RerankMode::kHybrid, RerankMode::kTypeOnly, RerankMode::kFlatPrior}) {
    RerankConfig cfg;
    cfg.mode = mode;
    const auto par = normalize_corpus(sentences, lex, generated, {&lm, nullptr}, cfg);
    const auto ser = normalize_corpus_serial(sentences, lex, generated, {&lm, nullptr}, cfg);
    CHECK(par == ser);
    const auto vocab = lex.orig_types();
    CHECK(tally_parallel(par, test, vocab) == tally_serial(par, test, vocab));
  }
}
