#pragma once

// Corpus-level kernels. Each parallel kernel has a serial reference with
// identical results, used by the tests and the benchmark.

#include <string>
#include <vector>

#include "histnorm/corpus.hpp"
#include "histnorm/hypgen.hpp"
#include "histnorm/lexicon.hpp"
#include "histnorm/reranker.hpp"

namespace histnorm {

using TokenSentences = std::vector<std::vector<std::string>>;

TokenSentences orig_sentences(const std::vector<AlignedSentence>& corpus);

// Asks the generator once for every OOV type of the corpus.
GeneratedHypotheses generate_oov(const TokenSentences& sentences, const SubstitutionLexicon& lex,
                                 HypothesisGenerator& gen, int k);

// Normalizes every sentence. Sentences are decoded in parallel when the
// language model is the built-in n-gram model; an external scorer is
// driven from one thread because its client allows one request at a time.
TokenSentences normalize_corpus(const TokenSentences& sentences, const SubstitutionLexicon& lex,
                                const GeneratedHypotheses& generated, const LanguageModel& lm,
                                const RerankConfig& cfg);
TokenSentences normalize_corpus_serial(const TokenSentences& sentences, const SubstitutionLexicon& lex,
                                       const GeneratedHypotheses& generated, const LanguageModel& lm,
                                       const RerankConfig& cfg);

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t pairs = 0;
  std::size_t identity_pairs = 0;
  std::size_t spacing_pairs = 0;
  std::size_t most_frequent_correct = 0;  // against a lexicon of the same data

  double identity_percent() const;
  double spacing_percent() const;
  double most_frequent_percent() const;
};

CorpusStats corpus_statistics(const std::vector<AlignedSentence>& corpus);
std::string format_stats(const CorpusStats& stats);

}  // namespace histnorm
