#include "histnorm/pipeline.hpp"

#include <iomanip>
#include <sstream>

#include "histnorm/errors.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

TokenSentences orig_sentences(const std::vector<AlignedSentence>& corpus) {
  TokenSentences out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(s.orig_tokens());
  return out;
}

GeneratedHypotheses generate_oov(const TokenSentences& sentences, const SubstitutionLexicon& lex,
                                 HypothesisGenerator& gen, int k) {
  GeneratedHypotheses out;
  const auto types = oov_types(sentences, lex);
  if (types.empty()) return out;
  auto lists = gen.generate(types, k);
  if (lists.size() != types.size()) throw ProtocolError("generator returned the wrong number of lists");
  for (std::size_t i = 0; i < types.size(); ++i) {
    renormalize(lists[i], types[i]);
    out.emplace(types[i], std::move(lists[i]));
  }
  return out;
}

namespace {

std::vector<std::string> normalize_one(const std::vector<std::string>& sentence, const SubstitutionLexicon& lex,
                                       const GeneratedHypotheses& generated, const LanguageModel& lm,
                                       const RerankConfig& cfg) {
  if (sentence.empty()) return {};
  return rerank(assemble_hypothesis_sets(sentence, lex, generated, cfg), lm, cfg);
}

}  // namespace

TokenSentences normalize_corpus_serial(const TokenSentences& sentences, const SubstitutionLexicon& lex,
                                       const GeneratedHypotheses& generated, const LanguageModel& lm,
                                       const RerankConfig& cfg) {
  cfg.validate();
  TokenSentences out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) out[i] = normalize_one(sentences[i], lex, generated, lm, cfg);
  return out;
}

TokenSentences normalize_corpus(const TokenSentences& sentences, const SubstitutionLexicon& lex,
                                const GeneratedHypotheses& generated, const LanguageModel& lm,
                                const RerankConfig& cfg) {
  const bool needs_external = lm.external != nullptr && lm.ngram == nullptr && cfg.mode != RerankMode::kTypeOnly;
  if (needs_external) return normalize_corpus_serial(sentences, lex, generated, lm, cfg);
  cfg.validate();
  // Only the built-in model is consulted from the worker threads.
  const LanguageModel local{lm.ngram, nullptr};
  TokenSentences out(sentences.size());
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    try {
      out[s] = normalize_one(sentences[s], lex, generated, local, cfg);
    } catch (...) {
#pragma omp critical(histnorm_normalize_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double CorpusStats::identity_percent() const {
  return pairs ? 100.0 * static_cast<double>(identity_pairs) / static_cast<double>(pairs) : 0.0;
}
double CorpusStats::spacing_percent() const {
  return pairs ? 100.0 * static_cast<double>(spacing_pairs) / static_cast<double>(pairs) : 0.0;
}
double CorpusStats::most_frequent_percent() const {
  return pairs ? 100.0 * static_cast<double>(most_frequent_correct) / static_cast<double>(pairs) : 0.0;
}

CorpusStats corpus_statistics(const std::vector<AlignedSentence>& corpus) {
  CorpusStats st;
  const auto lex = SubstitutionLexicon::build(corpus);
  st.sentences = corpus.size();
  for (const auto& s : corpus)
    for (const auto& p : s.pairs) {
      ++st.pairs;
      if (p.orig == p.norm) ++st.identity_pairs;
      if (contains_pseudo_char(p.norm)) ++st.spacing_pairs;
      if (lex.most_frequent(p.orig) == p.norm) ++st.most_frequent_correct;
    }
  return st;
}

std::string format_stats(const CorpusStats& st) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "sentences:            " << st.sentences << '\n'
      << "token pairs:          " << st.pairs << '\n'
      << "identity pairs:       " << st.identity_percent() << " %\n"
      << "spacing pairs:        " << st.spacing_percent() << " %\n"
      << "most-frequent correct: " << st.most_frequent_percent() << " %\n";
  return out.str();
}

}  // namespace histnorm
