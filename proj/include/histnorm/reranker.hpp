#pragma once

// Hybrid decoding: per-token hypothesis sets from the lexicon (in-vocabulary
// types) or a generator (OOV types), re-ranked jointly with a sentence-level
// language model by beam search over the hypothesis lattice.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "histnorm/hypgen.hpp"
#include "histnorm/lexicon.hpp"
#include "histnorm/lm.hpp"

namespace histnorm {

enum class RerankMode { kHybrid, kTypeOnly, kFlatPrior };
RerankMode parse_rerank_mode(std::string_view name);
std::string_view rerank_mode_name(RerankMode mode);

struct RerankConfig {
  double alpha = 0.5;  // generator probabilities are raised to 1/alpha
  double beta = 0.5;   // lexicon probabilities are raised to 1/beta
  int beams = 4;
  int k = 4;
  RerankMode mode = RerankMode::kHybrid;

  void validate() const;  // throws InvalidConfig
};

enum class HypothesisOrigin { kLexicon, kGenerator, kPassthrough };

struct HypothesisSet {
  std::string source;
  std::vector<Hypothesis> items;  // descending logprob, probabilities sum to 1
  HypothesisOrigin origin = HypothesisOrigin::kPassthrough;
};

// Raises the distribution to the power `exponent`, renormalizes, and keeps
// the order of the input distribution.
HypothesisSet sharpen(std::string source, std::vector<Hypothesis> dist, double exponent, HypothesisOrigin origin);

using GeneratedHypotheses = std::map<std::string, std::vector<Hypothesis>, std::less<>>;

// Builds sets given generator output already computed for the OOV types.
std::vector<HypothesisSet> assemble_hypothesis_sets(const std::vector<std::string>& sentence,
                                                    const SubstitutionLexicon& lex,
                                                    const GeneratedHypotheses& generated, const RerankConfig& cfg);

std::vector<HypothesisSet> build_hypothesis_sets(const std::vector<std::string>& sentence,
                                                 const SubstitutionLexicon& lex, HypothesisGenerator& gen,
                                                 const RerankConfig& cfg);

// Unique OOV, non-punctuation types of the sentences, in first-seen order.
std::vector<std::string> oov_types(const std::vector<std::vector<std::string>>& sentences,
                                   const SubstitutionLexicon& lex);

// The language model used for re-ranking: the built-in n-gram model (scored
// incrementally) or an external sentence scorer (rendered prefixes, batched
// per step). With neither set only type_only mode is usable.
struct LanguageModel {
  const NgramModel* ngram = nullptr;
  SentenceScorer* external = nullptr;

  bool available() const { return ngram != nullptr || external != nullptr; }
};

std::vector<std::string> rerank(const std::vector<HypothesisSet>& sets, const LanguageModel& lm,
                                const RerankConfig& cfg);

// Scores every path through the lattice with the objective used by rerank().
std::vector<std::string> exhaustive_oracle(const std::vector<HypothesisSet>& sets, const LanguageModel& lm,
                                           const RerankConfig& cfg);

inline constexpr double kMaxOracleLattice = 1e6;

}  // namespace histnorm
