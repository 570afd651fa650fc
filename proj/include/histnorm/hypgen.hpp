#pragma once

// Type-level normalization hypotheses: a weighted character edit-rule model
// learned from the parallel corpus, and the common generator interface that
// external (e.g. neural) generators plug into.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "histnorm/corpus.hpp"

namespace histnorm {

struct Hypothesis {
  std::string norm;
  double logprob = 0.0;  // natural log

  bool operator==(const Hypothesis&) const = default;
};

// Sorts by descending logprob (ties: smaller string first) and shifts the
// log-probabilities so their exponentials sum to 1. An empty list becomes
// the identity hypothesis for `source`.
void renormalize(std::vector<Hypothesis>& hyps, std::string_view source);

// Context markers outside the Unicode range.
inline constexpr char32_t kWordBoundary = 0x110000;
inline constexpr char32_t kAnyContext = 0x110001;

// One observed character rewrite: `src` (a single character) becomes `tgt`
// (zero or more characters) between `left` and `right`. Insertions are
// folded into the target of the neighbouring source character.
struct EditRule {
  std::string src;
  std::string tgt;
  char32_t left = kWordBoundary;
  char32_t right = kWordBoundary;
  uint64_t count = 0;

  bool operator==(const EditRule&) const = default;
};

class RuleModel {
 public:
  static RuleModel learn(const std::vector<AlignedSentence>& train);
  static RuleModel from_rules(std::vector<EditRule> rules);

  // Interpolated p(tgt | src, left, right) over every target reachable in
  // this context, the implicit copy included. Entries sum to 1.
  std::vector<std::pair<std::string, double>> distribution(char32_t src, char32_t left,
                                                           char32_t right) const;
  double probability(std::string_view tgt, char32_t src, char32_t left, char32_t right) const;

  // Raw rule count; `left`/`right` may be kAnyContext to marginalize.
  uint64_t count(std::string_view src, std::string_view tgt, char32_t left, char32_t right) const;

  // Full-context rules, sorted.
  const std::vector<EditRule>& rules() const { return rules_; }

  const std::optional<std::set<std::string>>& target_vocab() const { return target_vocab_; }
  void set_target_vocab(std::optional<std::set<std::string>> vocab) { target_vocab_ = std::move(vocab); }

  // TSV src<TAB>tgt<TAB>left<TAB>right<TAB>count.
  void save(std::ostream& out) const;
  static RuleModel load(std::istream& in);

 private:
  using Key = std::tuple<char32_t, char32_t, char32_t>;  // src, left, right
  struct Table {
    std::map<std::string, uint64_t> tgt_counts;
    uint64_t total = 0;
  };

  void index();
  const Table* table(char32_t src, char32_t left, char32_t right) const;

  std::vector<EditRule> rules_;
  std::map<Key, Table> tables_;  // all four backoff levels
  std::optional<std::set<std::string>> target_vocab_;
};

inline RuleModel learn_rules(const std::vector<AlignedSentence>& train) { return RuleModel::learn(train); }

// Top-k distinct hypotheses for `word` by beam search over the rule model.
std::vector<Hypothesis> generate_rules(const RuleModel& model, std::string_view word, int k);

// Per-character targets of `orig` implied by one edit script to `norm`.
std::vector<std::u32string> char_targets(std::u32string_view orig, std::u32string_view norm);

std::string context_to_string(char32_t ctx);
char32_t context_from_string(std::string_view s);

class HypothesisGenerator {
 public:
  virtual ~HypothesisGenerator() = default;
  // One renormalized, non-empty list of at most k hypotheses per type, in order.
  virtual std::vector<std::vector<Hypothesis>> generate(const std::vector<std::string>& types, int k) = 0;
};

class RuleGenerator final : public HypothesisGenerator {
 public:
  explicit RuleGenerator(const RuleModel& model) : model_(model) {}
  std::vector<std::vector<Hypothesis>> generate(const std::vector<std::string>& types, int k) override;
  // Same results without threads; kept as the reference path.
  std::vector<std::vector<Hypothesis>> generate_serial(const std::vector<std::string>& types, int k) const;

 private:
  const RuleModel& model_;
};

// Serves fixed hypothesis lists and falls back to another generator.
class CachedGenerator final : public HypothesisGenerator {
 public:
  explicit CachedGenerator(HypothesisGenerator& inner) : inner_(inner) {}
  std::vector<std::vector<Hypothesis>> generate(const std::vector<std::string>& types, int k) override;
  // Fills the cache for all uncached types with a single inner call.
  void prefetch(const std::vector<std::string>& types, int k);

 private:
  HypothesisGenerator& inner_;
  std::map<std::pair<std::string, int>, std::vector<Hypothesis>> cache_;
};

}  // namespace histnorm
