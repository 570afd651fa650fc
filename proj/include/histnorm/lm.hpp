#pragma once

// Word-level n-gram language model with interpolated Witten-Bell smoothing,
// stored in backoff form so it round-trips through ARPA files, plus the
// scorer interface used by the re-ranker.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace histnorm {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";

using WordId = int32_t;

struct NgramOptions {
  int order = 3;
  bool unk_hapax = true;  // map words seen once to <unk>
};

class NgramModel {
 public:
  // Word history, oldest first, at most order-1 ids.
  struct State {
    std::vector<WordId> context;
    bool operator==(const State&) const = default;
  };

  static NgramModel train(const std::vector<std::vector<std::string>>& sentences, const NgramOptions& opts = {});
  static NgramModel load_arpa(std::istream& in);
  void save_arpa(std::ostream& out) const;

  State initial_state() const;
  // log p(word | state) and the successor state.
  std::pair<double, State> extend(const State& state, std::string_view word) const;
  double end_logprob(const State& state) const;
  double logprob_sequence(const std::vector<std::string>& words) const;

  // Natural-log probability of `word` after `context` (oldest first).
  double logprob(WordId word, std::span<const WordId> context) const;

  WordId id(std::string_view word) const;  // <unk> for unknown words
  const std::string& word(WordId id) const { return vocab_[static_cast<std::size_t>(id)]; }
  std::size_t vocab_size() const { return vocab_.size(); }
  // Every id that can be predicted (the vocabulary without <s>).
  std::vector<WordId> predictable() const;
  WordId start_id() const { return start_; }
  WordId end_id() const { return end_; }
  WordId unk_id() const { return unk_; }
  int order() const { return order_; }

  // Training count of an n-gram (0 after loading from ARPA).
  uint64_t count(const std::vector<std::string>& ngram) const;
  std::size_t ngram_count(int n) const { return tables_.at(static_cast<std::size_t>(n - 1)).size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<WordId>& key) const noexcept;
  };
  struct Entry {
    double logprob = 0.0;  // natural log
    double backoff = 0.0;  // natural log
  };
  using Table = std::unordered_map<std::vector<WordId>, Entry, KeyHash>;

  WordId intern(const std::string& w);
  const Entry* find(std::span<const WordId> ngram) const;

  int order_ = 3;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, WordId> ids_;
  WordId start_ = -1, end_ = -1, unk_ = -1;
  std::vector<Table> tables_;  // tables_[n-1] holds n-grams
  std::unordered_map<std::vector<WordId>, uint64_t, KeyHash> counts_;
};

inline NgramModel train_ngram(const std::vector<std::vector<std::string>>& sentences, int order) {
  return NgramModel::train(sentences, NgramOptions{order, true});
}

// Words the language model sees for a sequence of encoded target tokens.
std::vector<std::string> lm_words(const std::vector<std::string>& norm_tokens);

// Scores complete plain-text sentences (natural-log probabilities).
class SentenceScorer {
 public:
  virtual ~SentenceScorer() = default;
  virtual std::vector<double> score(const std::vector<std::string>& texts) = 0;
};

// Whitespace-tokenizes each text and scores it with an n-gram model.
class NgramScorer final : public SentenceScorer {
 public:
  explicit NgramScorer(const NgramModel& model) : model_(model) {}
  std::vector<double> score(const std::vector<std::string>& texts) override;

 private:
  const NgramModel& model_;
};

}  // namespace histnorm
