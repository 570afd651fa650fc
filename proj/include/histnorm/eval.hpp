#pragma once

// Word accuracy, relative error, error categorization, baselines and
// generator recall over token-aligned corpora.

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "histnorm/corpus.hpp"
#include "histnorm/lexicon.hpp"
#include "histnorm/reranker.hpp"

namespace histnorm {

// One prediction list per gold sentence, parallel to its pairs.
using Predictions = std::vector<std::vector<std::string>>;

enum class ErrorCategory { kSpacing = 0, kCasing = 1, kCharacter = 2 };
inline constexpr std::array<ErrorCategory, 3> kErrorCategories = {ErrorCategory::kSpacing, ErrorCategory::kCasing,
                                                                  ErrorCategory::kCharacter};
std::string_view category_name(ErrorCategory c);

struct ErrorCategories {
  bool spacing = false;
  bool casing = false;
  bool character = false;

  bool empty() const { return !spacing && !casing && !character; }
  bool has(ErrorCategory c) const;
  bool operator==(const ErrorCategories&) const = default;
};

// Labels the operations of one optimal edit script from pred to gold.
ErrorCategories categorize_error(std::string_view pred, std::string_view gold);

// Raw tallies; accuracies are derived from these. Reduction is associative.
struct EvalTally {
  std::size_t tokens = 0, oov = 0;
  std::size_t correct = 0, correct_oov = 0;
  std::size_t identity_correct = 0, identity_correct_oov = 0;
  // [category][0 = invocab, 1 = oov]
  std::array<std::array<std::size_t, 2>, 3> errors{};

  EvalTally& operator+=(const EvalTally& o);
  bool operator==(const EvalTally&) const = default;
};

struct EvalReport {
  double word_acc_overall = 0, word_acc_invocab = 0, word_acc_oov = 0;
  // Relative to the identity baseline on the same gold data; NaN when the
  // identity baseline makes no errors on that subset.
  double rel_error_overall = 0, rel_error_oov = 0;
  std::size_t n_tokens = 0, n_oov = 0;
  std::size_t n_errors = 0, n_errors_oov = 0;
  std::size_t identity_errors = 0;
  std::array<std::array<std::size_t, 2>, 3> error_counts{};

  std::size_t error_count(ErrorCategory c, bool oov) const {
    return error_counts[static_cast<std::size_t>(c)][oov ? 1 : 0];
  }
  nlohmann::json to_json() const;
};

EvalReport make_report(const EvalTally& tally);

// Accuracy over non-punctuation tokens, partitioned by whether the historic
// form is in the training vocabulary. Runs across sentences with OpenMP.
EvalReport word_accuracy(const Predictions& preds, const std::vector<AlignedSentence>& gold,
                         const std::set<std::string>& train_vocab);
EvalTally tally_serial(const Predictions& preds, const std::vector<AlignedSentence>& gold,
                       const std::set<std::string>& train_vocab);
EvalTally tally_parallel(const Predictions& preds, const std::vector<AlignedSentence>& gold,
                         const std::set<std::string>& train_vocab);

// 100 * (1 - system/100) / (1 - identity/100); throws DivisionByZero when
// the identity accuracy is 100.
double relative_error(double word_acc_system, double word_acc_identity);

Predictions identity_baseline(const std::vector<AlignedSentence>& corpus);
Predictions lexicon_baseline(const std::vector<AlignedSentence>& corpus, const SubstitutionLexicon& lex);
// Most frequent normalization within the evaluated corpus itself: the
// ceiling for any context-free type mapping.
Predictions best_theoretical_type(const std::vector<AlignedSentence>& corpus);

// Percentage of non-punctuation tokens whose gold norm is among the first k
// hypotheses of their set.
double recall_at_k(const std::vector<std::vector<HypothesisSet>>& sets, const std::vector<AlignedSentence>& gold,
                   int k);

struct NamedReport {
  std::string system;
  EvalReport report;
};
// Accuracy table and error-category table in fixed-width text.
std::string format_report_table(const std::vector<NamedReport>& rows);

}  // namespace histnorm
