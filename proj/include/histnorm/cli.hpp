#pragma once

// Subcommand implementations behind the histnorm executable. Each returns the
// process exit code: 0 success, 2 input or configuration error, 3 failure of
// an external generator or scorer process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "histnorm/corpus.hpp"
#include "histnorm/reranker.hpp"

namespace histnorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitExternal = 3;

// File names inside an artifact directory.
inline constexpr const char* kLexiconFile = "lexicon.tsv";
inline constexpr const char* kRulesFile = "rules.tsv";
inline constexpr const char* kLanguageModelFile = "lm.arpa";
inline constexpr const char* kVocabFile = "vocab.txt";

struct SplitOptions {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::kAlignedTsv;
  SplitRatios ratios;
  uint64_t seed = 1;
  std::optional<std::filesystem::path> output;       // assignment TSV; stdout when unset
  std::optional<std::filesystem::path> corpora_dir;  // writes train/dev/test aligned_tsv files
};

struct TrainOptions {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::kAlignedTsv;
  std::filesystem::path out_dir;
  int order = 3;
  uint64_t min_count = 1;
  bool unk_hapax = true;
};

enum class InputFormat { kAlignedTsv, kHunkJsonl, kTokens };
enum class OutputFormat { kAlignedTsv, kText };

struct NormalizeOptions {
  std::filesystem::path input;
  InputFormat format = InputFormat::kAlignedTsv;
  std::filesystem::path artifacts;
  RerankConfig rerank;
  std::optional<std::string> scorer_cmd;
  std::optional<std::string> generator_cmd;
  OutputFormat output_format = OutputFormat::kAlignedTsv;
  std::optional<std::filesystem::path> output;
  int timeout_ms = 30000;
};

struct EvaluateOptions {
  std::filesystem::path predictions;
  std::filesystem::path gold;
  CorpusFormat format = CorpusFormat::kAlignedTsv;
  std::filesystem::path train_vocab;
  std::string system_name = "System";
  bool baselines = false;
  std::optional<std::filesystem::path> lexicon;    // needed for the Lexicon baseline
  int recall_at = 0;                               // 0 disables
  std::optional<std::filesystem::path> artifacts;  // rule model for recall
  std::optional<std::string> generator_cmd;
  std::optional<std::filesystem::path> json_output;
  int timeout_ms = 30000;
};

struct EncodeOptions {
  std::optional<std::string> orig;    // whitespace-separated historic tokens
  std::optional<std::string> norm;    // whitespace-separated target tokens
  std::optional<std::string> render;  // whitespace-separated encoded tokens
};

InputFormat parse_input_format(const std::string& name);
OutputFormat parse_output_format(const std::string& name);

int cmd_split(const SplitOptions& opts, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int cmd_normalize(const NormalizeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_encode(const EncodeOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace histnorm::cli
