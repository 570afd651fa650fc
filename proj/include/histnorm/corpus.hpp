#pragma once

// Token-aligned parallel corpora: the 1:1 pair encoding, hunk alignment,
// corpus I/O, sentence filtering and train/dev/test splitting.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace histnorm {

// One aligned (historic, gold normalized) token pair.
struct TokenPair {
  std::string orig;
  std::string norm;

  bool operator==(const TokenPair&) const = default;
};

// Throws EncodingViolation unless both sides satisfy the pair invariants.
void validate_pair(const TokenPair& pair);

struct AlignedSentence {
  std::vector<TokenPair> pairs;
  std::string doc_id;
  std::string group_key;  // work identifier; defaults to doc_id
  int year = 0;
  bool excluded = false;
  std::optional<std::string> exclusion_reason;

  std::vector<std::string> orig_tokens() const;
  std::vector<std::string> norm_tokens() const;
};

// A span of the source text whose token counts may differ between sides.
struct Hunk {
  std::vector<std::string> orig_tokens;
  std::vector<std::string> norm_tokens;
};

enum class Split { kTrain, kDev, kTest };
std::string_view split_name(Split s);

struct SplitAssignment {
  std::string doc_id;
  Split split = Split::kTrain;
  std::string group_key;
  int year_bucket = 0;
};

struct DocumentInfo {
  std::string doc_id;
  std::string group_key;
  int year = 0;
  std::size_t token_count = 0;
};

enum class CorpusFormat { kAlignedTsv, kHunkJsonl };
CorpusFormat parse_corpus_format(std::string_view name);

// Replaces long s with s and vowel + combining small e with the umlaut,
// then applies NFC.
std::string transliterate(std::string_view s);

// Distributes the joined target string over the historic tokens using a
// character-level edit script, encoding in-token splits with U+2581 and
// joins with a trailing U+2591.
std::vector<TokenPair> align_hunk(const Hunk& hunk);

// Inverse of the spacing encoding: the plain target text.
std::string render_norm(const std::vector<std::string>& tokens);

std::vector<AlignedSentence> parse_corpus(std::istream& in, CorpusFormat format);
std::vector<AlignedSentence> parse_corpus(const std::filesystem::path& path, CorpusFormat format);

// Writes sentences in aligned_tsv form; documents are introduced by a
// header whenever doc_id changes.
void write_aligned_tsv(std::ostream& out, const std::vector<AlignedSentence>& sents);

std::vector<AlignedSentence> filter_sentences(const std::vector<AlignedSentence>& sents);

// Per-document metadata in first-appearance order.
std::vector<DocumentInfo> collect_documents(const std::vector<AlignedSentence>& sents);

struct SplitRatios {
  double train = 0.6;
  double dev = 0.2;
  double test = 0.2;

  double operator[](Split s) const;
};

std::vector<SplitAssignment> build_splits(const std::vector<DocumentInfo>& docs,
                                          const SplitRatios& ratios, uint64_t seed);

int decade_bucket(int year);

// Known values for the optional exclusion-flag column.
bool is_known_exclusion_flag(std::string_view flag);

}  // namespace histnorm
