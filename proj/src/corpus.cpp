#include "histnorm/corpus.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "histnorm/errors.hpp"
#include "histnorm/levenshtein.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

void validate_pair(const TokenPair& pair) {
  validate_orig(pair.orig);
  validate_norm(pair.norm);
}

std::vector<std::string> AlignedSentence::orig_tokens() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.orig);
  return out;
}

std::vector<std::string> AlignedSentence::norm_tokens() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.norm);
  return out;
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "aligned_tsv") return CorpusFormat::kAlignedTsv;
  if (name == "hunk_jsonl") return CorpusFormat::kHunkJsonl;
  throw InvalidConfig("unknown corpus format \"" + std::string(name) + "\"");
}

// ---------------------------------------------------------------------------
// Transliteration

namespace {

char32_t umlaut_for(char32_t base) {
  switch (base) {
    case U'a': return U'ä';
    case U'o': return U'ö';
    case U'u': return U'ü';
    case U'A': return U'Ä';
    case U'O': return U'Ö';
    case U'U': return U'Ü';
    default: return 0;
  }
}

constexpr char32_t kLongS = U'ſ';
constexpr char32_t kCombiningSmallE = 0x0364;

std::string nfc(const std::string& s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(s);
  if (normalizer->isNormalized(src, status) && U_SUCCESS(status)) return s;
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = normalizer->normalize(src, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

}  // namespace

std::string transliterate(std::string_view s) {
  const std::u32string in = to_codepoints(s);
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char32_t c = in[i];
    if (c == kLongS) {
      out.push_back(U's');
    } else if (i + 1 < in.size() && in[i + 1] == kCombiningSmallE && umlaut_for(c) != 0) {
      out.push_back(umlaut_for(c));
      ++i;
    } else {
      out.push_back(c);
    }
  }
  return nfc(to_utf8(out));
}

// ---------------------------------------------------------------------------
// Spacing encoding

namespace {

// Boundary between two consecutive pieces of the joined target string.
// A space cut drops the space at `end`; a join cut has start == end.
struct Cut {
  std::size_t end;
  std::size_t start;
  bool is_join() const { return start == end; }
};

// Moves a join cut onto an adjacent space so no piece begins or ends with one.
Cut settle(Cut c, const std::u32string& target, bool prefer_left) {
  if (!c.is_join()) return c;
  const std::size_t q = c.end;
  const bool left_space = q > 0 && target[q - 1] == U' ';
  const bool right_space = q < target.size() && target[q] == U' ';
  if (left_space && (prefer_left || !right_space)) return {q - 1, q};
  if (right_space) return {q, q + 1};
  return c;
}

}  // namespace

std::vector<TokenPair> align_hunk(const Hunk& hunk) {
  if (hunk.orig_tokens.empty() || hunk.norm_tokens.empty())
    throw AlignmentDegenerate("hunk has an empty side");
  for (const auto& t : hunk.orig_tokens) {
    if (t.empty()) throw AlignmentDegenerate("empty historic token in hunk");
    validate_orig(t);
    if (t.find(' ') != std::string::npos) throw EncodingViolation("space inside token \"" + t + "\"");
  }
  for (const auto& t : hunk.norm_tokens) {
    if (t.empty()) throw AlignmentDegenerate("empty target token in hunk");
    if (contains_pseudo_char(t))
      throw EncodingViolation("pseudo-character in hunk target token \"" + t + "\"");
    if (t.find(' ') != std::string::npos) throw EncodingViolation("space inside token \"" + t + "\"");
  }

  const std::string joined_norm = join(hunk.norm_tokens, " ");
  const std::u32string source = to_codepoints(join(hunk.orig_tokens, " "));
  const std::u32string target = to_codepoints(joined_norm);
  const std::size_t n_tokens = hunk.orig_tokens.size();
  if (n_tokens == 1) {
    std::u32string piece = target;
    std::replace(piece.begin(), piece.end(), U' ', kSplitChar);
    return {TokenPair{hunk.orig_tokens[0], to_utf8(piece)}};
  }

  // Locate each historic token boundary in the target string.
  std::vector<Cut> cuts;
  cuts.reserve(n_tokens - 1);
  std::size_t consumed = 0;
  for (const EditOp& op : edit_script(source, target)) {
    const bool boundary = op.kind != EditKind::kInsert && source[op.src] == U' ';
    if (boundary) {
      if (op.kind == EditKind::kMatch) {
        cuts.push_back({op.tgt, op.tgt + 1});
      } else if (op.kind == EditKind::kSubstitute) {
        cuts.push_back({op.tgt, op.tgt});
      } else {
        cuts.push_back({consumed, consumed});
      }
    }
    if (op.kind != EditKind::kDelete) consumed = op.tgt + 1;
  }
  for (auto& c : cuts) c = settle(c, target, false);

  // Every piece must keep at least one character.
  const std::size_t len = target.size();
  std::size_t prev_start = 0;
  for (auto& c : cuts) {
    if (c.end <= prev_start) c = settle({prev_start + 1, prev_start + 1}, target, false);
    prev_start = c.start;
  }
  std::size_t next_end = len;
  for (std::size_t k = cuts.size(); k-- > 0;) {
    if (cuts[k].start >= next_end) cuts[k] = settle({next_end - 1, next_end - 1}, target, true);
    next_end = cuts[k].end;
  }

  std::vector<TokenPair> out;
  out.reserve(n_tokens);
  std::size_t start = 0;
  for (std::size_t k = 0; k < n_tokens; ++k) {
    const std::size_t end = k + 1 < n_tokens ? cuts[k].end : len;
    if (end <= start || end > len)
      throw AlignmentDegenerate("target \"" + joined_norm + "\" too short for " +
                                std::to_string(n_tokens) + " historic tokens");
    std::u32string piece = target.substr(start, end - start);
    std::replace(piece.begin(), piece.end(), U' ', kSplitChar);
    if (k + 1 < n_tokens && cuts[k].is_join()) piece.push_back(kJoinChar);
    out.push_back({hunk.orig_tokens[k], to_utf8(piece)});
    if (k + 1 < n_tokens) start = cuts[k].start;
  }
  for (const auto& p : out) validate_norm(p.norm);
  if (render_norm([&] {
        std::vector<std::string> norms;
        for (const auto& p : out) norms.push_back(p.norm);
        return norms;
      }()) != joined_norm)
    throw std::logic_error("hunk alignment does not reproduce \"" + joined_norm + "\"");
  return out;
}

std::string render_norm(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    validate_norm(tokens[i]);
    std::string_view tok = tokens[i];
    const bool joins = tok.ends_with(kJoinMark);
    if (joins) tok.remove_suffix(kJoinMark.size());
    std::size_t pos = 0;
    while (true) {
      const auto hit = tok.find(kSplitMark, pos);
      out.append(tok.substr(pos, hit == std::string_view::npos ? std::string_view::npos : hit - pos));
      if (hit == std::string_view::npos) break;
      out.push_back(' ');
      pos = hit + kSplitMark.size();
    }
    if (i + 1 < tokens.size() && !joins) out.push_back(' ');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus I/O

bool is_known_exclusion_flag(std::string_view flag) {
  static const std::set<std::string_view> kFlags = {
      "non_sentence",    "foreign",        "print_error",         "ocr_error",
      "transcription_error", "unsuitable", "tokenizer_error", "extinct_lexeme",
      "hyphenated_compound", "poetry"};
  return kFlags.contains(flag);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int parse_year(std::string_view text, std::size_t line_no) {
  int year = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(line_no, "invalid year \"" + std::string(text) + "\"");
  return year;
}

void add_flags(AlignedSentence& sent, const std::vector<std::string>& flags, std::size_t line_no) {
  for (const auto& f : flags) {
    if (!is_known_exclusion_flag(f)) throw ParseError(line_no, "unknown exclusion flag \"" + f + "\"");
    sent.excluded = true;
    if (!sent.exclusion_reason) {
      sent.exclusion_reason = f;
    } else if ((";" + *sent.exclusion_reason + ";").find(";" + f + ";") == std::string::npos) {
      *sent.exclusion_reason += ";" + f;
    }
  }
}

// Rethrows pair-level encoding problems with the offending line attached.
template <typename F>
auto at_line(std::size_t line_no, F&& f) {
  try {
    return f();
  } catch (const EncodingViolation& e) {
    throw EncodingViolation("line " + std::to_string(line_no) + ": " + e.what());
  } catch (const AlignmentDegenerate& e) {
    throw ParseError(line_no, e.what());
  }
}

std::vector<AlignedSentence> parse_tsv(std::istream& in) {
  std::vector<AlignedSentence> out;
  AlignedSentence meta;
  bool have_doc = false;
  AlignedSentence cur;
  auto flush = [&] {
    if (!cur.pairs.empty()) out.push_back(std::move(cur));
    cur = AlignedSentence{};
    cur.doc_id = meta.doc_id;
    cur.group_key = meta.group_key;
    cur.year = meta.year;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.starts_with("#doc ") || line == "#doc") {
      const auto fields = split_whitespace(line);
      if (fields.size() < 2 || fields.size() > 4) throw ParseError(line_no, "malformed #doc header");
      flush();
      meta.doc_id = fields[1];
      meta.group_key = fields.size() > 2 ? fields[2] : fields[1];
      meta.year = fields.size() > 3 ? parse_year(fields[3], line_no) : 0;
      cur.doc_id = meta.doc_id;
      cur.group_key = meta.group_key;
      cur.year = meta.year;
      have_doc = true;
      continue;
    }
    const auto cols = split_on(line, '\t');
    if (cols.size() < 2 || cols.size() > 3)
      throw ParseError(line_no, "expected 2 or 3 tab-separated columns, got " + std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty()) throw ParseError(line_no, "empty token");
    if (cols.size() == 3) {
      std::vector<std::string> flags;
      for (const auto& f : split_on(cols[2], ';'))
        if (auto t = trim(f); !t.empty()) flags.push_back(t);
      add_flags(cur, flags, line_no);
    }
    if (!have_doc) throw ParseError(line_no, "token line before any #doc header");
    TokenPair pair{transliterate(cols[0]), cols[1]};
    at_line(line_no, [&] { validate_pair(pair); });
    cur.pairs.push_back(std::move(pair));
  }
  flush();
  return out;
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key, std::size_t line_no,
                                     bool required) {
  if (!j.contains(key)) {
    if (required) throw ParseError(line_no, std::string("missing \"") + key + "\"");
    return {};
  }
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ParseError(line_no, std::string("\"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw ParseError(line_no, std::string("\"") + key + "\" must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<AlignedSentence> parse_jsonl(std::istream& in) {
  std::vector<AlignedSentence> out;
  AlignedSentence cur;
  auto flush = [&] {
    if (!cur.pairs.empty()) out.push_back(std::move(cur));
    cur = AlignedSentence{};
  };

  struct DocMeta {
    std::string group;
    int year;
  };
  std::map<std::string, DocMeta> doc_meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
    if (j.value("sent_break", false)) {
      flush();
      continue;
    }
    if (!j.contains("doc") || !j["doc"].is_string()) throw ParseError(line_no, "missing \"doc\"");
    const auto doc = j["doc"].get<std::string>();
    // Year and group may be given once per document.
    auto& meta = doc_meta.try_emplace(doc, DocMeta{doc, 0}).first->second;
    if (j.contains("year")) {
      if (!j["year"].is_number_integer()) throw ParseError(line_no, "\"year\" must be an integer");
      meta.year = j["year"].get<int>();
    }
    if (j.contains("group")) {
      if (!j["group"].is_string()) throw ParseError(line_no, "\"group\" must be a string");
      meta.group = j["group"].get<std::string>();
    }
    const std::string& group = meta.group;
    const int year = meta.year;
    if (!cur.pairs.empty() && cur.doc_id != doc) flush();
    cur.doc_id = doc;
    cur.group_key = group;
    cur.year = year;

    Hunk hunk{string_list(j, "orig", line_no, true), string_list(j, "norm", line_no, true)};
    add_flags(cur, string_list(j, "flags", line_no, false), line_no);
    if (hunk.orig_tokens.empty() || hunk.norm_tokens.empty())
      throw ParseError(line_no, "hunk sides must be non-empty");
    for (auto& t : hunk.orig_tokens) {
      if (t.empty()) throw ParseError(line_no, "empty token");
      t = transliterate(t);
    }
    auto pairs = at_line(line_no, [&] { return align_hunk(hunk); });
    for (auto& p : pairs) cur.pairs.push_back(std::move(p));
  }
  flush();
  return out;
}

}  // namespace

std::vector<AlignedSentence> parse_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::kAlignedTsv ? parse_tsv(in) : parse_jsonl(in);
}

std::vector<AlignedSentence> parse_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_corpus(in, format);
}

void write_aligned_tsv(std::ostream& out, const std::vector<AlignedSentence>& sents) {
  const std::string* last_doc = nullptr;
  for (const auto& s : sents) {
    if (!last_doc || *last_doc != s.doc_id) {
      out << "#doc " << (s.doc_id.empty() ? "_" : s.doc_id) << ' '
          << (s.group_key.empty() ? (s.doc_id.empty() ? "_" : s.doc_id) : s.group_key) << ' ' << s.year
          << '\n';
      last_doc = &s.doc_id;
    }
    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
      out << s.pairs[i].orig << '\t' << s.pairs[i].norm;
      if (i == 0 && s.excluded) out << '\t' << s.exclusion_reason.value_or("unsuitable");
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<AlignedSentence> filter_sentences(const std::vector<AlignedSentence>& sents) {
  std::vector<AlignedSentence> out;
  out.reserve(sents.size());
  for (const auto& s : sents)
    if (!s.excluded) out.push_back(s);
  return out;
}

std::vector<DocumentInfo> collect_documents(const std::vector<AlignedSentence>& sents) {
  std::vector<DocumentInfo> docs;
  std::map<std::string, std::size_t> index;
  for (const auto& s : sents) {
    auto [it, inserted] = index.try_emplace(s.doc_id, docs.size());
    if (inserted)
      docs.push_back({s.doc_id, s.group_key.empty() ? s.doc_id : s.group_key, s.year, 0});
    docs[it->second].token_count += s.pairs.size();
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Splitting

double SplitRatios::operator[](Split s) const {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kDev: return dev;
    case Split::kTest: return test;
  }
  return 0.0;
}

int decade_bucket(int year) {
  return year >= 0 ? (year / 10) * 10 : -(((-year) + 9) / 10) * 10;
}

std::vector<SplitAssignment> build_splits(const std::vector<DocumentInfo>& docs,
                                          const SplitRatios& ratios, uint64_t seed) {
  constexpr std::array<Split, 3> kSplits = {Split::kTrain, Split::kDev, Split::kTest};
  for (Split s : kSplits)
    if (!(ratios[s] > 0.0)) throw InvalidConfig("split ratios must be positive");
  if (std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-6)
    throw InvalidConfig("split ratios must sum to 1");
  for (const auto& d : docs)
    if (d.token_count == 0) throw InvalidConfig("document " + d.doc_id + " has no tokens");

  struct Group {
    std::string key;
    std::size_t tokens = 0;
    int year = 0;
    bool seen = false;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& d : docs) {
    const std::string& key = d.group_key.empty() ? d.doc_id : d.group_key;
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) groups.push_back({key, 0, d.year, false});
    auto& g = groups[it->second];
    g.tokens += d.token_count;
    g.year = std::min(g.year, d.year);
  }
  if (groups.empty()) throw InfeasibleSplit("no documents to split");
  if (groups.size() > 1 && groups.size() < kSplits.size())
    throw InfeasibleSplit(std::to_string(groups.size()) + " groups cannot fill " +
                          std::to_string(kSplits.size()) + " splits");

  // Decade strata in ascending order, groups shuffled within each stratum.
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < groups.size(); ++i) strata[decade_bucket(groups[i].year)].push_back(i);
  std::mt19937_64 rng(seed);
  for (auto& [bucket, members] : strata)
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng() % i]);

  std::map<std::string, Split> group_split;
  std::array<double, 3> global{};
  double global_total = 0.0;
  for (const auto& [bucket, members] : strata) {
    std::array<double, 3> local{};
    double local_total = 0.0;
    for (std::size_t gi : members) {
      const double size = static_cast<double>(groups[gi].tokens);
      std::size_t best = 0;
      double best_deficit = -1e300;
      for (std::size_t s = 0; s < kSplits.size(); ++s) {
        const double r = ratios[kSplits[s]];
        const double deficit = (r * (local_total + size) - local[s]) + (r * (global_total + size) - global[s]);
        if (deficit > best_deficit) {
          best_deficit = deficit;
          best = s;
        }
      }
      local[best] += size;
      global[best] += size;
      local_total += size;
      global_total += size;
      group_split[groups[gi].key] = kSplits[best];
    }
  }

  std::vector<SplitAssignment> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    const std::string& key = d.group_key.empty() ? d.doc_id : d.group_key;
    const auto& g = groups[index.at(key)];
    out.push_back({d.doc_id, group_split.at(key), key, decade_bucket(g.year)});
  }
  return out;
}

}  // namespace histnorm
