#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "histnorm/corpus.hpp"

namespace histnorm {

// Observed historic -> normalized type frequencies from a training split.
// Keys are case-sensitive; the norm side keeps its pseudo-characters.
class SubstitutionLexicon {
 public:
  using Row = std::map<std::string, uint64_t, std::less<>>;

  static SubstitutionLexicon build(const std::vector<AlignedSentence>& train);

  void add(std::string_view orig, std::string_view norm, uint64_t count = 1);
  // Drops (orig, norm) entries seen fewer than min_count times.
  SubstitutionLexicon pruned(uint64_t min_count) const;

  bool contains(std::string_view orig) const;
  const Row& row(std::string_view orig) const;  // throws UnknownType
  uint64_t total(std::string_view orig) const;  // 0 when absent

  std::map<std::string, double> p_lex(std::string_view orig) const;
  // Highest count; ties go to the smallest string by code point.
  const std::string& most_frequent(std::string_view orig) const;

  std::size_t type_count() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  std::set<std::string> orig_types() const;
  const std::map<std::string, Row, std::less<>>& counts() const { return counts_; }

  // TSV orig<TAB>norm<TAB>count, sorted by orig, then count descending.
  void save(std::ostream& out) const;
  static SubstitutionLexicon load(std::istream& in);

  bool operator==(const SubstitutionLexicon& other) const = default;

 private:
  std::map<std::string, Row, std::less<>> counts_;
  std::map<std::string, uint64_t, std::less<>> totals_;
};

inline SubstitutionLexicon build_lexicon(const std::vector<AlignedSentence>& train) {
  return SubstitutionLexicon::build(train);
}
inline std::map<std::string, double> p_lex(const SubstitutionLexicon& lex, std::string_view w) {
  return lex.p_lex(w);
}
inline const std::string& most_frequent(const SubstitutionLexicon& lex, std::string_view w) {
  return lex.most_frequent(w);
}
inline bool is_oov(const SubstitutionLexicon& lex, std::string_view w) { return !lex.contains(w); }

}  // namespace histnorm
