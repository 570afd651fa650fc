#include "histnorm/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "histnorm/errors.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

SubstitutionLexicon SubstitutionLexicon::build(const std::vector<AlignedSentence>& train) {
  SubstitutionLexicon lex;
  for (const auto& sent : train)
    for (const auto& pair : sent.pairs) lex.add(pair.orig, pair.norm);
  return lex;
}

void SubstitutionLexicon::add(std::string_view orig, std::string_view norm, uint64_t count) {
  if (count == 0) return;
  auto it = counts_.find(orig);
  if (it == counts_.end()) it = counts_.emplace(std::string(orig), Row{}).first;
  auto cell = it->second.find(norm);
  if (cell == it->second.end()) cell = it->second.emplace(std::string(norm), 0).first;
  cell->second += count;
  auto tot = totals_.find(orig);
  if (tot == totals_.end()) tot = totals_.emplace(std::string(orig), 0).first;
  tot->second += count;
}

SubstitutionLexicon SubstitutionLexicon::pruned(uint64_t min_count) const {
  SubstitutionLexicon out;
  for (const auto& [orig, row] : counts_)
    for (const auto& [norm, c] : row)
      if (c >= min_count) out.add(orig, norm, c);
  return out;
}

bool SubstitutionLexicon::contains(std::string_view orig) const { return counts_.find(orig) != counts_.end(); }

const SubstitutionLexicon::Row& SubstitutionLexicon::row(std::string_view orig) const {
  auto it = counts_.find(orig);
  if (it == counts_.end()) throw UnknownType("type not in lexicon: \"" + std::string(orig) + "\"");
  return it->second;
}

uint64_t SubstitutionLexicon::total(std::string_view orig) const {
  auto it = totals_.find(orig);
  return it == totals_.end() ? 0 : it->second;
}

std::map<std::string, double> SubstitutionLexicon::p_lex(std::string_view orig) const {
  const Row& r = row(orig);
  const auto denom = static_cast<double>(total(orig));
  std::map<std::string, double> out;
  for (const auto& [norm, c] : r) out.emplace(norm, static_cast<double>(c) / denom);
  return out;
}

const std::string& SubstitutionLexicon::most_frequent(std::string_view orig) const {
  const Row& r = row(orig);
  // Rows iterate in ascending key order, so strict > keeps the smallest on ties.
  auto best = r.begin();
  for (auto it = r.begin(); it != r.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

std::set<std::string> SubstitutionLexicon::orig_types() const {
  std::set<std::string> out;
  for (const auto& [orig, row] : counts_) out.insert(orig);
  return out;
}

void SubstitutionLexicon::save(std::ostream& out) const {
  for (const auto& [orig, row] : counts_) {
    std::vector<std::pair<std::string_view, uint64_t>> entries(row.begin(), row.end());
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [norm, c] : entries) out << orig << '\t' << norm << '\t' << c << '\n';
  }
}

SubstitutionLexicon SubstitutionLexicon::load(std::istream& in) {
  SubstitutionLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_on(line, '\t');
    if (cols.size() != 3) throw ParseError(line_no, "lexicon rows need 3 columns");
    uint64_t count = 0;
    const auto& c = cols[2];
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (ec != std::errc() || ptr != c.data() + c.size() || count == 0)
      throw ParseError(line_no, "invalid count \"" + c + "\"");
    if (cols[0].empty() || cols[1].empty()) throw ParseError(line_no, "empty type");
    lex.add(cols[0], cols[1], count);
  }
  return lex;
}

}  // namespace histnorm
