#include "histnorm/lm.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "histnorm/corpus.hpp"
#include "histnorm/errors.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

namespace {

constexpr double kLn10 = 2.302585092994045684;
// ARPA's conventional stand-in for log10(0).
constexpr double kArpaLogZero = -99.0;

}  // namespace

std::size_t NgramModel::KeyHash::operator()(const std::vector<WordId>& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (WordId w : key) {
    h ^= static_cast<std::size_t>(static_cast<uint32_t>(w));
    h *= 0x100000001b3ull;
  }
  return h;
}

WordId NgramModel::intern(const std::string& w) {
  auto [it, inserted] = ids_.try_emplace(w, static_cast<WordId>(vocab_.size()));
  if (inserted) vocab_.push_back(w);
  return it->second;
}

const NgramModel::Entry* NgramModel::find(std::span<const WordId> ngram) const {
  if (ngram.empty() || ngram.size() > tables_.size()) return nullptr;
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(std::vector<WordId>(ngram.begin(), ngram.end()));
  return it == table.end() ? nullptr : &it->second;
}

NgramModel NgramModel::train(const std::vector<std::vector<std::string>>& sentences, const NgramOptions& opts) {
  if (opts.order < 1) throw InvalidConfig("n-gram order must be at least 1");
  if (sentences.empty()) throw EmptyTraining("no sentences to train the language model on");

  std::map<std::string, uint64_t> freq;
  for (const auto& s : sentences)
    for (const auto& w : s) ++freq[w];

  NgramModel m;
  m.order_ = opts.order;
  m.start_ = m.intern(std::string(kSentenceStart));
  m.end_ = m.intern(std::string(kSentenceEnd));
  m.unk_ = m.intern(std::string(kUnknownWord));
  for (const auto& [w, c] : freq)
    if (!(opts.unk_hapax && c == 1) && w != kSentenceStart && w != kSentenceEnd) m.intern(w);

  const auto n_max = static_cast<std::size_t>(opts.order);
  for (const auto& s : sentences) {
    std::vector<WordId> seq{m.start_};
    for (const auto& w : s) seq.push_back(m.id(w));
    seq.push_back(m.end_);
    for (std::size_t i = 1; i < seq.size(); ++i)
      for (std::size_t n = 1; n <= n_max && n <= i + 1; ++n)
        ++m.counts_[std::vector<WordId>(seq.begin() + static_cast<std::ptrdiff_t>(i + 1 - n),
                                        seq.begin() + static_cast<std::ptrdiff_t>(i + 1))];
  }

  // Total count and number of distinct followers per history.
  struct History {
    uint64_t total = 0;
    uint64_t types = 0;
  };
  std::unordered_map<std::vector<WordId>, History, KeyHash> histories;
  std::vector<std::vector<std::pair<std::vector<WordId>, uint64_t>>> by_order(n_max);
  for (const auto& [key, c] : m.counts_) by_order[key.size() - 1].emplace_back(key, c);
  for (auto& level : by_order) std::sort(level.begin(), level.end());
  History unigram_history;
  for (const auto& [key, c] : by_order[0]) {
    unigram_history.total += c;
    ++unigram_history.types;
  }
  for (std::size_t n = 2; n <= n_max; ++n)
    for (const auto& [key, c] : by_order[n - 1]) {
      auto& h = histories[std::vector<WordId>(key.begin(), key.end() - 1)];
      h.total += c;
      ++h.types;
    }

  m.tables_.assign(n_max, Table{});
  const auto predictable = m.predictable();
  const double uniform = 1.0 / static_cast<double>(predictable.size());
  for (WordId w : predictable) {
    auto it = m.counts_.find({w});
    const double c = it == m.counts_.end() ? 0.0 : static_cast<double>(it->second);
    const double p = (c + static_cast<double>(unigram_history.types) * uniform) /
                     (static_cast<double>(unigram_history.total + unigram_history.types));
    m.tables_[0][{w}] = {std::log(p), 0.0};
  }
  m.tables_[0][{m.start_}] = {kArpaLogZero * kLn10, 0.0};

  for (std::size_t n = 2; n <= n_max; ++n) {
    for (const auto& [key, c] : by_order[n - 1]) {
      const std::span<const WordId> k(key);
      const auto& h = histories.at(std::vector<WordId>(key.begin(), key.end() - 1));
      const double lower = std::exp(m.logprob(key.back(), k.subspan(1, n - 2)));
      const double p = (static_cast<double>(c) + static_cast<double>(h.types) * lower) /
                       static_cast<double>(h.total + h.types);
      m.tables_[n - 1][key] = {std::log(p), 0.0};
    }
  }
  for (const auto& [ctx, h] : histories) {
    auto& table = m.tables_[ctx.size() - 1];
    auto it = table.find(ctx);
    if (it == table.end()) throw std::logic_error("n-gram history missing from its own table");
    it->second.backoff =
        std::log(static_cast<double>(h.types) / static_cast<double>(h.total + h.types));
  }
  return m;
}

std::vector<WordId> NgramModel::predictable() const {
  std::vector<WordId> out;
  out.reserve(vocab_.size());
  for (WordId i = 0; i < static_cast<WordId>(vocab_.size()); ++i)
    if (i != start_) out.push_back(i);
  return out;
}

WordId NgramModel::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? unk_ : it->second;
}

double NgramModel::logprob(WordId word, std::span<const WordId> context) const {
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  if (context.size() > max_ctx) context = context.subspan(context.size() - max_ctx);
  std::vector<WordId> key;
  double acc = 0.0;
  for (std::size_t len = context.size() + 1; len-- > 0;) {
    const auto ctx = context.subspan(context.size() - len);
    key.assign(ctx.begin(), ctx.end());
    key.push_back(word);
    if (const Entry* e = find(key)) return acc + e->logprob;
    if (len > 0)
      if (const Entry* b = find(ctx)) acc += b->backoff;
  }
  throw std::logic_error("word \"" + this->word(word) + "\" has no unigram probability");
}

NgramModel::State NgramModel::initial_state() const {
  State s;
  if (order_ > 1) s.context.push_back(start_);
  return s;
}

std::pair<double, NgramModel::State> NgramModel::extend(const State& state, std::string_view word) const {
  const WordId w = id(word);
  const double lp = logprob(w, state.context);
  State next;
  const std::size_t keep = static_cast<std::size_t>(order_ - 1);
  if (keep > 0) {
    next.context = state.context;
    next.context.push_back(w);
    if (next.context.size() > keep)
      next.context.erase(next.context.begin(),
                         next.context.begin() + static_cast<std::ptrdiff_t>(next.context.size() - keep));
  }
  return {lp, std::move(next)};
}

double NgramModel::end_logprob(const State& state) const { return logprob(end_, state.context); }

double NgramModel::logprob_sequence(const std::vector<std::string>& words) const {
  State s = initial_state();
  double total = 0.0;
  for (const auto& w : words) {
    auto [lp, next] = extend(s, w);
    total += lp;
    s = std::move(next);
  }
  return total + end_logprob(s);
}

uint64_t NgramModel::count(const std::vector<std::string>& ngram) const {
  std::vector<WordId> key;
  for (const auto& w : ngram) {
    auto it = ids_.find(w);
    if (it == ids_.end()) return 0;
    key.push_back(it->second);
  }
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

void NgramModel::save_arpa(std::ostream& out) const {
  out << "\n\\data\\\n";
  for (std::size_t n = 1; n <= tables_.size(); ++n) out << "ngram " << n << '=' << tables_[n - 1].size() << '\n';
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(12);
  for (std::size_t n = 1; n <= tables_.size(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    std::vector<std::pair<std::vector<std::string>, const Entry*>> rows;
    rows.reserve(tables_[n - 1].size());
    for (const auto& [key, e] : tables_[n - 1]) {
      std::vector<std::string> words;
      for (WordId w : key) words.push_back(vocab_[static_cast<std::size_t>(w)]);
      rows.emplace_back(std::move(words), &e);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [words, e] : rows) {
      const bool is_start = n == 1 && words[0] == kSentenceStart;
      out << (is_start ? kArpaLogZero : e->logprob / kLn10) << '\t' << join(words, " ");
      if (n < tables_.size() && e->backoff != 0.0) out << '\t' << e->backoff / kLn10;
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  out.flags(old_flags);
  out.precision(old_precision);
}

NgramModel NgramModel::load_arpa(std::istream& in) {
  NgramModel m;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> declared;
  int section = -1;  // -1: before \data\, 0: in \data\, n: n-grams
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") {
      section = 0;
      continue;
    }
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      int n = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &n) != 1 || n < 1 || static_cast<std::size_t>(n) > declared.size())
        throw ParseError(line_no, "unexpected section header \"" + line + "\"");
      section = n;
      continue;
    }
    if (section == 0) {
      std::size_t n = 0, c = 0;
      if (std::sscanf(line.c_str(), "ngram %zu=%zu", &n, &c) != 2 || n != declared.size() + 1)
        throw ParseError(line_no, "bad ngram count line");
      declared.push_back(c);
      continue;
    }
    if (section < 1) throw ParseError(line_no, "content outside any section");
    if (m.tables_.empty()) m.tables_.assign(declared.size(), Table{});
    const auto cols = split_on(line, '\t');
    std::vector<std::string> fields;
    if (cols.size() >= 2) {
      fields = cols;
    } else {
      fields = split_whitespace(line);
    }
    const auto n = static_cast<std::size_t>(section);
    std::vector<std::string> words;
    double lp10 = 0.0, bow10 = 0.0;
    try {
      if (cols.size() >= 2) {
        lp10 = std::stod(cols[0]);
        words = split_whitespace(cols[1]);
        if (cols.size() >= 3) bow10 = std::stod(cols[2]);
      } else {
        if (fields.size() < n + 1) throw std::invalid_argument("short line");
        lp10 = std::stod(fields[0]);
        words.assign(fields.begin() + 1, fields.begin() + 1 + static_cast<std::ptrdiff_t>(n));
        if (fields.size() > n + 1) bow10 = std::stod(fields[n + 1]);
      }
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed n-gram line");
    }
    if (words.size() != n) throw ParseError(line_no, "n-gram has wrong length");
    std::vector<WordId> key;
    for (const auto& w : words) {
      if (n > 1 && !m.ids_.contains(w)) throw ParseError(line_no, "word \"" + w + "\" missing from unigrams");
      key.push_back(m.intern(w));
    }
    m.tables_[n - 1][key] = {lp10 * kLn10, bow10 * kLn10};
  }
  if (!ended || declared.empty()) throw ParseError(line_no, "truncated ARPA file");
  m.order_ = static_cast<int>(declared.size());
  if (!m.ids_.contains(std::string(kSentenceEnd))) throw ParseError(line_no, "ARPA model lacks </s>");
  if (m.tables_.empty()) m.tables_.assign(declared.size(), Table{});
  m.start_ = m.intern(std::string(kSentenceStart));
  m.end_ = m.ids_.at(std::string(kSentenceEnd));
  const bool had_unk = m.ids_.contains(std::string(kUnknownWord));
  m.unk_ = m.intern(std::string(kUnknownWord));
  if (!had_unk) m.tables_[0][{m.unk_}] = {kArpaLogZero * kLn10, 0.0};
  if (!m.tables_[0].contains({m.start_})) m.tables_[0][{m.start_}] = {kArpaLogZero * kLn10, 0.0};
  return m;
}

std::vector<std::string> lm_words(const std::vector<std::string>& norm_tokens) {
  return split_whitespace(render_norm(norm_tokens));
}

std::vector<double> NgramScorer::score(const std::vector<std::string>& texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(model_.logprob_sequence(split_whitespace(t)));
  return out;
}

}  // namespace histnorm
