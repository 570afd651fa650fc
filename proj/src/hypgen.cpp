#include "histnorm/hypgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "histnorm/errors.hpp"
#include "histnorm/levenshtein.hpp"
#include "histnorm/lexicon.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

bool hypothesis_order(const Hypothesis& a, const Hypothesis& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.norm < b.norm;
}

}  // namespace

void renormalize(std::vector<Hypothesis>& hyps, std::string_view source) {
  std::erase_if(hyps, [](const Hypothesis& h) { return !std::isfinite(h.logprob); });
  if (hyps.empty()) {
    hyps.push_back({std::string(source), 0.0});
    return;
  }
  std::sort(hyps.begin(), hyps.end(), hypothesis_order);
  double z = -std::numeric_limits<double>::infinity();
  for (const auto& h : hyps) z = log_add(z, h.logprob);
  for (auto& h : hyps) h.logprob -= z;
}

std::string context_to_string(char32_t ctx) {
  if (ctx == kWordBoundary) return "<b>";
  if (ctx == kAnyContext) return "<any>";
  return to_utf8(ctx);
}

char32_t context_from_string(std::string_view s) {
  if (s == "<b>") return kWordBoundary;
  if (s == "<any>") return kAnyContext;
  const auto cps = to_codepoints(s);
  if (cps.size() != 1) throw ParseError(0, "context must be one character: \"" + std::string(s) + "\"");
  return cps[0];
}

std::vector<std::u32string> char_targets(std::u32string_view orig, std::u32string_view norm) {
  std::vector<std::u32string> out(orig.size());
  std::u32string prefix;
  bool started = false;
  std::size_t last = 0;
  for (const EditOp& op : edit_script(orig, norm)) {
    if (op.kind == EditKind::kInsert) {
      if (started) {
        out[last].push_back(norm[op.tgt]);
      } else {
        prefix.push_back(norm[op.tgt]);
      }
      continue;
    }
    last = op.src;
    out[last] = started ? std::u32string() : std::move(prefix);
    started = true;
    if (op.kind != EditKind::kDelete) out[last].push_back(norm[op.tgt]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// RuleModel

RuleModel RuleModel::learn(const std::vector<AlignedSentence>& train) {
  const auto lex = SubstitutionLexicon::build(train);
  if (lex.empty()) throw EmptyTraining("no token pairs to learn rules from");

  std::map<std::tuple<std::string, std::string, char32_t, char32_t>, uint64_t> counts;
  for (const auto& [orig, row] : lex.counts()) {
    const std::u32string src = to_codepoints(orig);
    const auto targets = char_targets(src, to_codepoints(lex.most_frequent(orig)));
    for (std::size_t i = 0; i < src.size(); ++i) {
      const char32_t left = i > 0 ? src[i - 1] : kWordBoundary;
      const char32_t right = i + 1 < src.size() ? src[i + 1] : kWordBoundary;
      ++counts[{to_utf8(src[i]), to_utf8(targets[i]), left, right}];
    }
  }
  std::vector<EditRule> rules;
  rules.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    const auto& [s, t, l, r] = key;
    rules.push_back({s, t, l, r, c});
  }
  RuleModel model = from_rules(std::move(rules));

  std::set<std::string> vocab;
  for (const auto& sent : train)
    for (const auto& p : sent.pairs) vocab.insert(p.norm);
  model.target_vocab_ = std::move(vocab);
  return model;
}

RuleModel RuleModel::from_rules(std::vector<EditRule> rules) {
  RuleModel model;
  model.rules_ = std::move(rules);
  std::sort(model.rules_.begin(), model.rules_.end(), [](const EditRule& a, const EditRule& b) {
    return std::tie(a.src, a.left, a.right, a.tgt) < std::tie(b.src, b.left, b.right, b.tgt);
  });
  model.index();
  return model;
}

void RuleModel::index() {
  tables_.clear();
  for (const auto& rule : rules_) {
    const auto cps = to_codepoints(rule.src);
    if (cps.size() != 1) throw InvalidConfig("rule source must be one character: \"" + rule.src + "\"");
    if (rule.count == 0) throw InvalidConfig("rule count must be positive");
    const char32_t c = cps[0];
    for (const Key& key : {Key{c, rule.left, rule.right}, Key{c, rule.left, kAnyContext},
                           Key{c, kAnyContext, rule.right}, Key{c, kAnyContext, kAnyContext}}) {
      auto& t = tables_[key];
      t.tgt_counts[rule.tgt] += rule.count;
      t.total += rule.count;
    }
  }
}

const RuleModel::Table* RuleModel::table(char32_t src, char32_t left, char32_t right) const {
  auto it = tables_.find({src, left, right});
  return it == tables_.end() ? nullptr : &it->second;
}

namespace {

// Witten-Bell interpolation of one level's relative frequencies with `base`.
template <typename Table>
double witten_bell(const Table* t, const std::string& tgt, double base) {
  if (!t || t->total == 0) return base;
  const auto n = static_cast<double>(t->total);
  const auto types = static_cast<double>(t->tgt_counts.size());
  auto it = t->tgt_counts.find(tgt);
  const double c = it == t->tgt_counts.end() ? 0.0 : static_cast<double>(it->second);
  return (c + types * base) / (n + types);
}

}  // namespace

std::vector<std::pair<std::string, double>> RuleModel::distribution(char32_t src, char32_t left,
                                                                     char32_t right) const {
  const std::string copy = to_utf8(src);
  const Table* full = table(src, left, right);
  const Table* by_left = table(src, left, kAnyContext);
  const Table* by_right = table(src, kAnyContext, right);
  const Table* any = table(src, kAnyContext, kAnyContext);

  std::set<std::string> candidates{copy};
  for (const Table* t : {full, by_left, by_right, any})
    if (t)
      for (const auto& [tgt, c] : t->tgt_counts) candidates.insert(tgt);

  std::vector<std::pair<std::string, double>> out;
  out.reserve(candidates.size());
  for (const auto& tgt : candidates) {
    const double p1 = witten_bell(any, tgt, tgt == copy ? 1.0 : 0.0);
    const double p_left = witten_bell(by_left, tgt, p1);
    const double p_right = witten_bell(by_right, tgt, p1);
    const double p = witten_bell(full, tgt, 0.5 * p_left + 0.5 * p_right);
    if (p > 0.0) out.emplace_back(tgt, p);
  }
  return out;
}

double RuleModel::probability(std::string_view tgt, char32_t src, char32_t left, char32_t right) const {
  for (const auto& [t, p] : distribution(src, left, right))
    if (t == tgt) return p;
  return 0.0;
}

uint64_t RuleModel::count(std::string_view src, std::string_view tgt, char32_t left, char32_t right) const {
  const auto cps = to_codepoints(src);
  if (cps.size() != 1) return 0;
  const Table* t = table(cps[0], left, right);
  if (!t) return 0;
  auto it = t->tgt_counts.find(std::string(tgt));
  return it == t->tgt_counts.end() ? 0 : it->second;
}

void RuleModel::save(std::ostream& out) const {
  for (const auto& r : rules_)
    out << r.src << '\t' << r.tgt << '\t' << context_to_string(r.left) << '\t' << context_to_string(r.right)
        << '\t' << r.count << '\n';
}

RuleModel RuleModel::load(std::istream& in) {
  std::vector<EditRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_on(line, '\t');
    if (cols.size() != 5) throw ParseError(line_no, "rule rows need 5 columns");
    uint64_t count = 0;
    const auto& c = cols[4];
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (ec != std::errc() || ptr != c.data() + c.size() || count == 0)
      throw ParseError(line_no, "invalid count \"" + c + "\"");
    try {
      const char32_t left = context_from_string(cols[2]);
      const char32_t right = context_from_string(cols[3]);
      if (left == kAnyContext || right == kAnyContext) throw ParseError(line_no, "wildcard context in rule file");
      rules.push_back({cols[0], cols[1], left, right, count});
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  try {
    return from_rules(std::move(rules));
  } catch (const InvalidConfig& e) {
    throw ParseError(0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Beam search

std::vector<Hypothesis> generate_rules(const RuleModel& model, std::string_view word, int k) {
  if (k < 1) k = 1;
  const std::u32string src = to_codepoints(word);
  const std::size_t width = std::max<std::size_t>(4 * static_cast<std::size_t>(k), 16);

  struct Partial {
    std::u32string out;
    double logprob;
  };
  std::vector<Partial> beam{{U"", 0.0}};
  for (std::size_t i = 0; i < src.size(); ++i) {
    const char32_t left = i > 0 ? src[i - 1] : kWordBoundary;
    const char32_t right = i + 1 < src.size() ? src[i + 1] : kWordBoundary;
    std::vector<std::pair<std::u32string, double>> options;
    for (const auto& [tgt, p] : model.distribution(src[i], left, right))
      options.emplace_back(to_codepoints(tgt), std::log(p));

    // Derivations reaching the same string are merged.
    std::unordered_map<std::u32string, double> merged;
    for (const auto& partial : beam) {
      for (const auto& [tgt, lp] : options) {
        std::u32string next = partial.out + tgt;
        auto [it, inserted] = merged.try_emplace(std::move(next), partial.logprob + lp);
        if (!inserted) it->second = log_add(it->second, partial.logprob + lp);
      }
    }
    beam.clear();
    beam.reserve(merged.size());
    for (auto& [s, lp] : merged) beam.push_back({s, lp});
    const std::size_t keep = std::min(width, beam.size());
    std::partial_sort(beam.begin(), beam.begin() + static_cast<std::ptrdiff_t>(keep), beam.end(),
                      [](const Partial& a, const Partial& b) {
                        if (a.logprob != b.logprob) return a.logprob > b.logprob;
                        return a.out < b.out;
                      });
    beam.resize(keep);
  }

  const auto& vocab = model.target_vocab();
  struct Ranked {
    Hypothesis hyp;
    bool in_vocab;
  };
  std::vector<Ranked> ranked;
  for (const auto& p : beam) {
    std::string norm = to_utf8(p.out);
    if (!is_valid_norm(norm)) continue;
    const bool known = vocab && vocab->contains(norm);
    ranked.push_back({{std::move(norm), p.logprob}, known});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.hyp.logprob != b.hyp.logprob) return a.hyp.logprob > b.hyp.logprob;
    if (a.in_vocab != b.in_vocab) return a.in_vocab;
    return a.hyp.norm < b.hyp.norm;
  });
  if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));

  std::vector<Hypothesis> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.push_back(std::move(r.hyp));
  if (out.empty()) return {{std::string(word), 0.0}};
  // Keep the vocabulary-aware order; only shift the scores.
  double z = -std::numeric_limits<double>::infinity();
  for (const auto& h : out) z = log_add(z, h.logprob);
  for (auto& h : out) h.logprob -= z;
  return out;
}

// ---------------------------------------------------------------------------
// Generators

std::vector<std::vector<Hypothesis>> RuleGenerator::generate_serial(const std::vector<std::string>& types,
                                                                    int k) const {
  std::vector<std::vector<Hypothesis>> out(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) out[i] = generate_rules(model_, types[i], k);
  return out;
}

std::vector<std::vector<Hypothesis>> RuleGenerator::generate(const std::vector<std::string>& types, int k) {
  std::vector<std::vector<Hypothesis>> out(types.size());
  const auto n = static_cast<std::ptrdiff_t>(types.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = generate_rules(model_, types[static_cast<std::size_t>(i)], k);
  return out;
}

std::vector<std::vector<Hypothesis>> CachedGenerator::generate(const std::vector<std::string>& types, int k) {
  prefetch(types, k);
  std::vector<std::vector<Hypothesis>> out;
  out.reserve(types.size());
  for (const auto& t : types) out.push_back(cache_.at({t, k}));
  return out;
}

void CachedGenerator::prefetch(const std::vector<std::string>& types, int k) {
  std::vector<std::string> missing;
  std::set<std::string> queued;
  for (const auto& t : types)
    if (!cache_.contains({t, k}) && queued.insert(t).second) missing.push_back(t);
  if (missing.empty()) return;
  auto lists = inner_.generate(missing, k);
  for (std::size_t i = 0; i < missing.size(); ++i) cache_[{missing[i], k}] = std::move(lists.at(i));
}

}  // namespace histnorm
