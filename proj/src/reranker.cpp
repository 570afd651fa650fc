#include "histnorm/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "histnorm/corpus.hpp"
#include "histnorm/errors.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

RerankMode parse_rerank_mode(std::string_view name) {
  if (name == "hybrid") return RerankMode::kHybrid;
  if (name == "type_only") return RerankMode::kTypeOnly;
  if (name == "flat_prior") return RerankMode::kFlatPrior;
  throw InvalidConfig("unknown mode \"" + std::string(name) + "\"");
}

std::string_view rerank_mode_name(RerankMode mode) {
  switch (mode) {
    case RerankMode::kHybrid: return "hybrid";
    case RerankMode::kTypeOnly: return "type_only";
    case RerankMode::kFlatPrior: return "flat_prior";
  }
  return "hybrid";
}

void RerankConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidConfig("alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidConfig("beta must be positive");
  if (beams < 1) throw InvalidConfig("beams must be at least 1");
  if (k < 1) throw InvalidConfig("k must be at least 1");
}

// ---------------------------------------------------------------------------
// Hypothesis sets

HypothesisSet sharpen(std::string source, std::vector<Hypothesis> dist, double exponent, HypothesisOrigin origin) {
  std::stable_sort(dist.begin(), dist.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return a.logprob != b.logprob ? a.logprob > b.logprob : a.norm < b.norm;
  });
  if (dist.empty()) dist.push_back({source, 0.0});
  double peak = dist.front().logprob * exponent;
  double z = 0.0;
  for (const auto& h : dist) z += std::exp(h.logprob * exponent - peak);
  const double log_z = peak + std::log(z);
  for (auto& h : dist) h.logprob = h.logprob * exponent - log_z;
  return {std::move(source), std::move(dist), origin};
}

std::vector<std::string> oov_types(const std::vector<std::vector<std::string>>& sentences,
                                   const SubstitutionLexicon& lex) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  for (const auto& s : sentences)
    for (const auto& w : s)
      if (!is_punctuation_token(w) && !lex.contains(w) && seen.insert(w).second) out.push_back(w);
  return out;
}

std::vector<HypothesisSet> assemble_hypothesis_sets(const std::vector<std::string>& sentence,
                                                    const SubstitutionLexicon& lex,
                                                    const GeneratedHypotheses& generated, const RerankConfig& cfg) {
  cfg.validate();
  const bool singletons = cfg.mode == RerankMode::kTypeOnly;
  std::vector<HypothesisSet> sets;
  sets.reserve(sentence.size());
  for (const auto& w : sentence) {
    if (is_punctuation_token(w)) {
      sets.push_back({w, {{w, 0.0}}, HypothesisOrigin::kPassthrough});
      continue;
    }
    if (lex.contains(w)) {
      if (singletons) {
        sets.push_back({w, {{lex.most_frequent(w), 0.0}}, HypothesisOrigin::kLexicon});
        continue;
      }
      std::vector<Hypothesis> dist;
      for (const auto& [norm, p] : lex.p_lex(w)) dist.push_back({norm, std::log(p)});
      sets.push_back(sharpen(w, std::move(dist), 1.0 / cfg.beta, HypothesisOrigin::kLexicon));
      continue;
    }
    auto it = generated.find(w);
    if (it == generated.end())
      throw std::logic_error("no generator output for OOV type \"" + w + "\"");
    std::vector<Hypothesis> dist = it->second;
    if (dist.size() > static_cast<std::size_t>(cfg.k)) dist.resize(static_cast<std::size_t>(cfg.k));
    HypothesisSet set = sharpen(w, std::move(dist), 1.0 / cfg.alpha, HypothesisOrigin::kGenerator);
    if (singletons) set.items = {{set.items.front().norm, 0.0}};
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<HypothesisSet> build_hypothesis_sets(const std::vector<std::string>& sentence,
                                                 const SubstitutionLexicon& lex, HypothesisGenerator& gen,
                                                 const RerankConfig& cfg) {
  cfg.validate();
  const auto types = oov_types({sentence}, lex);
  GeneratedHypotheses generated;
  if (!types.empty()) {
    auto lists = gen.generate(types, cfg.k);
    if (lists.size() != types.size()) throw ProtocolError("generator returned the wrong number of lists");
    for (std::size_t i = 0; i < types.size(); ++i) {
      renormalize(lists[i], types[i]);
      generated.emplace(types[i], std::move(lists[i]));
    }
  }
  return assemble_hypothesis_sets(sentence, lex, generated, cfg);
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

void check_lattice(const std::vector<HypothesisSet>& sets) {
  for (const auto& s : sets)
    if (s.items.empty()) throw InvalidConfig("empty hypothesis set for \"" + s.source + "\"");
}

std::vector<std::string> argmax_per_token(const std::vector<HypothesisSet>& sets) {
  std::vector<std::string> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.items.front().norm);
  return out;
}

struct Candidate {
  std::vector<std::string> tokens;
  double lm = 0.0;
  double type = 0.0;  // effective prior score (0 under flat priors)
  double score() const { return lm + type; }
};

// Objective order: total score, then prior score, then the token sequence.
bool better(const Candidate& a, const Candidate& b) {
  const double sa = a.score(), sb = b.score();
  if (sa != sb) return sa > sb;
  if (a.type != b.type) return a.type > b.type;
  return a.tokens < b.tokens;
}

double full_lm_score(const LanguageModel& lm, const std::vector<std::string>& tokens) {
  if (lm.ngram) return lm.ngram->logprob_sequence(lm_words(tokens));
  return lm.external->score({render_norm(tokens)}).at(0);
}

// Incremental n-gram scoring of an encoded token prefix. Words still open
// because of a trailing join mark are held back until they are complete.
struct NgramCursor {
  NgramModel::State state;
  std::string pending;
  double lm = 0.0;

  void advance(const NgramModel& model, std::string_view token) {
    std::string text = pending + std::string(token);
    const bool joins = std::string_view(text).ends_with(kJoinMark);
    if (joins) text.resize(text.size() - kJoinMark.size());
    for (auto pos = text.find(kSplitMark); pos != std::string::npos; pos = text.find(kSplitMark, pos + 1))
      text.replace(pos, kSplitMark.size(), " ");
    auto words = split_whitespace(text);
    pending.clear();
    if (joins && !words.empty()) {
      pending = std::move(words.back());
      words.pop_back();
    }
    for (const auto& w : words) {
      auto [lp, next] = model.extend(state, w);
      lm += lp;
      state = std::move(next);
    }
  }
};

struct Beam {
  Candidate cand;
  NgramCursor cursor;
};

}  // namespace

std::vector<std::string> rerank(const std::vector<HypothesisSet>& sets, const LanguageModel& lm,
                                const RerankConfig& cfg) {
  cfg.validate();
  check_lattice(sets);
  if (sets.empty()) return {};
  if (cfg.mode == RerankMode::kTypeOnly) return argmax_per_token(sets);
  if (!lm.available()) throw InvalidConfig("re-ranking needs a language model unless mode is type_only");
  const bool flat = cfg.mode == RerankMode::kFlatPrior;
  const auto width = static_cast<std::size_t>(cfg.beams);

  std::vector<Beam> beams(1);
  if (lm.ngram) beams[0].cursor.state = lm.ngram->initial_state();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<Beam> next;
    next.reserve(beams.size() * sets[i].items.size());
    for (const auto& b : beams) {
      for (const auto& item : sets[i].items) {
        Beam nb = b;
        nb.cand.tokens.push_back(item.norm);
        if (!flat) nb.cand.type += item.logprob;
        if (lm.ngram) {
          nb.cursor.advance(*lm.ngram, item.norm);
          nb.cand.lm = nb.cursor.lm;
        }
        next.push_back(std::move(nb));
      }
    }
    const bool last = i + 1 == sets.size();
    if (lm.ngram && last) {
      // The survivors are compared on the complete-sentence score.
      for (auto& nb : next) nb.cand.lm = full_lm_score(lm, nb.cand.tokens);
    } else if (lm.external) {
      std::vector<std::string> texts;
      texts.reserve(next.size());
      for (const auto& nb : next) texts.push_back(render_norm(nb.cand.tokens));
      const auto scores = lm.external->score(texts);
      if (scores.size() != texts.size()) throw ProtocolError("scorer returned the wrong number of scores");
      for (std::size_t j = 0; j < next.size(); ++j) next[j].cand.lm = scores[j];
    }
    const std::size_t keep = last ? 1 : std::min(width, next.size());
    std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(keep), next.end(),
                      [](const Beam& a, const Beam& b) { return better(a.cand, b.cand); });
    next.resize(keep);
    beams = std::move(next);
  }
  return beams.front().cand.tokens;
}

std::vector<std::string> exhaustive_oracle(const std::vector<HypothesisSet>& sets, const LanguageModel& lm,
                                           const RerankConfig& cfg) {
  cfg.validate();
  check_lattice(sets);
  if (sets.empty()) return {};
  double size = 1.0;
  for (const auto& s : sets) size *= static_cast<double>(s.items.size());
  if (size > kMaxOracleLattice) throw LatticeTooLarge("lattice has " + std::to_string(size) + " paths");
  if (cfg.mode == RerankMode::kTypeOnly) return argmax_per_token(sets);
  if (!lm.available()) throw InvalidConfig("the oracle needs a language model unless mode is type_only");
  const bool flat = cfg.mode == RerankMode::kFlatPrior;

  std::vector<Candidate> all;
  all.reserve(static_cast<std::size_t>(size));
  std::vector<std::size_t> pick(sets.size(), 0);
  for (bool done = false; !done;) {
    Candidate c;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& item = sets[i].items[pick[i]];
      c.tokens.push_back(item.norm);
      if (!flat) c.type += item.logprob;
    }
    all.push_back(std::move(c));
    // Odometer increment, last position fastest.
    for (std::size_t pos = sets.size();;) {
      if (pos == 0) {
        done = true;
        break;
      }
      --pos;
      if (++pick[pos] < sets[pos].items.size()) break;
      pick[pos] = 0;
    }
  }

  if (lm.ngram) {
    for (auto& c : all) c.lm = full_lm_score(lm, c.tokens);
  } else {
    constexpr std::size_t kBatch = 256;
    for (std::size_t start = 0; start < all.size(); start += kBatch) {
      const std::size_t end = std::min(all.size(), start + kBatch);
      std::vector<std::string> texts;
      for (std::size_t j = start; j < end; ++j) texts.push_back(render_norm(all[j].tokens));
      const auto scores = lm.external->score(texts);
      if (scores.size() != texts.size()) throw ProtocolError("scorer returned the wrong number of scores");
      for (std::size_t j = start; j < end; ++j) all[j].lm = scores[j - start];
    }
  }
  return std::min_element(all.begin(), all.end(), better)->tokens;
}

}  // namespace histnorm
