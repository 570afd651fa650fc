#include "histnorm/eval.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "histnorm/errors.hpp"
#include "histnorm/levenshtein.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kSpacing: return "spacing";
    case ErrorCategory::kCasing: return "casing";
    case ErrorCategory::kCharacter: return "character";
  }
  return "character";
}

bool ErrorCategories::has(ErrorCategory c) const {
  switch (c) {
    case ErrorCategory::kSpacing: return spacing;
    case ErrorCategory::kCasing: return casing;
    case ErrorCategory::kCharacter: return character;
  }
  return false;
}

ErrorCategories categorize_error(std::string_view pred, std::string_view gold) {
  ErrorCategories out;
  if (pred == gold) return out;
  const auto p = to_codepoints(pred);
  const auto g = to_codepoints(gold);
  for (const EditOp& op : edit_script(p, g)) {
    switch (op.kind) {
      case EditKind::kMatch: break;
      case EditKind::kSubstitute:
        if (is_pseudo_char(p[op.src]) || is_pseudo_char(g[op.tgt])) {
          out.spacing = true;
        } else if (is_case_pair(p[op.src], g[op.tgt])) {
          out.casing = true;
        } else {
          out.character = true;
        }
        break;
      case EditKind::kDelete:
        (is_pseudo_char(p[op.src]) ? out.spacing : out.character) = true;
        break;
      case EditKind::kInsert:
        (is_pseudo_char(g[op.tgt]) ? out.spacing : out.character) = true;
        break;
    }
  }
  return out;
}

EvalTally& EvalTally::operator+=(const EvalTally& o) {
  tokens += o.tokens;
  oov += o.oov;
  correct += o.correct;
  correct_oov += o.correct_oov;
  identity_correct += o.identity_correct;
  identity_correct_oov += o.identity_correct_oov;
  for (std::size_t c = 0; c < errors.size(); ++c)
    for (std::size_t v = 0; v < 2; ++v) errors[c][v] += o.errors[c][v];
  return *this;
}

namespace {

double percent(std::size_t num, std::size_t den) {
  if (den == 0) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double relative_or_nan(double sys, double identity) {
  if (std::isnan(sys) || std::isnan(identity) || identity >= 100.0) return std::numeric_limits<double>::quiet_NaN();
  return relative_error(sys, identity);
}

void check_lengths(const Predictions& preds, const std::vector<AlignedSentence>& gold) {
  if (preds.size() != gold.size())
    throw LengthMismatch(std::to_string(preds.size()) + " predicted sentences for " + std::to_string(gold.size()) +
                         " gold sentences");
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (preds[i].size() != gold[i].pairs.size())
      throw LengthMismatch("sentence " + std::to_string(i + 1) + ": " + std::to_string(preds[i].size()) +
                           " predicted tokens for " + std::to_string(gold[i].pairs.size()) + " gold tokens");
}

EvalTally tally_sentence(const std::vector<std::string>& pred, const AlignedSentence& gold,
                         const std::set<std::string>& train_vocab) {
  EvalTally t;
  for (std::size_t j = 0; j < gold.pairs.size(); ++j) {
    const auto& pair = gold.pairs[j];
    if (is_punctuation_token(pair.orig)) continue;
    const bool oov = !train_vocab.contains(pair.orig);
    ++t.tokens;
    if (oov) ++t.oov;
    const bool identity_ok = pair.orig == pair.norm;
    t.identity_correct += identity_ok;
    if (oov) t.identity_correct_oov += identity_ok;
    if (pred[j] == pair.norm) {
      ++t.correct;
      if (oov) ++t.correct_oov;
      continue;
    }
    const auto cats = categorize_error(pred[j], pair.norm);
    for (ErrorCategory c : kErrorCategories)
      if (cats.has(c)) ++t.errors[static_cast<std::size_t>(c)][oov ? 1 : 0];
  }
  return t;
}

}  // namespace

EvalTally tally_serial(const Predictions& preds, const std::vector<AlignedSentence>& gold,
                       const std::set<std::string>& train_vocab) {
  check_lengths(preds, gold);
  EvalTally total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += tally_sentence(preds[i], gold[i], train_vocab);
  return total;
}

EvalTally tally_parallel(const Predictions& preds, const std::vector<AlignedSentence>& gold,
                         const std::set<std::string>& train_vocab) {
  check_lengths(preds, gold);
  EvalTally total;
  const auto n = static_cast<std::ptrdiff_t>(gold.size());
#pragma omp parallel
  {
    EvalTally local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto s = static_cast<std::size_t>(i);
      local += tally_sentence(preds[s], gold[s], train_vocab);
    }
#pragma omp critical(histnorm_eval_reduce)
    total += local;
  }
  return total;
}

EvalReport make_report(const EvalTally& t) {
  EvalReport r;
  const std::size_t invocab = t.tokens - t.oov;
  r.n_tokens = t.tokens;
  r.n_oov = t.oov;
  r.n_errors = t.tokens - t.correct;
  r.n_errors_oov = t.oov - t.correct_oov;
  r.identity_errors = t.tokens - t.identity_correct;
  r.word_acc_overall = percent(t.correct, t.tokens);
  r.word_acc_invocab = percent(t.correct - t.correct_oov, invocab);
  r.word_acc_oov = percent(t.correct_oov, t.oov);
  r.rel_error_overall = relative_or_nan(r.word_acc_overall, percent(t.identity_correct, t.tokens));
  r.rel_error_oov = relative_or_nan(r.word_acc_oov, percent(t.identity_correct_oov, t.oov));
  r.error_counts = t.errors;
  return r;
}

EvalReport word_accuracy(const Predictions& preds, const std::vector<AlignedSentence>& gold,
                         const std::set<std::string>& train_vocab) {
  return make_report(tally_parallel(preds, gold, train_vocab));
}

double relative_error(double word_acc_system, double word_acc_identity) {
  if (word_acc_identity >= 100.0) throw DivisionByZero("identity baseline makes no errors");
  return 100.0 * (1.0 - word_acc_system / 100.0) / (1.0 - word_acc_identity / 100.0);
}

nlohmann::json EvalReport::to_json() const {
  auto num = [](double x) -> nlohmann::json { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
  nlohmann::json errors = nlohmann::json::object();
  for (ErrorCategory c : kErrorCategories)
    errors[std::string(category_name(c))] = {{"invocab", error_count(c, false)}, {"oov", error_count(c, true)}};
  return {{"word_acc", {{"overall", num(word_acc_overall)}, {"invocab", num(word_acc_invocab)}, {"oov", num(word_acc_oov)}}},
          {"rel_error", {{"overall", num(rel_error_overall)}, {"oov", num(rel_error_oov)}}},
          {"n_tokens", n_tokens},
          {"n_oov", n_oov},
          {"n_errors", n_errors},
          {"n_errors_oov", n_errors_oov},
          {"identity_errors", identity_errors},
          {"error_counts", errors}};
}

Predictions identity_baseline(const std::vector<AlignedSentence>& corpus) {
  Predictions out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(s.orig_tokens());
  return out;
}

Predictions lexicon_baseline(const std::vector<AlignedSentence>& corpus, const SubstitutionLexicon& lex) {
  Predictions out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    std::vector<std::string> pred;
    pred.reserve(s.pairs.size());
    for (const auto& p : s.pairs) pred.push_back(lex.contains(p.orig) ? lex.most_frequent(p.orig) : p.orig);
    out.push_back(std::move(pred));
  }
  return out;
}

Predictions best_theoretical_type(const std::vector<AlignedSentence>& corpus) {
  return lexicon_baseline(corpus, SubstitutionLexicon::build(corpus));
}

double recall_at_k(const std::vector<std::vector<HypothesisSet>>& sets, const std::vector<AlignedSentence>& gold,
                   int k) {
  if (sets.size() != gold.size()) throw LengthMismatch("hypothesis sets and gold differ in sentence count");
  std::size_t tokens = 0, hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (sets[i].size() != gold[i].pairs.size())
      throw LengthMismatch("sentence " + std::to_string(i + 1) + ": hypothesis sets and gold differ in length");
    for (std::size_t j = 0; j < gold[i].pairs.size(); ++j) {
      const auto& pair = gold[i].pairs[j];
      if (is_punctuation_token(pair.orig)) continue;
      ++tokens;
      const auto& items = sets[i][j].items;
      const std::size_t limit = k > 0 ? std::min(items.size(), static_cast<std::size_t>(k)) : 0;
      for (std::size_t h = 0; h < limit; ++h)
        if (items[h].norm == pair.norm) {
          ++hits;
          break;
        }
    }
  }
  if (k <= 0) return 0.0;
  return percent(hits, tokens);
}

std::string format_report_table(const std::vector<NamedReport>& rows) {
  std::ostringstream out;
  auto cell = [&](double x) {
    if (std::isnan(x)) {
      out << std::setw(10) << "n/a";
    } else {
      out << std::setw(10) << std::fixed << std::setprecision(3) << x;
    }
  };
  std::size_t name_width = 6;
  for (const auto& r : rows) name_width = std::max(name_width, r.system.size());

  out << std::left << std::setw(static_cast<int>(name_width)) << "System" << std::right << std::setw(10) << "Overall"
      << std::setw(10) << "Invocab" << std::setw(10) << "OOV" << std::setw(10) << "RelErr" << std::setw(10)
      << "RelErrOOV" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.system << std::right;
    cell(r.report.word_acc_overall);
    cell(r.report.word_acc_invocab);
    cell(r.report.word_acc_oov);
    cell(r.report.rel_error_overall);
    cell(r.report.rel_error_oov);
    out << '\n';
  }

  // Error categories in relative-error units of the identity baseline's
  // total error count; categories overlap, so rows may exceed "Overall".
  out << '\n'
      << std::left << std::setw(static_cast<int>(name_width)) << "System" << std::right << std::setw(10) << "Overall";
  for (const char* part : {"IV", "OOV"})
    for (ErrorCategory c : kErrorCategories)
      out << std::setw(10) << (std::string(part) + ":" + std::string(category_name(c)).substr(0, 4));
  out << '\n';
  for (const auto& r : rows) {
    const auto& rep = r.report;
    const double unit = rep.identity_errors > 0 ? 100.0 / static_cast<double>(rep.identity_errors)
                                                : std::numeric_limits<double>::quiet_NaN();
    out << std::left << std::setw(static_cast<int>(name_width)) << r.system << std::right;
    cell(static_cast<double>(rep.n_errors) * unit);
    for (bool oov : {false, true})
      for (ErrorCategory c : kErrorCategories) cell(static_cast<double>(rep.error_count(c, oov)) * unit);
    out << '\n';
  }
  out << "\nTokens: " << (rows.empty() ? 0 : rows.front().report.n_tokens)
      << "  OOV: " << (rows.empty() ? 0 : rows.front().report.n_oov) << '\n';
  return out.str();
}

}  // namespace histnorm
