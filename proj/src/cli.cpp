#include "histnorm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "histnorm/errors.hpp"
#include "histnorm/eval.hpp"
#include "histnorm/external.hpp"
#include "histnorm/hypgen.hpp"
#include "histnorm/lexicon.hpp"
#include "histnorm/lm.hpp"
#include "histnorm/pipeline.hpp"
#include "histnorm/text.hpp"

namespace histnorm::cli {

namespace fs = std::filesystem;

InputFormat parse_input_format(const std::string& name) {
  if (name == "aligned_tsv") return InputFormat::kAlignedTsv;
  if (name == "hunk_jsonl") return InputFormat::kHunkJsonl;
  if (name == "tokens") return InputFormat::kTokens;
  throw InvalidConfig("unknown input format \"" + name + "\"");
}

OutputFormat parse_output_format(const std::string& name) {
  if (name == "aligned_tsv") return OutputFormat::kAlignedTsv;
  if (name == "text") return OutputFormat::kText;
  throw InvalidConfig("unknown output format \"" + name + "\"");
}

namespace {

// Maps library errors onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ExternalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitExternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot write " + path.string());
  return out;
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) throw InvalidConfig(std::string(what) + " not found: " + path.string());
}

SubstitutionLexicon load_lexicon(const fs::path& path) {
  require_file(path, "lexicon");
  auto in = open_input(path);
  return SubstitutionLexicon::load(in);
}

std::set<std::string> norm_types(const SubstitutionLexicon& lex) {
  std::set<std::string> out;
  for (const auto& [orig, row] : lex.counts())
    for (const auto& [norm, c] : row) out.insert(norm);
  return out;
}

RuleModel load_rules(const fs::path& path, const SubstitutionLexicon& lex) {
  require_file(path, "rule model");
  auto in = open_input(path);
  RuleModel model = RuleModel::load(in);
  model.set_target_vocab(norm_types(lex));
  return model;
}

NgramModel load_lm(const fs::path& path) {
  require_file(path, "language model");
  auto in = open_input(path);
  return NgramModel::load_arpa(in);
}

std::set<std::string> load_vocab(const fs::path& path) {
  require_file(path, "training vocabulary");
  auto in = open_input(path);
  std::set<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) vocab.insert(line);
  }
  return vocab;
}

std::vector<AlignedSentence> read_tokens(std::istream& in) {
  std::vector<AlignedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    AlignedSentence s;
    s.doc_id = s.group_key = "input";
    for (const auto& tok : split_whitespace(line)) {
      std::string orig = transliterate(tok);
      try {
        validate_orig(orig);
      } catch (const EncodingViolation& e) {
        throw ParseError(line_no, e.what());
      }
      s.pairs.push_back({orig, orig});
    }
    if (!s.pairs.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<AlignedSentence> read_input(const fs::path& path, InputFormat format) {
  require_file(path, "input corpus");
  auto in = open_input(path);
  switch (format) {
    case InputFormat::kAlignedTsv: return parse_corpus(in, CorpusFormat::kAlignedTsv);
    case InputFormat::kHunkJsonl: return parse_corpus(in, CorpusFormat::kHunkJsonl);
    case InputFormat::kTokens: return read_tokens(in);
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_split(const SplitOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(opts.corpus, "corpus");
    const auto corpus = parse_corpus(opts.corpus, opts.format);
    const auto docs = collect_documents(corpus);
    std::set<std::string> groups;
    for (const auto& d : docs) groups.insert(d.group_key);
    if (groups.size() == 1)
      err << "warning: only one document group; everything goes to the largest split\n";
    const auto assignments = build_splits(docs, opts.ratios, opts.seed);

    std::ofstream file;
    if (opts.output) file = open_output(*opts.output);
    std::ostream& sink = opts.output ? file : out;
    for (const auto& a : assignments) sink << a.doc_id << '\t' << split_name(a.split) << '\n';

    if (opts.corpora_dir) {
      fs::create_directories(*opts.corpora_dir);
      std::map<std::string, Split> by_doc;
      for (const auto& a : assignments) by_doc[a.doc_id] = a.split;
      for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
        std::vector<AlignedSentence> part;
        for (const auto& sent : corpus)
          if (by_doc.at(sent.doc_id) == s) part.push_back(sent);
        auto f = open_output(*opts.corpora_dir / (std::string(split_name(s)) + ".tsv"));
        write_aligned_tsv(f, part);
      }
    }
    std::map<Split, std::size_t> tokens;
    std::size_t total = 0;
    std::map<std::string, std::size_t> doc_tokens;
    for (const auto& d : docs) doc_tokens[d.doc_id] = d.token_count;
    for (const auto& a : assignments) {
      tokens[a.split] += doc_tokens[a.doc_id];
      total += doc_tokens[a.doc_id];
    }
    for (Split s : {Split::kTrain, Split::kDev, Split::kTest})
      err << split_name(s) << ": " << tokens[s] << " tokens ("
          << (total ? 100.0 * static_cast<double>(tokens[s]) / static_cast<double>(total) : 0.0) << " %)\n";
    return kExitOk;
  });
}

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(opts.corpus, "training corpus");
    if (opts.order < 1) throw InvalidConfig("order must be at least 1");
    const auto train = filter_sentences(parse_corpus(opts.corpus, opts.format));
    if (train.empty()) throw EmptyTraining("training corpus has no usable sentences");

    auto lex = SubstitutionLexicon::build(train);
    if (opts.min_count > 1) lex = lex.pruned(opts.min_count);
    const auto rules = RuleModel::learn(train);
    std::vector<std::vector<std::string>> target;
    target.reserve(train.size());
    for (const auto& s : train) target.push_back(lm_words(s.norm_tokens()));
    const auto lm = NgramModel::train(target, NgramOptions{opts.order, opts.unk_hapax});

    fs::create_directories(opts.out_dir);
    {
      auto f = open_output(opts.out_dir / kLexiconFile);
      lex.save(f);
    }
    {
      auto f = open_output(opts.out_dir / kRulesFile);
      rules.save(f);
    }
    {
      auto f = open_output(opts.out_dir / kLanguageModelFile);
      lm.save_arpa(f);
    }
    {
      auto f = open_output(opts.out_dir / kVocabFile);
      for (const auto& w : SubstitutionLexicon::build(train).orig_types()) f << w << '\n';
    }
    out << format_stats(corpus_statistics(train));
    out << "lexicon types:        " << lex.type_count() << '\n'
        << "edit rules:           " << rules.rules().size() << '\n'
        << "lm vocabulary:        " << lm.vocab_size() << '\n';
    return kExitOk;
  });
}

int cmd_normalize(const NormalizeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    opts.rerank.validate();
    const auto timeout = std::chrono::milliseconds(opts.timeout_ms);
    const auto lex = load_lexicon(opts.artifacts / kLexiconFile);
    const auto corpus = read_input(opts.input, opts.format);
    const auto sentences = orig_sentences(corpus);

    std::unique_ptr<HypothesisGenerator> generator;
    std::optional<RuleModel> rules;
    if (opts.generator_cmd) {
      generator = std::make_unique<GeneratorClient>(*opts.generator_cmd, timeout);
    } else {
      rules = load_rules(opts.artifacts / kRulesFile, lex);
      generator = std::make_unique<RuleGenerator>(*rules);
    }
    const auto generated = generate_oov(sentences, lex, *generator, opts.rerank.k);

    std::optional<NgramModel> ngram;
    std::unique_ptr<ScorerClient> scorer;
    LanguageModel lm;
    if (opts.rerank.mode != RerankMode::kTypeOnly) {
      if (opts.scorer_cmd) {
        scorer = std::make_unique<ScorerClient>(*opts.scorer_cmd, timeout);
        lm.external = scorer.get();
      } else {
        ngram = load_lm(opts.artifacts / kLanguageModelFile);
        lm.ngram = &*ngram;
      }
    }
    const auto predictions = normalize_corpus(sentences, lex, generated, lm, opts.rerank);

    std::ofstream file;
    if (opts.output) file = open_output(*opts.output);
    std::ostream& sink = opts.output ? file : out;
    if (opts.output_format == OutputFormat::kText) {
      for (const auto& p : predictions) sink << render_norm(p) << '\n';
    } else {
      std::vector<AlignedSentence> result = corpus;
      for (std::size_t i = 0; i < result.size(); ++i)
        for (std::size_t j = 0; j < result[i].pairs.size(); ++j) result[i].pairs[j].norm = predictions[i][j];
      write_aligned_tsv(sink, result);
    }
    err << "normalized " << corpus.size() << " sentences, " << generated.size() << " OOV types\n";
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto vocab = load_vocab(opts.train_vocab);
    require_file(opts.gold, "gold corpus");
    require_file(opts.predictions, "predictions");
    const auto gold = filter_sentences(parse_corpus(opts.gold, opts.format));
    const auto pred_corpus = filter_sentences(parse_corpus(opts.predictions, opts.format));
    if (pred_corpus.size() != gold.size())
      throw LengthMismatch(std::to_string(pred_corpus.size()) + " predicted sentences for " +
                           std::to_string(gold.size()) + " gold sentences");
    Predictions preds;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred_corpus[i].orig_tokens() != gold[i].orig_tokens())
        throw LengthMismatch("sentence " + std::to_string(i + 1) + " is not aligned with the gold corpus");
      preds.push_back(pred_corpus[i].norm_tokens());
    }

    std::vector<NamedReport> rows;
    if (opts.baselines) {
      rows.push_back({"Identity", word_accuracy(identity_baseline(gold), gold, vocab)});
      if (opts.lexicon) {
        rows.push_back({"Lexicon", word_accuracy(lexicon_baseline(gold, load_lexicon(*opts.lexicon)), gold, vocab)});
      } else {
        err << "warning: no --lexicon given; skipping the Lexicon baseline\n";
      }
      rows.push_back({"Best-Theoretical-Type", word_accuracy(best_theoretical_type(gold), gold, vocab)});
    }
    rows.push_back({opts.system_name, word_accuracy(preds, gold, vocab)});
    out << format_report_table(rows);

    nlohmann::json doc;
    for (const auto& r : rows) doc["systems"][r.system] = r.report.to_json();

    if (opts.recall_at > 0) {
      const auto timeout = std::chrono::milliseconds(opts.timeout_ms);
      std::unique_ptr<HypothesisGenerator> generator;
      std::optional<SubstitutionLexicon> lex;
      std::optional<RuleModel> rules;
      if (opts.generator_cmd) {
        generator = std::make_unique<GeneratorClient>(*opts.generator_cmd, timeout);
      } else {
        if (!opts.artifacts) throw InvalidConfig("--recall-at needs --artifacts or --generator-cmd");
        lex = load_lexicon(*opts.artifacts / kLexiconFile);
        rules = load_rules(*opts.artifacts / kRulesFile, *lex);
        generator = std::make_unique<RuleGenerator>(*rules);
      }
      // Generator-only lattices: every non-punctuation token is generated.
      std::vector<std::string> types;
      std::set<std::string> seen;
      for (const auto& s : gold)
        for (const auto& p : s.pairs)
          if (!is_punctuation_token(p.orig) && seen.insert(p.orig).second) types.push_back(p.orig);
      auto lists = generator->generate(types, opts.recall_at);
      std::map<std::string, std::vector<Hypothesis>> by_type;
      for (std::size_t i = 0; i < types.size(); ++i) by_type[types[i]] = std::move(lists.at(i));

      std::vector<std::vector<HypothesisSet>> all_sets, oov_sets;
      std::vector<AlignedSentence> oov_gold;
      for (const auto& s : gold) {
        std::vector<HypothesisSet> sets;
        AlignedSentence oov_part;
        std::vector<HypothesisSet> oov_sent_sets;
        for (const auto& p : s.pairs) {
          HypothesisSet set{p.orig, {{p.orig, 0.0}}, HypothesisOrigin::kPassthrough};
          if (auto it = by_type.find(p.orig); it != by_type.end())
            set = {p.orig, it->second, HypothesisOrigin::kGenerator};
          if (!vocab.contains(p.orig)) {
            oov_part.pairs.push_back(p);
            oov_sent_sets.push_back(set);
          }
          sets.push_back(std::move(set));
        }
        all_sets.push_back(std::move(sets));
        oov_gold.push_back(std::move(oov_part));
        oov_sets.push_back(std::move(oov_sent_sets));
      }
      const double recall = recall_at_k(all_sets, gold, opts.recall_at);
      const double recall_oov = recall_at_k(oov_sets, oov_gold, opts.recall_at);
      out << "\nRecall@" << opts.recall_at << ": overall " << recall << " %, OOV " << recall_oov << " %\n";
      doc["recall_at_k"] = {{"k", opts.recall_at},
                            {"overall", std::isnan(recall) ? nlohmann::json(nullptr) : nlohmann::json(recall)},
                            {"oov", std::isnan(recall_oov) ? nlohmann::json(nullptr) : nlohmann::json(recall_oov)}};
    }
    if (opts.json_output) {
      auto f = open_output(*opts.json_output);
      f << doc.dump(2) << '\n';
    }
    return kExitOk;
  });
}

int cmd_encode(const EncodeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.render) {
      out << render_norm(split_whitespace(*opts.render)) << '\n';
      return kExitOk;
    }
    if (!opts.orig || !opts.norm) throw InvalidConfig("encode needs --orig and --norm, or --render");
    std::vector<std::string> orig;
    for (const auto& t : split_whitespace(*opts.orig)) orig.push_back(transliterate(t));
    for (const auto& pair : align_hunk({orig, split_whitespace(*opts.norm)}))
      out << pair.orig << '\t' << pair.norm << '\n';
    return kExitOk;
  });
}

}  // namespace histnorm::cli
