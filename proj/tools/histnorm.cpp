#include <CLI11.hpp>

#include <iostream>

#include "histnorm/cli.hpp"
#include "histnorm/errors.hpp"

using namespace histnorm;
using namespace histnorm::cli;

namespace {

CorpusFormat corpus_format(const std::string& name) { return parse_corpus_format(name); }

const std::vector<std::string> kCorpusFormats{"aligned_tsv", "hunk_jsonl"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Historical spelling normalization: training, normalization and evaluation"};
  app.set_config("--config", "", "Key-value configuration file (flags override it)");
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);

  // split
  SplitOptions split;
  std::string split_format = "aligned_tsv";
  std::vector<double> ratios{0.6, 0.2, 0.2};
  auto* split_cmd = app.add_subcommand("split", "Assign documents to train/dev/test");
  split_cmd->add_option("corpus", split.corpus, "Aligned corpus")->required();
  split_cmd->add_option("--format", split_format)->check(CLI::IsMember(kCorpusFormats))->capture_default_str();
  split_cmd->add_option("--ratios", ratios, "Train, dev and test share")->expected(3)->capture_default_str();
  split_cmd->add_option("--seed", split.seed)->capture_default_str();
  split_cmd->add_option("-o,--output", split.output, "Assignment TSV (default stdout)");
  split_cmd->add_option("--corpora-dir", split.corpora_dir, "Also write train/dev/test corpora here");

  // train
  TrainOptions train;
  std::string train_format = "aligned_tsv";
  bool keep_hapax = false;
  auto* train_cmd = app.add_subcommand("train", "Train lexicon, edit rules and language model");
  train_cmd->add_option("corpus", train.corpus, "Training corpus")->required();
  train_cmd->add_option("--format", train_format)->check(CLI::IsMember(kCorpusFormats))->capture_default_str();
  train_cmd->add_option("-o,--out-dir", train.out_dir, "Artifact directory")->required();
  train_cmd->add_option("--order", train.order, "n-gram order")->capture_default_str();
  train_cmd->add_option("--min-count", train.min_count, "Drop lexicon entries seen fewer times")->capture_default_str();
  train_cmd->add_flag("--keep-hapax", keep_hapax, "Do not map hapax words to <unk> in the language model");

  // normalize
  NormalizeOptions norm;
  std::string norm_in = "aligned_tsv", norm_out = "aligned_tsv", mode = "hybrid";
  auto* norm_cmd = app.add_subcommand("normalize", "Normalize a corpus");
  norm_cmd->add_option("input", norm.input, "Input corpus")->required();
  norm_cmd->add_option("--format", norm_in)->check(CLI::IsMember({"aligned_tsv", "hunk_jsonl", "tokens"}))
      ->capture_default_str();
  norm_cmd->add_option("-a,--artifacts", norm.artifacts, "Directory written by train")->required();
  norm_cmd->add_option("--alpha", norm.rerank.alpha)->capture_default_str();
  norm_cmd->add_option("--beta", norm.rerank.beta)->capture_default_str();
  norm_cmd->add_option("--beams", norm.rerank.beams)->capture_default_str();
  norm_cmd->add_option("--k", norm.rerank.k)->capture_default_str();
  norm_cmd->add_option("--mode", mode)->check(CLI::IsMember({"hybrid", "type_only", "flat_prior"}))
      ->capture_default_str();
  norm_cmd->add_option("--scorer-cmd", norm.scorer_cmd, "External scorer command");
  norm_cmd->add_option("--generator-cmd", norm.generator_cmd, "External generator command");
  norm_cmd->add_option("--timeout-ms", norm.timeout_ms)->capture_default_str();
  norm_cmd->add_option("--output-format", norm_out)->check(CLI::IsMember({"aligned_tsv", "text"}))
      ->capture_default_str();
  norm_cmd->add_option("-o,--output", norm.output, "Output file (default stdout)");

  // evaluate
  EvaluateOptions eval;
  std::string eval_format = "aligned_tsv";
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold");
  eval_cmd->add_option("predictions", eval.predictions, "Predicted corpus")->required();
  eval_cmd->add_option("gold", eval.gold, "Gold corpus")->required();
  eval_cmd->add_option("--format", eval_format)->check(CLI::IsMember(kCorpusFormats))->capture_default_str();
  eval_cmd->add_option("--train-vocab", eval.train_vocab, "vocab.txt written by train")->required();
  eval_cmd->add_option("--name", eval.system_name, "Row label")->capture_default_str();
  eval_cmd->add_flag("--baselines", eval.baselines, "Add Identity, Lexicon and Best-Theoretical-Type rows");
  eval_cmd->add_option("--lexicon", eval.lexicon, "Lexicon for the Lexicon baseline");
  eval_cmd->add_option("--recall-at", eval.recall_at, "Report generator recall at K");
  eval_cmd->add_option("-a,--artifacts", eval.artifacts, "Artifacts holding the rule model");
  eval_cmd->add_option("--generator-cmd", eval.generator_cmd, "External generator command");
  eval_cmd->add_option("--timeout-ms", eval.timeout_ms)->capture_default_str();
  eval_cmd->add_option("--json", eval.json_output, "Write the report as JSON");

  // encode
  EncodeOptions enc;
  auto* enc_cmd = app.add_subcommand("encode", "Align one hunk or render encoded tokens");
  enc_cmd->add_option("--orig", enc.orig, "Historic tokens");
  enc_cmd->add_option("--norm", enc.norm, "Target tokens");
  enc_cmd->add_option("--render", enc.render, "Encoded tokens to render");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*split_cmd) {
      split.format = corpus_format(split_format);
      split.ratios = {ratios[0], ratios[1], ratios[2]};
      return cmd_split(split, std::cout, std::cerr);
    }
    if (*train_cmd) {
      train.format = corpus_format(train_format);
      train.unk_hapax = !keep_hapax;
      return cmd_train(train, std::cout, std::cerr);
    }
    if (*norm_cmd) {
      norm.format = parse_input_format(norm_in);
      norm.output_format = parse_output_format(norm_out);
      norm.rerank.mode = parse_rerank_mode(mode);
      return cmd_normalize(norm, std::cout, std::cerr);
    }
    if (*eval_cmd) {
      eval.format = corpus_format(eval_format);
      return cmd_evaluate(eval, std::cout, std::cerr);
    }
    if (*enc_cmd) return cmd_encode(enc, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
