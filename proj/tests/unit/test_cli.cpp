#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "histnorm/cli.hpp"

using namespace histnorm;
using namespace histnorm::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("histnorm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kTrain =
    "#doc d1 w1 1800\n"
    "Die\tDie\n"
    "Freyheit\tFreiheit\n"
    "iſt\tist\n"
    "theuer\tteuer\n"
    ".\t.\n"
    "\n"
    "#doc d2 w2 1810\n"
    "Bey\tBei\n"
    "uns\tuns\n"
    "iſt\tist\n"
    "die\tdie\n"
    "Freyheit\tFreiheit\n"
    "\n"
    "Das\tDas\n"
    "Haus\tHaus\n"
    "iſt\tist\n"
    "alt\talt\n"
    "\n";

}  // namespace

TEST_CASE("split command") {
  const auto dir = scratch("split");
  std::ostringstream corpus;
  for (int d = 0; d < 52; ++d) corpus << "#doc doc" << d << " g" << d << ' ' << 1700 + 3 * d << "\nHaus\tHaus\n\n";
  write(dir / "corpus.tsv", corpus.str());

  SplitOptions opts;
  opts.corpus = dir / "corpus.tsv";
  opts.corpora_dir = dir / "parts";
  std::ostringstream out, err;
  REQUIRE(cmd_split(opts, out, err) == kExitOk);
  std::map<std::string, int> per_split;
  std::istringstream lines(out.str());
  std::string id, split;
  while (lines >> id >> split) ++per_split[split];
  CHECK(per_split.size() == 3);
  CHECK(per_split["train"] + per_split["dev"] + per_split["test"] == 52);
  CHECK(fs::exists(dir / "parts" / "dev.tsv"));

  std::ostringstream again;
  cmd_split(opts, again, err);
  CHECK(again.str() == out.str());

  SUBCASE("single document") {
    write(dir / "one.tsv", "#doc only\nHaus\tHaus\n");
    SplitOptions one;
    one.corpus = dir / "one.tsv";
    std::ostringstream o, e;
    CHECK(cmd_split(one, o, e) == kExitOk);
    CHECK(o.str() == "only\ttrain\n");
    CHECK(e.str().find("warning") != std::string::npos);
  }
  SUBCASE("bad ratios") {
    SplitOptions bad = opts;
    bad.ratios = {0.5, 0.2, 0.2};
    std::ostringstream o, e;
    CHECK(cmd_split(bad, o, e) == kExitInput);
  }
  SUBCASE("two groups") {
    write(dir / "two.tsv", "#doc a\nx\tx\n\n#doc b\ny\ty\n");
    SplitOptions two;
    two.corpus = dir / "two.tsv";
    std::ostringstream o, e;
    CHECK(cmd_split(two, o, e) == kExitInput);
  }
}

TEST_CASE("train command") {
  const auto dir = scratch("train");
  write(dir / "train.tsv", kTrain);
  TrainOptions opts;
  opts.corpus = dir / "train.tsv";
  opts.out_dir = dir / "model";
  std::ostringstream out, err;
  REQUIRE(cmd_train(opts, out, err) == kExitOk);
  for (const char* f : {kLexiconFile, kRulesFile, kLanguageModelFile, kVocabFile}) CHECK(fs::exists(opts.out_dir / f));
  CHECK(out.str().find("sentences:") != std::string::npos);
  CHECK(out.str().find("token pairs:          14") != std::string::npos);
  CHECK(read(opts.out_dir / kLexiconFile).find("ist\tist\t3\n") != std::string::npos);

  // Artifacts are reproducible byte for byte.
  TrainOptions again = opts;
  again.out_dir = dir / "model2";
  std::ostringstream o2, e2;
  REQUIRE(cmd_train(again, o2, e2) == kExitOk);
  for (const char* f : {kLexiconFile, kRulesFile, kLanguageModelFile, kVocabFile})
    CHECK(read(opts.out_dir / f) == read(again.out_dir / f));

  write(dir / "empty.tsv", "");
  TrainOptions empty = opts;
  empty.corpus = dir / "empty.tsv";
  CHECK(cmd_train(empty, o2, e2) == kExitInput);

  write(dir / "broken.tsv", "#doc d\na\tb\tc\n");
  TrainOptions broken = opts;
  broken.corpus = dir / "broken.tsv";
  CHECK(cmd_train(broken, o2, e2) == kExitInput);
}

TEST_CASE("normalize command") {
  const auto dir = scratch("normalize");
  write(dir / "train.tsv", "#doc d\nDas\tDas\nHaus\tHaus\nist\tist\nalt\talt\n\nDas\tDas\nist\tist\n");
  TrainOptions train;
  train.corpus = dir / "train.tsv";
  train.out_dir = dir / "model";
  std::ostringstream sink, err;
  REQUIRE(cmd_train(train, sink, err) == kExitOk);

  write(dir / "input.txt", "Das Haus iſt alt\nDas Zimmer iſt neu .\n");
  NormalizeOptions opts;
  opts.input = dir / "input.txt";
  opts.format = InputFormat::kTokens;
  opts.artifacts = train.out_dir;

  SUBCASE("identity artifacts copy the transliterated input") {
    opts.output_format = OutputFormat::kText;
    std::ostringstream out, e;
    REQUIRE(cmd_normalize(opts, out, e) == kExitOk);
    CHECK(out.str() == "Das Haus ist alt\nDas Zimmer ist neu .\n");
  }
  SUBCASE("aligned output keeps token counts") {
    std::ostringstream out, e;
    REQUIRE(cmd_normalize(opts, out, e) == kExitOk);
    CHECK(out.str().find("Zimmer\tZimmer\n") != std::string::npos);
    CHECK(out.str().find("ist\tist\n") != std::string::npos);
  }
  SUBCASE("type_only never starts the scorer") {
    opts.rerank.mode = RerankMode::kTypeOnly;
    opts.scorer_cmd = std::string(HISTNORM_MOCK_PEER) + " scorer --mode die";
    std::ostringstream out, e;
    CHECK(cmd_normalize(opts, out, e) == kExitOk);
    opts.scorer_cmd = "/nonexistent/scorer";
    CHECK(cmd_normalize(opts, out, e) == kExitOk);
  }
  SUBCASE("external failures exit with 3") {
    opts.scorer_cmd = std::string(HISTNORM_MOCK_PEER) + " scorer --mode nan";
    std::ostringstream out, e;
    CHECK(cmd_normalize(opts, out, e) == kExitExternal);
    opts.scorer_cmd.reset();
    opts.generator_cmd = std::string(HISTNORM_MOCK_PEER) + " generator --mode out_of_order";
    CHECK(cmd_normalize(opts, out, e) == kExitExternal);
  }
  SUBCASE("external peers") {
    opts.scorer_cmd = std::string(HISTNORM_MOCK_PEER) + " scorer --arpa " + (train.out_dir / kLanguageModelFile).string();
    opts.generator_cmd = std::string(HISTNORM_MOCK_PEER) + " generator";
    opts.output_format = OutputFormat::kText;
    std::ostringstream out, e;
    REQUIRE(cmd_normalize(opts, out, e) == kExitOk);
    CHECK(out.str() == "Das Haus ist alt\nDas Zimmer ist neu .\n");
  }
  SUBCASE("missing artifacts") {
    opts.artifacts = dir / "nowhere";
    std::ostringstream out, e;
    CHECK(cmd_normalize(opts, out, e) == kExitInput);
  }
}

TEST_CASE("evaluate command") {
  const auto dir = scratch("evaluate");
  write(dir / "gold.tsv", "#doc d\nDie\tDie\nFreyheit\tFreiheit\nBey\tBei\n,\t,\nuns\tuns\n");
  write(dir / "pred.tsv", "#doc d\nDie\tDie\nFreyheit\tFreyheit\nBey\tBey\n,\t,\nuns\tuns\n");
  write(dir / "vocab.txt", "Die\nFreyheit\n");
  write(dir / "lexicon.tsv", "Freyheit\tFreiheit\t1\n");
  EvaluateOptions opts;
  opts.gold = dir / "gold.tsv";
  opts.train_vocab = dir / "vocab.txt";

  SUBCASE("perfect predictions") {
    opts.predictions = dir / "gold.tsv";
    opts.json_output = dir / "report.json";
    std::ostringstream out, e;
    REQUIRE(cmd_evaluate(opts, out, e) == kExitOk);
    const auto report = nlohmann::json::parse(read(dir / "report.json"));
    CHECK(report["systems"]["System"]["word_acc"]["overall"] == 100.0);
    CHECK(report["systems"]["System"]["word_acc"]["oov"] == 100.0);
  }
  SUBCASE("two errors") {
    opts.predictions = dir / "pred.tsv";
    opts.baselines = true;
    opts.lexicon = dir / "lexicon.tsv";
    opts.json_output = dir / "report.json";
    std::ostringstream out, e;
    REQUIRE(cmd_evaluate(opts, out, e) == kExitOk);
    const auto report = nlohmann::json::parse(read(dir / "report.json"));
    const auto& sys = report["systems"]["System"];
    CHECK(sys["word_acc"]["overall"] == 50.0);
    CHECK(sys["word_acc"]["invocab"] == 50.0);
    CHECK(sys["word_acc"]["oov"] == 50.0);
    CHECK(sys["n_tokens"] == 4);
    CHECK(report["systems"]["Lexicon"]["word_acc"]["overall"] == 75.0);
    CHECK(report["systems"]["Best-Theoretical-Type"]["word_acc"]["overall"] == 100.0);
    CHECK(out.str().find("Identity") != std::string::npos);
  }
  SUBCASE("recall") {
    TrainOptions train;
    train.corpus = dir / "gold.tsv";
    train.out_dir = dir / "model";
    std::ostringstream o, e;
    REQUIRE(cmd_train(train, o, e) == kExitOk);
    opts.predictions = dir / "gold.tsv";
    opts.recall_at = 4;
    opts.artifacts = train.out_dir;
    opts.json_output = dir / "report.json";
    REQUIRE(cmd_evaluate(opts, o, e) == kExitOk);
    const auto report = nlohmann::json::parse(read(dir / "report.json"));
    CHECK(report["recall_at_k"]["k"] == 4);
    CHECK(report["recall_at_k"]["overall"].get<double>() > 0.0);
  }
  SUBCASE("misaligned predictions") {
    write(dir / "short.tsv", "#doc d\nDie\tDie\nFreyheit\tFreiheit\n");
    opts.predictions = dir / "short.tsv";
    std::ostringstream out, e;
    CHECK(cmd_evaluate(opts, out, e) == kExitInput);
  }
  SUBCASE("missing vocabulary") {
    opts.predictions = dir / "gold.tsv";
    opts.train_vocab = dir / "missing.txt";
    std::ostringstream out, e;
    CHECK(cmd_evaluate(opts, out, e) == kExitInput);
  }
}

TEST_CASE("encode command") {
  EncodeOptions opts;
  opts.orig = "Dahin zu ſchlachten";
  opts.norm = "Dahinzuschlachten";
  std::ostringstream out, err;
  REQUIRE(cmd_encode(opts, out, err) == kExitOk);
  CHECK(out.str() == "Dahin\tDahin░\nzu\tzu░\nschlachten\tschlachten\n");

  EncodeOptions render;
  render.render = "ersten▁mal irgend░ ein";
  std::ostringstream r;
  REQUIRE(cmd_encode(render, r, err) == kExitOk);
  CHECK(r.str() == "ersten mal irgendein\n");

  EncodeOptions bad;
  bad.render = "░x";
  CHECK(cmd_encode(bad, r, err) == kExitInput);
}
