#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "histnorm/corpus.hpp"
#include "histnorm/errors.hpp"
#include "histnorm/text.hpp"

using namespace histnorm;

namespace {

std::vector<TokenPair> align(std::vector<std::string> orig, std::vector<std::string> norm) {
  return align_hunk(Hunk{std::move(orig), std::move(norm)});
}

std::vector<AlignedSentence> parse_tsv(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in, CorpusFormat::kAlignedTsv);
}

std::vector<AlignedSentence> parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in, CorpusFormat::kHunkJsonl);
}

}  // namespace

TEST_CASE("transliterate") {
  CHECK(transliterate("Aufmerkſamkeit") == "Aufmerksamkeit");
  CHECK(transliterate("aͤ") == "ä");
  CHECK(transliterate("Haus") == "Haus");
  CHECK(transliterate("Uͤbel") == "Übel");
  CHECK(transliterate("oͤſterreichiſch") == "österreichisch");
  // Vowels without an umlaut keep the combining e.
  CHECK(transliterate("eͤ") == "eͤ");
  // NFC composes decomposed input.
  CHECK(transliterate("Müller") == "Müller");
  for (std::string s : {"Aufmerkſamkeit", "aͤuͤ", "Müller", "eͤ"})
    CHECK(transliterate(transliterate(s)) == transliterate(s));
}

TEST_CASE("align_hunk spacing encoding") {
  CHECK(align({"erstenmal"}, {"ersten", "mal"}) == std::vector<TokenPair>{{"erstenmal", "ersten▁mal"}});
  CHECK(align({"irgend", "ein"}, {"irgendein"}) == std::vector<TokenPair>{{"irgend", "irgend░"}, {"ein", "ein"}});
  CHECK(align({"Zum"}, {"Zum"}) == std::vector<TokenPair>{{"Zum", "Zum"}});
  CHECK(align({"widert’s"}, {"widert", "es"}) == std::vector<TokenPair>{{"widert’s", "widert▁es"}});
  CHECK(align({"Dahin", "zu", "schlachten"}, {"Dahinzuschlachten"}) ==
        std::vector<TokenPair>{{"Dahin", "Dahin░"}, {"zu", "zu░"}, {"schlachten", "schlachten"}});
  CHECK(align({"Thorheit"}, {"Torheit"}) == std::vector<TokenPair>{{"Thorheit", "Torheit"}});
}

TEST_CASE("align_hunk keeps counts and renders back") {
  const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> cases = {
      {{"so", "viel"}, {"soviel"}},
      {{"zu", "Hause"}, {"zuhause"}},
      {{"a", "b", "c"}, {"abc"}},
      {{"abc"}, {"a", "b", "c"}},
      {{"xy", "z"}, {"x", "yz"}},
      {{"Gott", "lob"}, {"gottlob"}},
      {{"ab"}, {"completely", "different", "words"}},
  };
  for (const auto& [orig, norm] : cases) {
    const auto pairs = align(orig, norm);
    REQUIRE(pairs.size() == orig.size());
    std::vector<std::string> norms;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(pairs[i].orig == orig[i]);
      CHECK(is_valid_norm(pairs[i].norm));
      norms.push_back(pairs[i].norm);
    }
    CHECK(render_norm(norms) == join(norm, " "));
  }
}

TEST_CASE("align_hunk degenerate input") {
  CHECK_THROWS_AS(align({}, {"a"}), AlignmentDegenerate);
  CHECK_THROWS_AS(align({"a"}, {}), AlignmentDegenerate);
  CHECK_THROWS_AS(align({""}, {"a"}), AlignmentDegenerate);
  // Three historic tokens cannot share two target characters.
  CHECK_THROWS_AS(align({"a", "b", "c"}, {"xy"}), AlignmentDegenerate);
}

TEST_CASE("render_norm") {
  CHECK(render_norm({"ersten▁mal"}) == "ersten mal");
  CHECK(render_norm({"Dahin░", "zu░", "schlachten"}) == "Dahinzuschlachten");
  CHECK(render_norm({"Haus"}) == "Haus");
  CHECK(render_norm({}) == "");
  CHECK_THROWS_AS(render_norm({"▁Haus"}), EncodingViolation);
  CHECK_THROWS_AS(render_norm({"Ha░us"}), EncodingViolation);
  CHECK_THROWS_AS(render_norm({"Ha▁▁us"}), EncodingViolation);
  CHECK_THROWS_AS(render_norm({"░"}), EncodingViolation);
}

TEST_CASE("parse aligned_tsv") {
  const auto sents = parse_tsv(
      "#doc d1 work1 1809\n"
      "Die\tDie\n"
      "Freyheit\tFreiheit\n"
      "\n"
      "erſtenmal\tersten▁mal\n"
      ".\t.\n"
      "\n");
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].pairs.size() == 2);
  CHECK(sents[1].pairs.size() == 2);
  CHECK(sents[1].pairs[0] == TokenPair{"erstenmal", "ersten▁mal"});
  CHECK(sents[0].doc_id == "d1");
  CHECK(sents[0].group_key == "work1");
  CHECK(sents[0].year == 1809);

  CHECK(parse_tsv("").empty());

  SUBCASE("flags") {
    const auto flagged = parse_tsv("#doc d1\nBey\tBei\tforeign;ocr_error\n");
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0].excluded);
    CHECK(flagged[0].group_key == "d1");
  }
  SUBCASE("malformed line") {
    try {
      parse_tsv("#doc d1\nHaus\tHaus\na\tb\tc\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("pseudo-character on the orig side") {
    CHECK_THROWS_AS(parse_tsv("#doc d1\nHa▁us\tHaus\n"), EncodingViolation);
  }
  SUBCASE("bad norm encoding") {
    CHECK_THROWS(parse_tsv("#doc d1\nHaus\t░Haus\n"));
  }
}

TEST_CASE("parse hunk_jsonl") {
  const auto sents = parse_jsonl(
      R"({"doc":"d1","year":1800,"orig":["irgend","ein"],"norm":["irgendein"]})"
      "\n"
      R"({"doc":"d1","orig":["Mann"],"norm":["Mann"]})"
      "\n"
      R"({"sent_break":true})"
      "\n"
      R"({"doc":"d1","orig":["erſtenmal"],"norm":["ersten","mal"],"flags":["poetry"]})"
      "\n");
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].pairs ==
        std::vector<TokenPair>{{"irgend", "irgend░"}, {"ein", "ein"}, {"Mann", "Mann"}});
  CHECK(sents[0].year == 1800);
  CHECK(sents[1].pairs == std::vector<TokenPair>{{"erstenmal", "ersten▁mal"}});
  CHECK(sents[1].excluded);
  CHECK_THROWS_AS(parse_jsonl("{not json}\n"), ParseError);
  CHECK_THROWS_AS(parse_jsonl(R"({"doc":"d","orig":[],"norm":["x"]})" "\n"), ParseError);
}

TEST_CASE("aligned_tsv round trip") {
  const std::string text =
      "#doc d1 w 1790\nirgend\tirgend░\nein\tein\n\n#doc d2 w2 1810\nHaus\tHaus\tpoetry\n\n";
  const auto sents = parse_tsv(text);
  std::ostringstream out;
  write_aligned_tsv(out, sents);
  const auto again = parse_tsv(out.str());
  REQUIRE(again.size() == sents.size());
  for (std::size_t i = 0; i < sents.size(); ++i) {
    CHECK(again[i].pairs == sents[i].pairs);
    CHECK(again[i].doc_id == sents[i].doc_id);
    CHECK(again[i].group_key == sents[i].group_key);
    CHECK(again[i].year == sents[i].year);
    CHECK(again[i].excluded == sents[i].excluded);
  }
}

TEST_CASE("filter_sentences") {
  AlignedSentence a, b, c;
  a.pairs = b.pairs = c.pairs = {{"x", "x"}};
  b.excluded = true;
  CHECK(filter_sentences({a, b, c}).size() == 2);
  CHECK(filter_sentences({a, c}).size() == 2);
  c.excluded = a.excluded = true;
  CHECK(filter_sentences({a, b, c}).empty());
}

TEST_CASE("build_splits") {
  const SplitRatios ratios;
  SUBCASE("single document goes to train") {
    const auto out = build_splits({{"only", "only", 1800, 10}}, ratios, 1);
    REQUIRE(out.size() == 1);
    CHECK(out[0].split == Split::kTrain);
  }
  SUBCASE("too few groups") {
    CHECK_THROWS_AS(build_splits({{"a", "a", 1800, 10}, {"b", "b", 1800, 10}}, ratios, 1), InfeasibleSplit);
    CHECK_THROWS_AS(build_splits({}, ratios, 1), InfeasibleSplit);
  }
  SUBCASE("invalid ratios") {
    CHECK_THROWS_AS(build_splits({{"a", "a", 1800, 10}}, SplitRatios{0.5, 0.2, 0.2}, 1), InvalidConfig);
    CHECK_THROWS_AS(build_splits({{"a", "a", 1800, 10}}, SplitRatios{1.0, 0.0, 0.0}, 1), InvalidConfig);
  }
  SUBCASE("volumes of one work stay together") {
    for (uint64_t seed = 0; seed < 25; ++seed) {
      std::vector<DocumentInfo> docs;
      for (int i = 0; i < 17; ++i) docs.push_back({"d" + std::to_string(i), "g" + std::to_string(i), 1700 + 7 * i, 100});
      for (int v = 0; v < 3; ++v) docs.push_back({"vol" + std::to_string(v), "work", 1750, 100});
      const auto out = build_splits(docs, ratios, seed);
      std::set<Split> seen;
      for (const auto& a : out)
        if (a.group_key == "work") seen.insert(a.split);
      CHECK(seen.size() == 1);
    }
  }
  SUBCASE("50 equal groups land within 5pp of the ratios") {
    std::vector<DocumentInfo> docs;
    for (int i = 0; i < 50; ++i) docs.push_back({"d" + std::to_string(i), "g" + std::to_string(i), 1600 + 6 * i, 1000});
    for (uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = build_splits(docs, ratios, seed);
      std::array<double, 3> share{};
      for (const auto& a : out) share[static_cast<std::size_t>(a.split)] += 1.0 / 50.0;
      CHECK(std::abs(share[0] - 0.6) <= 0.05);
      CHECK(std::abs(share[1] - 0.2) <= 0.05);
      CHECK(std::abs(share[2] - 0.2) <= 0.05);
    }
  }
  SUBCASE("deterministic for a seed") {
    std::vector<DocumentInfo> docs;
    std::mt19937 rng(3);
    for (int i = 0; i < 30; ++i)
      docs.push_back({"d" + std::to_string(i), "g" + std::to_string(i % 20), 1600 + static_cast<int>(rng() % 300),
                      1 + rng() % 500});
    const auto a = build_splits(docs, ratios, 42);
    const auto b = build_splits(docs, ratios, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].doc_id == b[i].doc_id);
      CHECK(a[i].split == b[i].split);
    }
  }
}

TEST_CASE("decade buckets") {
  CHECK(decade_bucket(1809) == 1800);
  CHECK(decade_bucket(1800) == 1800);
  CHECK(decade_bucket(1799) == 1790);
}
