#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "histnorm/errors.hpp"
#include "histnorm/lm.hpp"

using namespace histnorm;

namespace {

using Sentences = std::vector<std::vector<std::string>>;

// Sum of p(w | context) over every predictable word.
double total_mass(const NgramModel& m, const std::vector<WordId>& ctx) {
  double z = 0.0;
  for (WordId w : m.predictable()) z += std::exp(m.logprob(w, ctx));
  return z;
}

}  // namespace

TEST_CASE("bigram counts") {
  const auto m = NgramModel::train({{"a", "b"}, {"a", "b"}}, {2, false});
  CHECK(m.count({"a", "b"}) == 2);
  CHECK(m.count({"a"}) == 2);
  CHECK(m.count({"<s>", "a"}) == 2);
  CHECK(m.count({"b", "</s>"}) == 2);
  // Witten-Bell: (c + T * lower) / (n + T) with one follower type of "a".
  const double lower_b = std::exp(m.logprob(m.id("b"), {}));
  const WordId a = m.id("a");
  CHECK(m.logprob(m.id("b"), std::span<const WordId>(&a, 1)) ==
        doctest::Approx(std::log((2.0 + lower_b) / 3.0)).epsilon(1e-12));
}

TEST_CASE("unigram model over four words") {
  const auto m = NgramModel::train({{"a", "b", "c", "d"}}, {1, false});
  // Five predictable events (a b c d </s>) plus <unk>, each seen once or never.
  const double seen = std::exp(m.logprob(m.id("a"), {}));
  for (const char* w : {"b", "c", "d"}) CHECK(std::exp(m.logprob(m.id(w), {})) == doctest::Approx(seen));
  CHECK(seen > std::exp(m.logprob(m.unk_id(), {})));
  CHECK(total_mass(m, {}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("short sentence with a high order") {
  const auto m = NgramModel::train({{"x"}}, {5, false});
  CHECK(std::isfinite(m.logprob_sequence({"x"})));
  CHECK(std::isfinite(m.logprob_sequence({"x", "x", "x", "x", "x", "x"})));
}

TEST_CASE("sequence scores") {
  const auto m = NgramModel::train({{"a", "b"}, {"a", "b"}, {"c", "d"}}, {2, false});
  CHECK(m.logprob_sequence({"a", "b"}) > m.logprob_sequence({"b", "a"}));
  const WordId start = m.start_id();
  CHECK(m.logprob_sequence({}) == doctest::Approx(m.logprob(m.end_id(), std::span<const WordId>(&start, 1))));
  const double unknown = m.logprob_sequence({"zz", "yy", "xx"});
  CHECK(std::isfinite(unknown));
  CHECK(unknown < 0.0);
  CHECK(m.logprob_sequence({"a"}) < 0.0);
}

TEST_CASE("hapax words map to <unk>") {
  const auto m = NgramModel::train({{"a", "b"}, {"a", "c"}});
  CHECK(m.id("b") == m.unk_id());
  CHECK(m.id("a") != m.unk_id());
  CHECK(m.logprob_sequence({"a", "b"}) == m.logprob_sequence({"a", "c"}));
  CHECK_THROWS_AS(NgramModel::train({}), EmptyTraining);
  CHECK_THROWS_AS(NgramModel::train({{"a"}}, {0, true}), InvalidConfig);
}

TEST_CASE("extension fold equals the full score") {
  const auto m = train_ngram({{"der", "Mann", "ist", "alt"}, {"der", "Mann", "ist", "jung"}, {"die", "Frau", "ist", "alt"}},
                             3);
  const std::vector<std::string> words{"der", "Frau", "ist", "unbekannt"};
  auto state = m.initial_state();
  double total = 0.0;
  auto [first, s1] = m.extend(state, "der");
  CHECK(first == m.logprob(m.id("der"), std::vector<WordId>{m.start_id()}));
  CHECK(s1.context == std::vector<WordId>{m.start_id(), m.id("der")});
  for (const auto& w : words) {
    auto [lp, next] = m.extend(state, w);
    total += lp;
    state = next;
  }
  total += m.end_logprob(state);
  CHECK(total == doctest::Approx(m.logprob_sequence(words)).epsilon(1e-12));
}

TEST_CASE("distributions sum to one") {
  Sentences corpus;
  std::mt19937 rng(11);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f", "g"};
  for (int i = 0; i < 40; ++i) {
    std::vector<std::string> s;
    for (int j = 0, n = 1 + static_cast<int>(rng() % 6); j < n; ++j) s.push_back(words[rng() % words.size()]);
    corpus.push_back(s);
  }
  const auto m = NgramModel::train(corpus, {3, true});
  const auto pred = m.predictable();
  for (int i = 0; i < 30; ++i) {
    std::vector<WordId> ctx;
    if (rng() % 3 == 0) ctx.push_back(m.start_id());
    while (ctx.size() < 2) ctx.push_back(pred[rng() % pred.size()]);
    CHECK(total_mass(m, ctx) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("repeated sentence beats its permutations") {
  const std::vector<std::string> x{"das", "ist", "ein", "Haus"};
  const auto m = NgramModel::train({x, x, x}, {3, true});
  auto perm = x;
  std::sort(perm.begin(), perm.end());
  do {
    CHECK(m.logprob_sequence(x) >= m.logprob_sequence(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("ARPA round trip") {
  const auto m = NgramModel::train({{"a", "b", "c"}, {"a", "b", "d"}, {"b", "c"}, {"a", "b", "c"}}, {3, false});
  std::ostringstream out;
  m.save_arpa(out);
  std::istringstream in(out.str());
  const auto loaded = NgramModel::load_arpa(in);
  CHECK(loaded.order() == 3);
  for (const auto& s : Sentences{{"a", "b", "c"}, {"c", "a"}, {}, {"zz"}, {"a", "b", "d", "b", "c"}})
    CHECK(loaded.logprob_sequence(s) == doctest::Approx(m.logprob_sequence(s)).epsilon(1e-9));
  std::ostringstream again;
  loaded.save_arpa(again);
  CHECK(again.str() == out.str());
  CHECK(out.str().find("\\3-grams:") != std::string::npos);

  std::istringstream truncated("\\data\\\nngram 1=1\n\n\\1-grams:\n-1\t</s>\n");
  CHECK_THROWS_AS(NgramModel::load_arpa(truncated), ParseError);
}

TEST_CASE("lm_words renders the encoding") {
  CHECK(lm_words({"Dahin░", "zu░", "schlachten", "ersten▁mal"}) ==
        std::vector<std::string>{"Dahinzuschlachten", "ersten", "mal"});
}
