#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "histnorm/errors.hpp"
#include "histnorm/external.hpp"

using namespace histnorm;
using namespace std::chrono_literals;

namespace {

std::string peer(const std::string& args) { return std::string(HISTNORM_MOCK_PEER) + " " + args; }

std::string write_table(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("histnorm_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("generator handshake and renormalization") {
  const auto table = write_table("gen.tsv", "Thorheit\tTorheit\t-0.1\nThorheit\tThorheit\t-2.4\n");
  GeneratorClient client(peer("generator --table " + table));
  CHECK(client.info().name == "mock-generator");
  CHECK(client.info().max_k == 8);

  const auto lists = generate_external(client, {"Thorheit", "Haus"}, 4);
  REQUIRE(lists.size() == 2);
  REQUIRE(lists[0].size() == 2);
  const double z = std::exp(-0.1) + std::exp(-2.4);
  CHECK(lists[0][0].norm == "Torheit");
  CHECK(std::exp(lists[0][0].logprob) == doctest::Approx(std::exp(-0.1) / z).epsilon(1e-12));
  CHECK(std::exp(lists[0][1].logprob) == doctest::Approx(std::exp(-2.4) / z).epsilon(1e-12));
  CHECK(lists[1] == std::vector<Hypothesis>{{"Haus", 0.0}});

  CHECK(generate_external(client, {}, 4).empty());
  // k caps the list.
  CHECK(generate_external(client, {"Thorheit"}, 1)[0].size() == 1);
}

TEST_CASE("generator replies are cleaned") {
  const auto table = write_table("gen_bad.tsv", "x\t░x\t-0.5\nx\ty\t-1\nx\ty\t-2\n");
  GeneratorClient client(peer("generator --table " + table));
  const auto lists = client.generate({"x"}, 4);
  // The invalid encoding and the duplicate are dropped.
  CHECK(lists[0] == std::vector<Hypothesis>{{"y", 0.0}});
  const auto empty_table = write_table("gen_invalid.tsv", "z\t░\t-0.5\n");
  GeneratorClient fallback(peer("generator --table " + empty_table));
  CHECK(fallback.generate({"z"}, 4)[0] == std::vector<Hypothesis>{{"z", 0.0}});
}

TEST_CASE("generator protocol failures") {
  SUBCASE("out of order ids") {
    GeneratorClient client(peer("generator --mode out_of_order"));
    CHECK_THROWS_AS(client.generate({"a"}, 4), ProtocolError);
    // The channel is unusable afterwards.
    CHECK_THROWS_AS(client.generate({"a"}, 4), GeneratorUnavailable);
  }
  SUBCASE("non-finite values") {
    GeneratorClient client(peer("generator --mode nan"));
    CHECK_THROWS_AS(client.generate({"a"}, 4), ProtocolError);
  }
  SUBCASE("error replies") {
    GeneratorClient client(peer("generator --mode error"));
    CHECK_THROWS_AS(client.generate({"a"}, 4), ProtocolError);
  }
  SUBCASE("garbage") {
    GeneratorClient client(peer("generator --mode garbage"));
    CHECK_THROWS_AS(client.generate({"a"}, 4), ProtocolError);
  }
  SUBCASE("process exits") {
    GeneratorClient client(peer("generator --mode die"));
    CHECK_THROWS_AS(client.generate({"a"}, 4), GeneratorUnavailable);
  }
  SUBCASE("process hangs") {
    GeneratorClient client(peer("generator --mode hang"), 300ms);
    CHECK_THROWS_AS(client.generate({"a"}, 4), TimeoutError);
  }
  SUBCASE("command does not exist") {
    CHECK_THROWS_AS(GeneratorClient("/nonexistent/generator-binary"), GeneratorUnavailable);
  }
}

TEST_CASE("scorer passthrough") {
  const auto table = write_table("score.tsv", "Das Haus ist alt\t-12.5\n");
  ScorerClient client(peer("scorer --table " + table));
  CHECK(client.info().name == "mock-scorer");
  CHECK(score_external(client, {"Das Haus ist alt"}) == std::vector<double>{-12.5});
  CHECK(score_external(client, {}).empty());
  CHECK(score_external(client, {"a b", "Das Haus ist alt", "c"}) == std::vector<double>{-2.0, -12.5, -1.0});
  CHECK_THROWS_AS(score_external(client, {"ersten▁mal"}), EncodingViolation);
}

TEST_CASE("scorer protocol failures") {
  SUBCASE("NaN") {
    ScorerClient client(peer("scorer --mode nan"));
    CHECK_THROWS_AS(client.score({"a"}), ProtocolError);
  }
  SUBCASE("out of order") {
    ScorerClient client(peer("scorer --mode out_of_order"));
    CHECK_THROWS_AS(client.score({"a"}), ProtocolError);
  }
  SUBCASE("process exits") {
    ScorerClient client(peer("scorer --mode die"));
    CHECK_THROWS_AS(client.score({"a"}), ScorerUnavailable);
  }
  SUBCASE("process hangs") {
    ScorerClient client(peer("scorer --mode hang"), 300ms);
    CHECK_THROWS_AS(client.score({"a"}), TimeoutError);
  }
}
