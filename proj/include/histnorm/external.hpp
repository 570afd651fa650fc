#pragma once

// Clients for external hypothesis generators and sentence scorers that speak
// the NDJSON protocol over a subprocess. One in-flight request per client;
// a client must not be shared between threads.

#include <chrono>
#include <string>
#include <vector>

#include "histnorm/hypgen.hpp"
#include "histnorm/lm.hpp"
#include "histnorm/subprocess.hpp"

namespace histnorm {

struct PeerInfo {
  std::string name;
  std::string version;
  int max_k = 0;  // generators only; 0 when not reported
  nlohmann::json raw;
};

inline constexpr std::chrono::milliseconds kDefaultPeerTimeout{30000};

class GeneratorClient final : public HypothesisGenerator {
 public:
  // Starts the process and performs the hello handshake.
  explicit GeneratorClient(const std::string& command,
                           std::chrono::milliseconds timeout = kDefaultPeerTimeout);

  const PeerInfo& info() const { return info_; }
  std::vector<std::vector<Hypothesis>> generate(const std::vector<std::string>& types, int k) override;

 private:
  NdjsonChannel channel_;
  PeerInfo info_;
};

inline std::vector<std::vector<Hypothesis>> generate_external(GeneratorClient& client,
                                                              const std::vector<std::string>& types, int k) {
  return client.generate(types, k);
}

class ScorerClient final : public SentenceScorer {
 public:
  explicit ScorerClient(const std::string& command, std::chrono::milliseconds timeout = kDefaultPeerTimeout);

  const PeerInfo& info() const { return info_; }
  // Texts must be rendered plain text without pseudo-characters.
  std::vector<double> score(const std::vector<std::string>& texts) override;

 private:
  NdjsonChannel channel_;
  PeerInfo info_;
};

inline std::vector<double> score_external(ScorerClient& client, const std::vector<std::string>& texts) {
  return client.score(texts);
}

}  // namespace histnorm
