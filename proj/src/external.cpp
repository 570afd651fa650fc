#include "histnorm/external.hpp"

#include <algorithm>
#include <cmath>

#include "histnorm/errors.hpp"
#include "histnorm/text.hpp"

namespace histnorm {

namespace {

PeerInfo handshake(NdjsonChannel& channel) {
  nlohmann::json reply = channel.request({{"op", "hello"}});
  PeerInfo info;
  info.raw = reply;
  if (reply.contains("name") && reply["name"].is_string()) info.name = reply["name"].get<std::string>();
  if (reply.contains("version") && reply["version"].is_string())
    info.version = reply["version"].get<std::string>();
  if (reply.contains("max_k")) {
    if (!reply["max_k"].is_number_integer() || reply["max_k"].get<int>() < 1)
      throw ProtocolError("hello reply has invalid max_k");
    info.max_k = reply["max_k"].get<int>();
  }
  return info;
}

double finite_number(const nlohmann::json& v, const char* what) {
  if (!v.is_number()) throw ProtocolError(std::string(what) + " is not a number: " + v.dump());
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ProtocolError(std::string(what) + " is not finite");
  return x;
}

}  // namespace

GeneratorClient::GeneratorClient(const std::string& command, std::chrono::milliseconds timeout)
    : channel_(command, PeerRole::kGenerator, timeout), info_(handshake(channel_)) {}

std::vector<std::vector<Hypothesis>> GeneratorClient::generate(const std::vector<std::string>& types, int k) {
  if (types.empty()) return {};
  if (k < 1) throw InvalidConfig("k must be at least 1");
  const int asked = info_.max_k > 0 ? std::min(k, info_.max_k) : k;
  nlohmann::json reply = channel_.request({{"op", "generate"}, {"types", types}, {"k", asked}});
  if (!reply.contains("hypotheses") || !reply["hypotheses"].is_array())
    throw ProtocolError("generate reply lacks a hypotheses array");
  const auto& lists = reply["hypotheses"];
  if (lists.size() != types.size())
    throw ProtocolError("generate reply has " + std::to_string(lists.size()) + " lists for " +
                        std::to_string(types.size()) + " types");

  std::vector<std::vector<Hypothesis>> out;
  out.reserve(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (!lists[i].is_array()) throw ProtocolError("hypothesis list is not an array");
    std::vector<Hypothesis> hyps;
    for (const auto& h : lists[i]) {
      if (!h.is_object() || !h.contains("norm") || !h["norm"].is_string() || !h.contains("logprob"))
        throw ProtocolError("hypothesis needs string norm and numeric logprob");
      Hypothesis hyp{h["norm"].get<std::string>(), finite_number(h["logprob"], "logprob")};
      // Strings violating the spacing encoding cannot be rendered; skip them.
      if (!is_valid_norm(hyp.norm)) continue;
      if (std::none_of(hyps.begin(), hyps.end(), [&](const Hypothesis& x) { return x.norm == hyp.norm; }))
        hyps.push_back(std::move(hyp));
    }
    std::sort(hyps.begin(), hyps.end(), [](const Hypothesis& a, const Hypothesis& b) {
      return a.logprob != b.logprob ? a.logprob > b.logprob : a.norm < b.norm;
    });
    if (hyps.size() > static_cast<std::size_t>(k)) hyps.resize(static_cast<std::size_t>(k));
    renormalize(hyps, types[i]);
    out.push_back(std::move(hyps));
  }
  return out;
}

ScorerClient::ScorerClient(const std::string& command, std::chrono::milliseconds timeout)
    : channel_(command, PeerRole::kScorer, timeout), info_(handshake(channel_)) {}

std::vector<double> ScorerClient::score(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  for (const auto& t : texts)
    if (contains_pseudo_char(t)) throw EncodingViolation("scorer input must be rendered text: \"" + t + "\"");
  nlohmann::json reply = channel_.request({{"op", "score"}, {"texts", texts}});
  if (!reply.contains("logprobs") || !reply["logprobs"].is_array())
    throw ProtocolError("score reply lacks a logprobs array");
  const auto& lps = reply["logprobs"];
  if (lps.size() != texts.size())
    throw ProtocolError("score reply has " + std::to_string(lps.size()) + " values for " +
                        std::to_string(texts.size()) + " texts");
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& v : lps) out.push_back(finite_number(v, "logprob"));
  return out;
}

}  // namespace histnorm
