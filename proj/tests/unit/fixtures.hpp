#pragma once

#include <string>
#include <utility>
#include <vector>

#include "histnorm/corpus.hpp"

namespace histnorm::testing {

// One sentence from (orig, norm) pairs.
inline AlignedSentence sentence(std::vector<std::pair<std::string, std::string>> pairs, std::string doc = "doc") {
  AlignedSentence s;
  for (auto& [o, n] : pairs) s.pairs.push_back({std::move(o), std::move(n)});
  s.doc_id = s.group_key = std::move(doc);
  return s;
}

// Identity pairs from whitespace-separated text.
inline AlignedSentence identity_sentence(const std::string& text) {
  AlignedSentence s;
  std::string word;
  for (char c : text + " ") {
    if (c == ' ') {
      if (!word.empty()) s.pairs.push_back({word, word});
      word.clear();
    } else {
      word += c;
    }
  }
  s.doc_id = s.group_key = "doc";
  return s;
}

}  // namespace histnorm::testing
