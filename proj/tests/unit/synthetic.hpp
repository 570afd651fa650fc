#pragma once

// Seeded synthetic parallel corpus with historic spelling patterns
// (ey/ei, th/t, ſ, joins and splits) over a small German vocabulary.

#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "histnorm/corpus.hpp"

namespace histnorm::synthetic {

struct Word {
  const char* orig;
  const char* norm;
};

inline const std::vector<Word>& words() {
  static const std::vector<Word> w = {
      {"Die", "Die"},         {"Freyheit", "Freiheit"}, {"iſt", "ist"},        {"theuer", "teuer"},
      {"Bey", "Bei"},         {"uns", "uns"},          {"Thür", "Tür"},        {"Theil", "Teil"},
      {"ſeyn", "sein"},       {"Haus", "Haus"},        {"alt", "alt"},        {"giebt", "gibt"},
      {"Noth", "Not"},        {"muß", "muss"},         {"daß", "dass"},       {"Brodt", "Brot"},
      {"erſtenmal", "ersten▁mal"}, {"irgend", "irgend░"}, {"ein", "ein"},      {"Mann", "Mann"},
      {"Zeyt", "Zeit"},       {"thun", "tun"},         {"Seyte", "Seite"},    {"Urtheil", "Urteil"},
      {"wehrt", "wert"},      {"ſich", "sich"},        {"der", "der"},        {"und", "und"},
      {",", ","},             {".", "."},
  };
  return w;
}

inline std::vector<AlignedSentence> corpus(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<AlignedSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    AlignedSentence s;
    s.doc_id = s.group_key = "doc" + std::to_string(i / 10);
    s.year = 1700 + static_cast<int>(i % 200);
    const std::size_t len = 3 + rng() % 8;
    for (std::size_t j = 0; j < len; ++j) {
      const auto& w = words()[rng() % words().size()];
      const auto& v = words()[rng() % words().size()];
      const std::string wo = w.orig, wn = w.norm, vo = v.orig, vn = v.norm;
      // Occasional compounds give a long tail of rare types.
      const bool plain = wn.find("\xE2\x96") == std::string::npos && vn.find("\xE2\x96") == std::string::npos &&
                         std::isalpha(static_cast<unsigned char>(wo[0])) && std::islower(static_cast<unsigned char>(vo[0]));
      if (plain && rng() % 5 == 0) {
        s.pairs.push_back({transliterate(wo + vo), wn + vn});
      } else {
        s.pairs.push_back({transliterate(wo), wn});
      }
    }
    // A trailing join needs a following token.
    if (s.pairs.back().norm.ends_with("░")) s.pairs.push_back({"Mann", "Mann"});
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace histnorm::synthetic
