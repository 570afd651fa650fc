#include "histnorm/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

#include "histnorm/errors.hpp"

namespace histnorm {

std::u32string to_codepoints(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, static_cast<UChar32>(cp));
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

std::string to_utf8(char32_t cp) { return to_utf8(std::u32string_view(&cp, 1)); }

bool is_pseudo_char(char32_t cp) noexcept { return cp == kSplitChar || cp == kJoinChar; }

bool contains_pseudo_char(std::string_view utf8) {
  return utf8.find(kSplitMark) != std::string_view::npos ||
         utf8.find(kJoinMark) != std::string_view::npos;
}

namespace {

const char* norm_violation(std::u32string_view cps) {
  if (cps.empty()) return "empty normalization";
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] == kJoinChar && i + 1 != cps.size()) return "join mark not in final position";
    if (cps[i] == kSplitChar) {
      if (i == 0) return "split mark in initial position";
      if (i + 1 == cps.size()) return "split mark in final position";
      if (cps[i + 1] == kSplitChar) return "adjacent split marks";
      if (cps[i + 1] == kJoinChar) return "split mark before the join mark";
    }
  }
  // A lone join mark has nothing to join.
  if (cps.size() == 1 && cps[0] == kJoinChar) return "join mark without content";
  return nullptr;
}

}  // namespace

bool is_valid_norm(std::string_view utf8) { return norm_violation(to_codepoints(utf8)) == nullptr; }

void validate_norm(std::string_view utf8) {
  if (const char* why = norm_violation(to_codepoints(utf8)))
    throw EncodingViolation(std::string(why) + ": \"" + std::string(utf8) + "\"");
}

void validate_orig(std::string_view utf8) {
  if (utf8.empty()) throw EncodingViolation("empty historic token");
  if (contains_pseudo_char(utf8))
    throw EncodingViolation("pseudo-character in historic token \"" + std::string(utf8) + "\"");
}

bool is_punctuation_token(std::string_view utf8) {
  if (utf8.empty()) return false;
  for (char32_t cp : to_codepoints(utf8))
    if (!u_ispunct(static_cast<UChar32>(cp))) return false;
  return true;
}

bool is_case_pair(char32_t a, char32_t b) noexcept {
  if (a == b) return false;
  const auto ua = static_cast<UChar32>(a);
  const auto ub = static_cast<UChar32>(b);
  if (u_tolower(ua) == ub || u_toupper(ua) == ub) return true;
  if (u_tolower(ub) == ua || u_toupper(ub) == ua) return true;
  // ß has no simple uppercase mapping in the default tables.
  return (a == U'ß' && b == U'ẞ') || (a == U'ẞ' && b == U'ß');
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\n' || s[j] == '\r')) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split_on(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace histnorm
