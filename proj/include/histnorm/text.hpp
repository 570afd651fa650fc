#pragma once

// UTF-8 helpers and the spacing pseudo-characters used on the target side.

#include <string>
#include <string_view>
#include <vector>

namespace histnorm {

// U+2581 LOWER ONE EIGHTH BLOCK: in-token split point, rendered as a space.
inline constexpr char32_t kSplitChar = U'▁';
// U+2591 LIGHT SHADE: token-final join marker, merges with the next token.
inline constexpr char32_t kJoinChar = U'░';
inline constexpr std::string_view kSplitMark = "\xE2\x96\x81";
inline constexpr std::string_view kJoinMark = "\xE2\x96\x91";

std::u32string to_codepoints(std::string_view utf8);
std::string to_utf8(std::u32string_view cps);
std::string to_utf8(char32_t cp);

bool is_pseudo_char(char32_t cp) noexcept;
bool contains_pseudo_char(std::string_view utf8);

// Checks the target-side placement rules: the join mark only token-finally
// and at most once; the split mark never at either edge and never doubled.
bool is_valid_norm(std::string_view utf8);
// Throws EncodingViolation with a reason when is_valid_norm() would fail.
void validate_norm(std::string_view utf8);
// Orig-side tokens must be non-empty and free of pseudo-characters.
void validate_orig(std::string_view utf8);

// True iff the token is non-empty and every code point has general category P*.
bool is_punctuation_token(std::string_view utf8);

// True iff a and b form a simple case pair (ß and capital sharp s included).
bool is_case_pair(char32_t a, char32_t b) noexcept;

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split_on(std::string_view s, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace histnorm
