#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace histnorm {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

// One step of an edit script turning `source` into `target`. Delete consumes
// only a source character, Insert only a target character.
struct EditOp {
  EditKind kind;
  std::size_t src;  // index into source; meaningless for kInsert
  std::size_t tgt;  // index into target; meaningless for kDelete
};

// Unit-cost Levenshtein distance.
std::size_t levenshtein_distance(std::u32string_view source, std::u32string_view target);

// One optimal unit-cost edit script in left-to-right order. The backtrace
// starts at the end and prefers match, then substitution, then deletion, then
// insertion, which pushes gaps as far left as possible; the result is fully
// deterministic.
std::vector<EditOp> edit_script(std::u32string_view source, std::u32string_view target);

}  // namespace histnorm
