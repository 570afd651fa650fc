#include "histnorm/levenshtein.hpp"

#include <algorithm>
#include <cstdint>

namespace histnorm {

namespace {

// Full (n+1)x(m+1) cost table, row-major.
std::vector<uint32_t> cost_table(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size(), m = b.size(), w = m + 1;
  std::vector<uint32_t> d((n + 1) * w);
  for (std::size_t j = 0; j <= m; ++j) d[j] = static_cast<uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    d[i * w] = static_cast<uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const uint32_t diag = d[(i - 1) * w + j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u);
      d[i * w + j] = std::min({diag, d[(i - 1) * w + j] + 1, d[i * w + j - 1] + 1});
    }
  }
  return d;
}

}  // namespace

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t prev_diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({prev_diag + (a[i - 1] == b[j - 1] ? 0 : 1), up + 1, row[j - 1] + 1});
      prev_diag = up;
    }
  }
  return row[b.size()];
}

std::vector<EditOp> edit_script(std::u32string_view a, std::u32string_view b) {
  const auto d = cost_table(a, b);
  const std::size_t w = b.size() + 1;
  std::vector<EditOp> ops;
  ops.reserve(std::max(a.size(), b.size()));
  std::size_t i = a.size(), j = b.size();
  while (i > 0 || j > 0) {
    const uint32_t here = d[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = a[i - 1] == b[j - 1];
      if (d[(i - 1) * w + j - 1] + (same ? 0u : 1u) == here) {
        ops.push_back({same ? EditKind::kMatch : EditKind::kSubstitute, i - 1, j - 1});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && d[(i - 1) * w + j] + 1 == here) {
      ops.push_back({EditKind::kDelete, i - 1, j});
      --i;
      continue;
    }
    ops.push_back({EditKind::kInsert, i, j - 1});
    --j;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

}  // namespace histnorm
