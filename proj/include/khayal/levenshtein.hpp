#ifndef KHAYAL_LEVENSHTEIN_HPP
#define KHAYAL_LEVENSHTEIN_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace khayal {

struct EditCounts {
  std::size_t distance = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;  ///< symbols of b missing from a
  std::size_t deletions = 0;   ///< symbols of a missing from b
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

/// Unit-cost edit distance turning `a` into `b`, with operation counts from
/// one optimal alignment. The traceback walks back from the end and, among
/// optimal moves, prefers a diagonal step (match or substitution), then an
/// insertion, then a deletion.
template <typename T>
EditCounts levenshtein(std::span<const T> a, std::span<const T> b) {
  const std::size_t n = a.size(), m = b.size();
  const std::size_t w = m + 1;
  std::vector<std::size_t> d((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) d[i * w] = i;
  for (std::size_t j = 0; j <= m; ++j) d[j] = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = d[(i - 1) * w + j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i * w + j] = std::min({diag, d[i * w + j - 1] + 1, d[(i - 1) * w + j] + 1});
    }

  EditCounts out;
  out.distance = d[n * w + m];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = a[i - 1] == b[j - 1];
      if (d[(i - 1) * w + j - 1] + (same ? 0 : 1) == here) {
        if (!same) ++out.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && d[i * w + j - 1] + 1 == here) {
      ++out.insertions;
      --j;
    } else {
      ++out.deletions;
      --i;
    }
  }
  return out;
}

template <typename T>
EditCounts levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  return levenshtein(std::span<const T>(a), std::span<const T>(b));
}

}  // namespace khayal

#endif  // KHAYAL_LEVENSHTEIN_HPP
