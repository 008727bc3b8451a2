#pragma once

// Reference implementations used only by tests. They follow the textbook
// definitions directly and share no code with include/clear/.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace clear::oracle {

// Full (n+1)x(m+1) Wagner-Fischer table.
inline std::size_t levenshtein_full_matrix(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
  return d[a.size()][b.size()];
}

// Jaro similarity from its definition: characters match when equal and no
// further apart than floor(max(|a|,|b|)/2) - 1; t is half the number of
// matched characters that appear in a different order.
inline double jaro_formula(const std::u32string& a, const std::u32string& b) {
  if (a == b) return 1.0;
  const long la = static_cast<long>(a.size()), lb = static_cast<long>(b.size());
  const long window = std::max(0L, std::max(la, lb) / 2 - 1);
  std::vector<bool> used_b(b.size(), false);
  std::vector<long> matched_a;
  for (long i = 0; i < la; ++i) {
    for (long j = std::max(0L, i - window); j <= std::min(lb - 1, i + window); ++j) {
      if (!used_b[static_cast<std::size_t>(j)] && a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)]) {
        used_b[static_cast<std::size_t>(j)] = true;
        matched_a.push_back(i);
        break;
      }
    }
  }
  const double m = static_cast<double>(matched_a.size());
  if (m == 0) return 0.0;
  std::u32string seq_a, seq_b;
  for (long i : matched_a) seq_a += a[static_cast<std::size_t>(i)];
  for (long j = 0; j < lb; ++j)
    if (used_b[static_cast<std::size_t>(j)]) seq_b += b[static_cast<std::size_t>(j)];
  double mismatched = 0;
  for (std::size_t k = 0; k < seq_a.size(); ++k) mismatched += seq_a[k] != seq_b[k] ? 1 : 0;
  const double t = mismatched / 2.0;
  return (m / static_cast<double>(la) + m / static_cast<double>(lb) + (m - t) / m) / 3.0;
}

inline double jaro_winkler_formula(const std::u32string& a, const std::u32string& b) {
  const double j = jaro_formula(a, b);
  std::size_t l = 0;
  while (l < a.size() && l < b.size() && l < 4 && a[l] == b[l]) ++l;
  return j + static_cast<double>(l) * 0.1 * (1.0 - j);
}

}  // namespace clear::oracle
