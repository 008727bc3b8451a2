#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clear/textproc.hpp"
#include "clear/unicode.hpp"

namespace clear {

// Flesch formulas over raw counts; split out so tests can inject syllable
// counts independently of the heuristic.
inline std::optional<double> flesch_reading_ease(double words, double sentences, double syllables) {
  if (words <= 0 || sentences <= 0) return std::nullopt;
  return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
}

inline std::optional<double> flesch_kincaid_grade(double words, double sentences, double syllables) {
  if (words <= 0 || sentences <= 0) return std::nullopt;
  return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

struct LexicalProfile {
  long char_count = 0;
  long letter_count = 0;
  long digit_count = 0;
  long word_count = 0;
  long sentence_count = 0;
  long syllable_count = 0;
  std::optional<double> avg_word_length;  // letters per word
  std::optional<double> avg_sentence_length;  // non-whitespace characters per sentence
  std::optional<double> avg_words_per_sentence;
  std::optional<double> ttr;
  std::optional<double> flesch_reading_ease;
  std::optional<double> flesch_kincaid_grade;
  long count1to3 = 0;
  long count4to6 = 0;
  long count7to10 = 0;
  long count10plus = 0;
  long length = 0;  // alias of char_count for reporting
};

// Sentences default to native segmentation; pass `sentence_spans` (byte
// offsets) to use externally supplied boundaries instead.
inline LexicalProfile lexical_profile(std::string_view text, Language lang,
                                      std::optional<std::span<const Span>> sentence_spans = std::nullopt,
                                      const AbbreviationList& abbreviations = {}) {
  LexicalProfile p;
  p.char_count = static_cast<long>(unicode::count_code_points_rtrim(text));
  p.length = p.char_count;
  long nonspace = 0;
  for (std::size_t i = 0; i < text.size();) {
    auto d = unicode::decode_at(text, i);
    if (unicode::is_letter(d.cp)) ++p.letter_count;
    if (unicode::is_digit(d.cp)) ++p.digit_count;
    if (!unicode::is_space(d.cp)) ++nonspace;
    i = d.next;
  }

  std::vector<std::vector<Token>> sentence_tokens;
  if (sentence_spans) {
    for (const auto& s : *sentence_spans) sentence_tokens.push_back(tokenize(s.slice(text), s.start));
  } else {
    for (auto& s : segment_sentences(text, abbreviations)) sentence_tokens.push_back(std::move(s.tokens));
  }
  p.sentence_count = static_cast<long>(sentence_tokens.size());

  std::set<std::string> types;
  long word_letters = 0;
  for (const auto& toks : sentence_tokens) {
    for (const auto& t : toks) {
      if (!t.is_word) continue;
      ++p.word_count;
      for (char32_t c : unicode::to_u32(t.surface)) word_letters += unicode::is_letter(c) ? 1 : 0;
      types.insert(normalize(t.surface));
      int syl = count_syllables(t.surface, lang);
      p.syllable_count += syl;
      if (syl <= 3)
        ++p.count1to3;
      else if (syl <= 6)
        ++p.count4to6;
      else if (syl <= 10)
        ++p.count7to10;
      else
        ++p.count10plus;
    }
  }

  const double words = static_cast<double>(p.word_count);
  const double sentences = static_cast<double>(p.sentence_count);
  if (p.word_count > 0) {
    p.avg_word_length = static_cast<double>(word_letters) / words;
    p.ttr = static_cast<double>(types.size()) / words;
  }
  if (p.sentence_count > 0) {
    p.avg_sentence_length = static_cast<double>(nonspace) / sentences;
    p.avg_words_per_sentence = words / sentences;
  }
  const double syllables = static_cast<double>(p.syllable_count);
  p.flesch_reading_ease = clear::flesch_reading_ease(words, sentences, syllables);
  p.flesch_kincaid_grade = clear::flesch_kincaid_grade(words, sentences, syllables);
  return p;
}

// ---------------------------------------------------------------------------
// Character-level string distances over Unicode code points.

inline std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

inline double jaro(std::u32string_view a, std::u32string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t longer = std::max(a.size(), b.size());
  const std::size_t window = longer / 2 > 0 ? longer / 2 - 1 : 0;
  std::vector<char> a_matched(a.size(), 0), b_matched(b.size(), 0);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (b_matched[j] || a[i] != b[j]) continue;
      a_matched[i] = b_matched[j] = 1;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;
  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

inline double jaro_winkler(std::u32string_view a, std::u32string_view b, double prefix_scale = 0.1) {
  const double j = jaro(a, b);
  std::size_t prefix = 0;
  while (prefix < 4 && prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  return j + static_cast<double>(prefix) * prefix_scale * (1.0 - j);
}

struct StringDistances {
  long levenshtein = 0;
  double jaro = 0.0;
  double jaro_winkler = 0.0;
};

inline StringDistances string_distances(std::string_view original, std::string_view improved) {
  auto a = unicode::to_u32(original);
  auto b = unicode::to_u32(improved);
  return {static_cast<long>(clear::levenshtein(a, b)), clear::jaro(a, b), clear::jaro_winkler(a, b)};
}

// Percent change of character length; undefined for an empty original.
inline std::optional<double> length_change(std::string_view original, std::string_view improved) {
  const auto before = static_cast<double>(unicode::count_code_points_rtrim(original));
  if (before == 0) return std::nullopt;
  const auto after = static_cast<double>(unicode::count_code_points_rtrim(improved));
  return 100.0 * (after - before) / before;
}

}  // namespace clear
