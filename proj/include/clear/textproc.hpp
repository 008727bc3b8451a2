#pragma once

// Rule-based sentence segmentation, tokenization, syllable counting and
// normalization. Everything here is deterministic and model-free; annotation
// bundles may override the sentence spans (see corpus.hpp).

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clear/error.hpp"
#include "clear/unicode.hpp"

namespace clear {

enum class Language { en, de };

inline std::string_view to_string(Language l) { return l == Language::en ? "en" : "de"; }

inline Language parse_language(std::string_view s) {
  if (s == "en") return Language::en;
  if (s == "de") return Language::de;
  throw ParseError("unknown language '" + std::string(s) + "' (expected en or de)");
}

// Half-open byte range into the owning text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  std::string_view slice(std::string_view text) const { return text.substr(start, end - start); }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
  std::string surface;
  Span span;
  bool is_word = false;  // contains at least one letter
};

struct Sentence {
  Span span;
  std::vector<Token> tokens;

  std::size_t word_count() const {
    return static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
  }
};

class AbbreviationList {
 public:
  AbbreviationList()
      : entries_{"e.g.", "i.e.", "etc.", "dr.", "mr.", "mrs.", "ms.", "vs.", "nr.", "z.b.",
                 "u.a.", "prof.", "st.", "jr.", "sr.", "cf.", "approx.", "ca.", "bzw.",
                 "usw.", "d.h.", "no.", "fig."} {}

  // One abbreviation per line, trailing period included. Blank lines and
  // lines starting with '#' are skipped.
  static AbbreviationList from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open abbreviation list: " + path);
    AbbreviationList list;
    list.entries_.clear();
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
      std::size_t b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] == '#') continue;
      list.entries_.insert(unicode::lowercase(line.substr(b)));
    }
    return list;
  }

  bool contains(std::string_view abbrev_with_period) const {
    return entries_.count(unicode::lowercase(abbrev_with_period)) > 0;
  }

 private:
  std::set<std::string> entries_;
};

namespace detail {

inline bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

inline bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'…'; }

inline bool is_closer(char32_t c) {
  return c == U'"' || c == U'”' || c == U'“' || c == U'’' || c == U'\'' || c == U'»' ||
         c == U')' || c == U']' || c == U'}';
}

struct Cp {
  char32_t c;
  std::size_t off;
};

inline std::vector<Cp> decode_all(std::string_view text) {
  std::vector<Cp> cps;
  cps.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    auto d = unicode::decode_at(text, i);
    cps.push_back({d.cp, i});
    i = d.next;
  }
  return cps;
}

// Nesting depth before each code point index (size n+1), counting only
// brackets and double quotes that have a matching partner.
inline std::vector<int> enclosure_depth(const std::vector<Cp>& cps) {
  std::vector<int> delta(cps.size() + 1, 0);
  std::vector<std::size_t> brackets;
  std::vector<std::size_t> quotes;  // open curly/low quotes
  std::size_t straight_open = cps.size();
  auto match = [&](std::size_t open, std::size_t close) {
    delta[open] += 1;
    delta[close + 1] -= 1;
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i].c;
    switch (c) {
      case U'(':
      case U'[':
      case U'{':
        brackets.push_back(i);
        break;
      case U')':
      case U']':
      case U'}': {
        char32_t want = c == U')' ? U'(' : c == U']' ? U'[' : U'{';
        if (!brackets.empty() && cps[brackets.back()].c == want) {
          match(brackets.back(), i);
          brackets.pop_back();
        }
        break;
      }
      case U'"':
        if (straight_open == cps.size()) {
          straight_open = i;
        } else {
          match(straight_open, i);
          straight_open = cps.size();
        }
        break;
      case U'„':  // German low opening quote
        quotes.push_back(i);
        break;
      case U'“':  // English open, German close
        if (!quotes.empty() && cps[quotes.back()].c == U'„') {
          match(quotes.back(), i);
          quotes.pop_back();
        } else {
          quotes.push_back(i);
        }
        break;
      case U'”':
        if (!quotes.empty()) {
          match(quotes.back(), i);
          quotes.pop_back();
        }
        break;
      default:
        break;
    }
  }
  std::vector<int> depth(cps.size() + 1, 0);
  int d = 0;
  for (std::size_t i = 0; i <= cps.size(); ++i) {
    d += delta[i];
    depth[i] = d;
  }
  return depth;
}

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view text, std::size_t base_offset = 0) {
  std::vector<Token> out;
  auto cps = detail::decode_all(text);
  auto end_of = [&](std::size_t idx) { return idx < cps.size() ? cps[idx].off : text.size(); };
  std::size_t i = 0;
  while (i < cps.size()) {
    char32_t c = cps[i].c;
    if (unicode::is_space(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    bool has_letter = unicode::is_letter(c);
    if (unicode::is_alnum(c)) {
      while (j < cps.size()) {
        if (unicode::is_alnum(cps[j].c)) {
          has_letter = has_letter || unicode::is_letter(cps[j].c);
          ++j;
        } else if (detail::is_apostrophe(cps[j].c) && j + 1 < cps.size() && unicode::is_alnum(cps[j + 1].c)) {
          ++j;
        } else {
          break;
        }
      }
    }
    Span span{cps[i].off, end_of(j)};
    out.push_back(Token{std::string(span.slice(text)), {span.start + base_offset, span.end + base_offset}, has_letter});
    i = j;
  }
  return out;
}

inline std::vector<Sentence> segment_sentences(std::string_view text,
                                               const AbbreviationList& abbreviations = AbbreviationList{}) {
  std::vector<Sentence> out;
  auto cps = detail::decode_all(text);
  auto depth = detail::enclosure_depth(cps);
  const std::size_t n = cps.size();
  auto off = [&](std::size_t idx) { return idx < n ? cps[idx].off : text.size(); };

  std::size_t start = n;  // code point index of current sentence start; n = none
  std::size_t last_nonspace = n;

  auto close = [&](std::size_t end_idx) {
    if (start >= n) return;
    Span span{off(start), off(end_idx)};
    if (span.start < span.end) {
      Sentence s;
      s.span = span;
      s.tokens = tokenize(span.slice(text), span.start);
      out.push_back(std::move(s));
    }
    start = n;
  };

  for (std::size_t i = 0; i < n; ++i) {
    char32_t c = cps[i].c;
    if (c == U'\n') {
      std::size_t j = i + 1;
      while (j < n && cps[j].c != U'\n' && unicode::is_space(cps[j].c)) ++j;
      if (j < n && cps[j].c == U'\n') {
        if (start < n) close(last_nonspace + 1);
        i = j;
        continue;
      }
    }
    if (unicode::is_space(c)) continue;
    if (start >= n) start = i;
    last_nonspace = i;
    if (!detail::is_terminator(c)) continue;

    std::size_t j = i;
    while (j < n && detail::is_terminator(cps[j].c)) ++j;
    std::size_t k = j;
    while (k < n && detail::is_closer(cps[k].c)) ++k;
    if (k < n && !unicode::is_space(cps[k].c)) {
      i = j - 1;
      continue;
    }
    last_nonspace = k - 1;
    if (depth[k] > 0) {
      i = k - 1;
      continue;
    }
    if (j == i + 1 && c == U'.') {
      std::size_t b = i;
      while (b > start && (unicode::is_letter(cps[b - 1].c) || cps[b - 1].c == U'.')) --b;
      if (b < i) {
        std::size_t letters = 0;
        for (std::size_t q = b; q < i; ++q) letters += unicode::is_letter(cps[q].c) ? 1 : 0;
        bool word_boundary = b == 0 || !unicode::is_alnum(cps[b - 1].c);
        std::string word(text.substr(off(b), off(i + 1) - off(b)));
        if (word_boundary && (letters == 1 || abbreviations.contains(word))) {
          i = k - 1;
          continue;
        }
      }
    }
    close(k);
    i = k - 1;
  }
  if (start < n) close(last_nonspace + 1);
  return out;
}

// English: vowel groups (a e i o u y), minus a terminal silent "e" unless the
// word ends in consonant + "le". German: vowel units, where the diphthongs
// ei/ie/au/eu/äu and doubled vowels are a single unit. Both floor at 1.
inline int count_syllables(std::string_view word, Language lang = Language::en) {
  std::u32string letters;
  for (char32_t c : unicode::to_u32(word))
    if (unicode::is_letter(c)) letters.push_back(unicode::to_lower(c));
  if (letters.empty()) throw ValidationError("count_syllables: '" + std::string(word) + "' contains no letter");

  auto is_vowel = [lang](char32_t c) {
    switch (c) {
      case U'a': case U'e': case U'i': case U'o': case U'u': case U'y':
        return true;
      case U'ä': case U'ö': case U'ü':
        return lang == Language::de;
      default:
        return false;
    }
  };

  int count = 0;
  if (lang == Language::en) {
    bool in_group = false;
    for (char32_t c : letters) {
      bool v = is_vowel(c);
      if (v && !in_group) ++count;
      in_group = v;
    }
    const std::size_t n = letters.size();
    if (n >= 2 && letters[n - 1] == U'e') {
      bool consonant_le = n >= 3 && letters[n - 2] == U'l' && !is_vowel(letters[n - 3]);
      // The "e" of a consonant+"le" ending is always its own vowel group, so
      // keeping it is all the "le" rule needs.
      if (!consonant_le && !is_vowel(letters[n - 2])) --count;
    }
  } else {
    auto single_unit = [](char32_t a, char32_t b) {
      return (a == U'e' && b == U'i') || (a == U'i' && b == U'e') || (a == U'a' && b == U'u') ||
             (a == U'e' && b == U'u') || (a == U'ä' && b == U'u') ||
             (a == b && (a == U'a' || a == U'e' || a == U'o'));
    };
    for (std::size_t i = 0; i < letters.size();) {
      if (!is_vowel(letters[i])) {
        ++i;
        continue;
      }
      ++count;
      if (i + 1 < letters.size() && is_vowel(letters[i + 1]) && single_unit(letters[i], letters[i + 1]))
        i += 2;
      else
        ++i;
    }
  }
  return std::max(count, 1);
}

// Lowercase, NFKC, whitespace runs collapsed to one space, trimmed.
inline std::string normalize(std::string_view text) {
  std::string folded = unicode::nfkc(unicode::lowercase(unicode::nfkc(text)));
  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < folded.size();) {
    auto d = unicode::decode_at(folded, i);
    if (unicode::is_space(d.cp)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(folded, i, d.next - i);
    }
    i = d.next;
  }
  return out;
}

}  // namespace clear
