#pragma once

// Thin UTF-8 helpers over ICU. Offsets are byte offsets into UTF-8 strings
// unless a name says otherwise.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <unicode/normlzr.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace clear::unicode {

struct Decoded {
  char32_t cp;
  std::size_t next;  // byte offset after this code point
};

// Invalid sequences decode as U+FFFD and advance one byte.
inline Decoded decode_at(std::string_view s, std::size_t i) {
  int32_t pos = static_cast<int32_t>(i);
  UChar32 c = 0;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos, static_cast<int32_t>(s.size()), c);
  if (c < 0) c = 0xFFFD;
  return {static_cast<char32_t>(c), static_cast<std::size_t>(pos)};
}

// Byte offset of the code point that ends right before `i`.
inline std::size_t prev_offset(std::string_view s, std::size_t i) {
  if (i == 0) return 0;
  int32_t pos = static_cast<int32_t>(i);
  UChar32 c = 0;
  U8_PREV(reinterpret_cast<const uint8_t*>(s.data()), 0, pos, c);
  (void)c;
  return static_cast<std::size_t>(pos);
}

inline std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto d = decode_at(s, i);
    out.push_back(d.cp);
    i = d.next;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[4];
  int32_t len = 0;
  UBool err = false;
  U8_APPEND(buf, len, 4, static_cast<UChar32>(cp), err);
  if (err) return;
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

inline std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

inline std::size_t count_code_points(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++n) i = decode_at(s, i).next;
  return n;
}

// Byte offset of the `cp_index`-th code point; s.size() when past the end.
inline std::size_t byte_offset_of(std::string_view s, std::size_t cp_index) {
  std::size_t i = 0;
  for (std::size_t n = 0; n < cp_index && i < s.size(); ++n) i = decode_at(s, i).next;
  return i;
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
inline bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }
inline bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }
inline bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

inline char32_t to_lower(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

inline std::string lowercase(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline std::string nfkc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) return std::string(s);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString n = norm->normalize(u, status);
  if (U_FAILURE(status)) return std::string(s);
  std::string out;
  n.toUTF8String(out);
  return out;
}

// Length of `s` after dropping trailing whitespace, in code points.
inline std::size_t count_code_points_rtrim(std::string_view s) {
  std::size_t end = s.size();
  while (end > 0) {
    std::size_t p = prev_offset(s, end);
    if (!is_space(decode_at(s, p).cp)) break;
    end = p;
  }
  return count_code_points(s.substr(0, end));
}

}  // namespace clear::unicode
