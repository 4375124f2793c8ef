#pragma once

#include <cstdint>
#include <string_view>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace newstox::unicode {

/// Decodes the scalar at byte offset `pos` and advances it. Malformed
/// sequences yield a negative value and consume at least one byte.
inline UChar32 next(std::string_view s, std::int32_t& pos) {
  UChar32 c;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  U8_NEXT(bytes, pos, length, c);
  return c;
}

inline bool is_space(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

inline bool is_numeric(UChar32 c) {
  if (c < 0) return false;
  auto t = u_charType(c);
  return t == U_DECIMAL_DIGIT_NUMBER || t == U_LETTER_NUMBER || t == U_OTHER_NUMBER;
}

inline bool is_alphabetic(UChar32 c) { return c >= 0 && u_isUAlphabetic(c); }

inline bool is_upper(UChar32 c) { return c >= 0 && u_isupper(c); }

/// Neither alphabetic, numeric nor whitespace.
inline bool is_special(UChar32 c) { return !is_alphabetic(c) && !is_numeric(c) && !is_space(c); }

}  // namespace newstox::unicode
