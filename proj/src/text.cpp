#include "newstox/text.hpp"

#include "unicode.hpp"

namespace newstox {

namespace {

bool is_terminator(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::int32_t pos = 0;
  const auto length = static_cast<std::int32_t>(text.size());
  std::size_t scalar = 0;
  std::size_t sentence_begin = 0;

  std::int32_t token_byte_start = -1;
  std::size_t token_scalar_start = 0;
  UChar32 last = 0;

  auto close_token = [&](std::int32_t byte_end) {
    out.tokens.emplace_back(text.substr(token_byte_start, byte_end - token_byte_start));
    out.token_offsets.push_back({token_scalar_start, scalar});
    token_byte_start = -1;
    if (is_terminator(last)) {
      out.sentences.push_back({sentence_begin, out.tokens.size()});
      sentence_begin = out.tokens.size();
    }
  };

  while (pos < length) {
    const std::int32_t start = pos;
    UChar32 c = unicode::next(text, pos);
    if (unicode::is_space(c)) {
      if (token_byte_start >= 0) close_token(start);
    } else {
      if (token_byte_start < 0) {
        token_byte_start = start;
        token_scalar_start = scalar;
      }
      last = c;
    }
    ++scalar;
  }
  if (token_byte_start >= 0) close_token(length);
  if (sentence_begin < out.tokens.size()) out.sentences.push_back({sentence_begin, out.tokens.size()});
  out.char_count = scalar;
  return out;
}

std::size_t scalar_count(std::string_view text) {
  std::int32_t pos = 0;
  std::size_t n = 0;
  while (pos < static_cast<std::int32_t>(text.size())) {
    unicode::next(text, pos);
    ++n;
  }
  return n;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::int32_t pos = 0;
  const auto length = static_cast<std::int32_t>(text.size());
  while (pos < length) {
    const std::int32_t start = pos;
    UChar32 c = unicode::next(text, pos);
    if (c < 0) {
      out.append(text.substr(start, pos - start));
      continue;
    }
    UChar32 lower = u_tolower(c);
    std::uint8_t buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, lower);
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace newstox
