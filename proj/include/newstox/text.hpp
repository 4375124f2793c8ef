#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace newstox {

/// Half-open range of token indices.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

/// Whitespace tokenization of a UTF-8 text.
///
/// Tokens are maximal runs of non-whitespace with punctuation left attached.
/// A sentence ends after a token whose last scalar is '.', '!' or '?'; any
/// trailing tokens without a terminator form a final sentence, so sentence
/// spans always cover every token. Offsets and counts are in Unicode scalars.
struct TokenizedText {
  std::vector<std::string> tokens;
  std::vector<Span> sentences;
  /// Scalar offset [start, end) of every token in the raw text.
  std::vector<Span> token_offsets;
  std::size_t char_count = 0;
};

TokenizedText tokenize(std::string_view text);

/// Number of Unicode scalars. Invalid UTF-8 bytes count as one scalar each.
std::size_t scalar_count(std::string_view text);

/// Full Unicode lowercasing (Cyrillic included).
std::string to_lower(std::string_view text);

}  // namespace newstox
