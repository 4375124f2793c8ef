#include "newstox/local_features.hpp"

#include <cmath>

#include "newstox/error.hpp"
#include "newstox/text.hpp"
#include "unicode.hpp"

namespace newstox {

namespace {

TextStats text_stats(std::string_view raw, const TokenizedText& tok) {
  TextStats s;
  s.word_count = static_cast<double>(tok.tokens.size());
  s.char_count = static_cast<double>(tok.char_count);

  std::int32_t pos = 0;
  while (pos < static_cast<std::int32_t>(raw.size())) {
    UChar32 c = unicode::next(raw, pos);
    if (unicode::is_special(c)) s.spec_char_count += 1;
    if (unicode::is_upper(c)) s.upper_char_count += 1;
  }

  double letters = 0;
  for (const auto& t : tok.tokens) {
    letters += static_cast<double>(scalar_count(t));
    std::int32_t p = 0;
    if (unicode::is_upper(unicode::next(t, p))) s.upper_word_count += 1;
  }
  if (s.word_count > 0) s.avg_word_length = letters / s.word_count;
  return s;
}

}  // namespace

const std::array<std::string_view, StyloVector::kDim>& StyloVector::names() {
  static const std::array<std::string_view, kDim> n = {
      "avg_word_length_title",  "word_count_title",        "char_count_title",
      "spec_char_count_title",  "upper_char_count_title",  "upper_word_count_title",
      "avg_word_length_text",   "word_count_text",         "char_count_text",
      "spec_char_count_text",   "upper_char_count_text",   "upper_word_count_text",
      "sentence_count_text",    "avg_sentence_length_char_text",
      "avg_sentence_length_word_text",
  };
  return n;
}

Eigen::Matrix<double, StyloVector::kDim, 1> StyloVector::to_vector() const {
  Eigen::Matrix<double, kDim, 1> v;
  v << title.avg_word_length, title.word_count, title.char_count, title.spec_char_count,
      title.upper_char_count, title.upper_word_count, text.avg_word_length, text.word_count,
      text.char_count, text.spec_char_count, text.upper_char_count, text.upper_word_count,
      sentence_count_text, avg_sentence_length_char_text, avg_sentence_length_word_text;
  return v;
}

StyloVector stylometric_features(std::string_view title, std::string_view body) {
  StyloVector v;
  const auto title_tok = tokenize(title);
  const auto body_tok = tokenize(body);
  v.title = text_stats(title, title_tok);
  v.text = text_stats(body, body_tok);

  const auto& sentences = body_tok.sentences;
  v.sentence_count_text = static_cast<double>(sentences.size());
  if (!sentences.empty()) {
    // Sentence length in characters spans from its first token's start to its last token's end.
    double chars = 0;
    for (const auto& s : sentences)
      chars += static_cast<double>(body_tok.token_offsets[s.end - 1].end -
                                   body_tok.token_offsets[s.begin].begin);
    v.avg_sentence_length_char_text = chars / v.sentence_count_text;
    v.avg_sentence_length_word_text = v.text.word_count / v.sentence_count_text;
  }
  return v;
}

const std::array<std::string_view, MediaVector::kDim>& MediaVector::names() {
  static const std::array<std::string_view, kDim> n = {
      "editor", "responsible_person", "bg_server", "popularity", "domain_person", "days_existing",
  };
  return n;
}

Eigen::Matrix<double, MediaVector::kDim, 1> MediaVector::to_vector() const {
  Eigen::Matrix<double, kDim, 1> v;
  v << editor, responsible_person, bg_server, popularity, domain_person, days_existing_log;
  return v;
}

MediaVector media_features(const Medium& m, Date reference_date) {
  using std::chrono::sys_days;
  const auto days = (sys_days{reference_date} - sys_days{m.created_date}).count();
  if (days < 0)
    throw ValidationError("medium " + m.id + " created " + format_date(m.created_date) +
                          ", after reference date " + format_date(reference_date));
  MediaVector v;
  v.editor = m.has_editor ? 1.0 : 0.0;
  v.responsible_person = m.has_responsible_person ? 1.0 : 0.0;
  v.bg_server = m.bg_server ? 1.0 : 0.0;
  v.popularity = m.alexa_rank ? 1.0 / static_cast<double>(*m.alexa_rank) : 0.0;
  v.domain_person = m.has_domain_person ? 1.0 : 0.0;
  v.days_existing_log = days > 0 ? std::log10(static_cast<double>(days)) : 0.0;
  return v;
}

}  // namespace newstox
