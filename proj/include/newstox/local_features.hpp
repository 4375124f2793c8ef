#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "newstox/corpus.hpp"

namespace newstox {

/// Six per-part counts shared by title and body.
struct TextStats {
  double avg_word_length = 0;
  double word_count = 0;
  double char_count = 0;
  double spec_char_count = 0;
  double upper_char_count = 0;
  double upper_word_count = 0;
};

/// The fifteen stylometric features: six for the title, nine for the body.
struct StyloVector {
  static constexpr int kDim = 15;

  TextStats title;
  TextStats text;
  double sentence_count_text = 0;
  double avg_sentence_length_char_text = 0;
  double avg_sentence_length_word_text = 0;

  /// Feature names in vector order.
  static const std::array<std::string_view, kDim>& names();
  Eigen::Matrix<double, kDim, 1> to_vector() const;
};

StyloVector stylometric_features(std::string_view title, std::string_view body);

/// Publisher-level features.
struct MediaVector {
  static constexpr int kDim = 6;

  double editor = 0;
  double responsible_person = 0;
  double bg_server = 0;
  /// 1 / alexa_rank, or 0 when the rank is unknown.
  double popularity = 0;
  double domain_person = 0;
  /// log10 of the medium's age in days at the reference date; 0 for age 0.
  double days_existing_log = 0;

  static const std::array<std::string_view, kDim>& names();
  Eigen::Matrix<double, kDim, 1> to_vector() const;
};

/// Throws ValidationError when the medium was created after reference_date.
MediaVector media_features(const Medium& m, Date reference_date = kReferenceDate);

}  // namespace newstox
