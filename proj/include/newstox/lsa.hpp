#pragma once

#include <map>
#include <span>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "newstox/corpus.hpp"
#include "newstox/svd.hpp"
#include "newstox/text.hpp"

namespace newstox {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// TF-IDF weighting with smoothed idf(t) = ln((1 + N) / (1 + df(t))) + 1.
/// Terms are lowercased tokens; transformed rows are L2-normalized raw counts x idf.
class TfIdfModel {
 public:
  TfIdfModel() = default;

  const std::map<std::string, int, std::less<>>& vocabulary() const { return vocabulary_; }
  const Eigen::VectorXd& idf() const { return idf_; }
  std::size_t document_count() const { return document_count_; }
  Eigen::Index dim() const { return idf_.size(); }

  /// Out-of-vocabulary terms are dropped; a document with none left maps to the zero row.
  SparseRows transform(std::span<const TokenizedText> docs) const;
  Eigen::VectorXd transform(const TokenizedText& doc) const;

  nlohmann::json to_json() const;
  static TfIdfModel from_json(const nlohmann::json& j);

  friend TfIdfModel fit_tfidf(std::span<const TokenizedText> docs);

 private:
  std::map<std::string, int, std::less<>> vocabulary_;
  Eigen::VectorXd idf_;
  std::size_t document_count_ = 0;
};

/// Throws ConfigError on an empty corpus.
TfIdfModel fit_tfidf(std::span<const TokenizedText> docs);

/// TF-IDF followed by truncated SVD for one text field (title or body).
struct LsaPart {
  TfIdfModel tfidf;
  SvdProjector<double> svd;
  /// Output width. Equals the requested k; when the training fold was too
  /// small the trailing dimensions are zero.
  Eigen::Index dim = 0;

  Eigen::VectorXd project(const TokenizedText& doc) const;
  Eigen::MatrixXd project(std::span<const TokenizedText> docs) const;

  nlohmann::json to_json() const;
  static LsaPart from_json(const nlohmann::json& j);
};

/// Fits TF-IDF on `docs` and keeps the top `dim` singular directions,
/// clamping k to min(N, V) with a warning.
LsaPart fit_lsa_part(std::span<const TokenizedText> docs, Eigen::Index dim);

struct LsaConfig {
  Eigen::Index title_dim = 15;
  Eigen::Index body_dim = 200;
};

/// Title and body LSA models fitted on one training partition.
struct LsaModel {
  LsaPart title;
  LsaPart body;

  Eigen::Index dim() const { return title.dim + body.dim; }
};

LsaModel fit_lsa(const Dataset& d, std::span<const std::size_t> train_rows, const LsaConfig& cfg = {});

/// Concatenated [title projection, body projection].
Eigen::VectorXd lsa_features(const Article& article, const LsaPart& title_model, const LsaPart& body_model);

/// lsa_features for every listed row of the dataset, one output row each.
Eigen::MatrixXd lsa_features(const Dataset& d, std::span<const std::size_t> rows, const LsaModel& model);

}  // namespace newstox
