#include "newstox/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <spdlog/spdlog.h>

#include "newstox/error.hpp"

namespace newstox {

namespace {

constexpr int kModelVersion = 1;

std::vector<TokenizedText> tokenize_all(const Dataset& d, std::span<const std::size_t> rows,
                                        bool title) {
  std::vector<TokenizedText> out;
  out.reserve(rows.size());
  for (auto r : rows) {
    const auto& a = d.article(r);
    out.push_back(tokenize(title ? a.title : a.body));
  }
  return out;
}

}  // namespace

TfIdfModel fit_tfidf(std::span<const TokenizedText> docs) {
  if (docs.empty()) throw ConfigError("tf-idf: empty corpus");
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : docs) {
    std::vector<std::string> terms;
    terms.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) terms.push_back(to_lower(t));
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms) ++df[std::move(t)];
  }
  TfIdfModel m;
  m.document_count_ = docs.size();
  m.idf_.resize(static_cast<Eigen::Index>(df.size()));
  const double n = static_cast<double>(docs.size());
  int col = 0;
  for (const auto& [term, count] : df) {
    m.vocabulary_.emplace(term, col);
    m.idf_(col) = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
    ++col;
  }
  return m;
}

SparseRows TfIdfModel::transform(std::span<const TokenizedText> docs) const {
  std::vector<Eigen::Triplet<double>> triplets;
  std::map<int, double> counts;
  for (std::size_t r = 0; r < docs.size(); ++r) {
    counts.clear();
    for (const auto& t : docs[r].tokens) {
      auto it = vocabulary_.find(to_lower(t));
      if (it != vocabulary_.end()) counts[it->second] += 1.0;
    }
    double norm2 = 0;
    for (auto& [c, v] : counts) {
      v *= idf_(c);
      norm2 += v * v;
    }
    if (norm2 == 0) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (const auto& [c, v] : counts)
      triplets.emplace_back(static_cast<int>(r), c, v * inv);
  }
  SparseRows out(static_cast<Eigen::Index>(docs.size()), dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::VectorXd TfIdfModel::transform(const TokenizedText& doc) const {
  return Eigen::VectorXd(transform(std::span(&doc, 1)).row(0).transpose());
}

nlohmann::json TfIdfModel::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  std::vector<std::string> by_col(vocabulary_.size());
  for (const auto& [t, c] : vocabulary_) by_col[static_cast<std::size_t>(c)] = t;
  for (auto& t : by_col) terms.push_back(t);
  return {{"version", kModelVersion},
          {"document_count", document_count_},
          {"terms", terms},
          {"idf", std::vector<double>(idf_.data(), idf_.data() + idf_.size())}};
}

TfIdfModel TfIdfModel::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kModelVersion) throw ConfigError("tf-idf: unsupported model version");
  TfIdfModel m;
  m.document_count_ = j.at("document_count").get<std::size_t>();
  auto terms = j.at("terms").get<std::vector<std::string>>();
  auto idf = j.at("idf").get<std::vector<double>>();
  if (terms.size() != idf.size()) throw DimensionError("tf-idf: terms/idf length mismatch");
  m.idf_ = Eigen::Map<Eigen::VectorXd>(idf.data(), static_cast<Eigen::Index>(idf.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) m.vocabulary_.emplace(terms[i], static_cast<int>(i));
  return m;
}

LsaPart fit_lsa_part(std::span<const TokenizedText> docs, Eigen::Index dim) {
  LsaPart part;
  part.dim = dim;
  part.tfidf = fit_tfidf(docs);
  const SparseRows m = part.tfidf.transform(docs);
  const Eigen::Index limit = std::min(m.rows(), m.cols());
  Eigen::Index k = std::min(dim, limit);
  if (k < dim)
    spdlog::warn("lsa: requested {} dimensions but only {} available ({} docs, {} terms); padding with zeros",
                 dim, k, m.rows(), m.cols());
  if (k >= 1) {
    part.svd = fit_svd(m, k);
  } else {
    part.svd.components.resize(0, m.cols());
    part.svd.singular_values.resize(0);
  }
  return part;
}

Eigen::MatrixXd LsaPart::project(std::span<const TokenizedText> docs) const {
  if (svd.input_dim() != tfidf.dim())
    throw DimensionError("lsa: projector expects " + std::to_string(svd.input_dim()) +
                         " terms, vocabulary has " + std::to_string(tfidf.dim()));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()), dim);
  if (svd.k() > 0) out.leftCols(svd.k()) = svd.project(tfidf.transform(docs));
  return out;
}

Eigen::VectorXd LsaPart::project(const TokenizedText& doc) const {
  return project(std::span(&doc, 1)).row(0).transpose();
}

nlohmann::json LsaPart::to_json() const {
  const auto& c = svd.components;
  std::vector<double> flat(static_cast<std::size_t>(c.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), c.rows(), c.cols()) = c;
  return {{"version", kModelVersion},
          {"dim", dim},
          {"tfidf", tfidf.to_json()},
          {"k", svd.k()},
          {"singular_values",
           std::vector<double>(svd.singular_values.data(), svd.singular_values.data() + svd.k())},
          {"components", flat}};
}

LsaPart LsaPart::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kModelVersion) throw ConfigError("lsa: unsupported model version");
  LsaPart p;
  p.dim = j.at("dim").get<Eigen::Index>();
  p.tfidf = TfIdfModel::from_json(j.at("tfidf"));
  const auto k = j.at("k").get<Eigen::Index>();
  auto sv = j.at("singular_values").get<std::vector<double>>();
  auto flat = j.at("components").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(sv.size()) != k ||
      static_cast<Eigen::Index>(flat.size()) != k * p.tfidf.dim())
    throw DimensionError("lsa: component matrix does not match vocabulary");
  p.svd.singular_values = Eigen::Map<Eigen::VectorXd>(sv.data(), k);
  p.svd.components = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), k, p.tfidf.dim());
  return p;
}

LsaModel fit_lsa(const Dataset& d, std::span<const std::size_t> train_rows, const LsaConfig& cfg) {
  const auto titles = tokenize_all(d, train_rows, true);
  const auto bodies = tokenize_all(d, train_rows, false);
  return {fit_lsa_part(titles, cfg.title_dim), fit_lsa_part(bodies, cfg.body_dim)};
}

Eigen::VectorXd lsa_features(const Article& article, const LsaPart& title_model, const LsaPart& body_model) {
  Eigen::VectorXd out(title_model.dim + body_model.dim);
  out << title_model.project(tokenize(article.title)), body_model.project(tokenize(article.body));
  return out;
}

Eigen::MatrixXd lsa_features(const Dataset& d, std::span<const std::size_t> rows, const LsaModel& model) {
  const auto titles = tokenize_all(d, rows, true);
  const auto bodies = tokenize_all(d, rows, false);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), model.dim());
  out << model.title.project(titles), model.body.project(bodies);
  return out;
}

}  // namespace newstox
