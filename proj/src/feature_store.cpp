#include "newstox/feature_store.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "jsonl.hpp"
#include "newstox/error.hpp"

namespace newstox {

namespace {

std::string join_ids(const std::vector<std::string>& ids, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

FeatureGroup make(std::string name, Eigen::Index title, Eigen::Index body, FeatureSource src) {
  return {std::move(name), title + body, src, title, body};
}

}  // namespace

const FeatureRegistry& FeatureRegistry::standard() {
  static const FeatureRegistry r = [] {
    FeatureRegistry reg;
    reg.add(make("bert_bg", 768, 768, FeatureSource::external));
    reg.add(make("xlm_bg", 1024, 1024, FeatureSource::external));
    reg.add(make("stylo", 6, 9, FeatureSource::native));
    reg.add(make("lsa_bg", 15, 200, FeatureSource::native));
    reg.add(make("use_en", 512, 512, FeatureSource::external));
    reg.add(make("nela_en", 129, 129, FeatureSource::external));
    reg.add(make("bert_en", 768, 768, FeatureSource::external));
    reg.add(make("elmo_en", 1024, 1024, FeatureSource::external));
    reg.add({"media", 6, FeatureSource::native, 0, 0});
    return reg;
  }();
  return r;
}

std::optional<FeatureGroup> FeatureRegistry::find(std::string_view name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) return std::nullopt;
  return it->second;
}

const FeatureGroup& FeatureRegistry::at(std::string_view name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw ConfigError("unknown feature group '" + std::string(name) + "'");
  return it->second;
}

void FeatureRegistry::add(FeatureGroup g) {
  auto name = g.name;
  groups_.insert_or_assign(std::move(name), std::move(g));
}

FeatureMatrix::FeatureMatrix(FeatureGroup group, std::vector<std::string> ids, Eigen::MatrixXd rows)
    : group_(std::move(group)), ids_(std::move(ids)), rows_(std::move(rows)) {
  if (static_cast<Eigen::Index>(ids_.size()) != rows_.rows())
    throw DimensionError(group_.name + ": " + std::to_string(ids_.size()) + " ids for " +
                         std::to_string(rows_.rows()) + " rows");
  if (rows_.cols() != group_.expected_dim)
    throw DimensionError(group_.name + ": expected dim " + std::to_string(group_.expected_dim) +
                         ", got " + std::to_string(rows_.cols()));
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second)
      throw ValidationError(group_.name + ": duplicate id " + ids_[i]);
    if (!rows_.row(static_cast<Eigen::Index>(i)).allFinite())
      throw ValidationError(group_.name + ": non-finite value for id " + ids_[i]);
  }
}

std::optional<std::size_t> FeatureMatrix::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::MatrixXd FeatureMatrix::select(std::span<const std::string> ids) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), dim());
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto r = find(ids[i]);
    if (!r) {
      missing.push_back(ids[i]);
      continue;
    }
    out.row(static_cast<Eigen::Index>(i)) = rows_.row(static_cast<Eigen::Index>(*r));
  }
  if (!missing.empty())
    throw ConfigError("group " + group_.name + " is missing ids: " + join_ids(missing));
  return out;
}

nlohmann::ordered_json VectorManifest::to_json() const {
  nlohmann::ordered_json j;
  j["group"] = group;
  j["dim"] = dim;
  j["articles"] = articles;
  j["producer"] = producer;
  if (!vectors.empty()) j["path"] = vectors.generic_string();
  return j;
}

VectorManifest read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.string(), 1, e.what());
  }
  VectorManifest m;
  try {
    m.group = j.at("group").get<std::string>();
    m.dim = j.at("dim").get<Eigen::Index>();
    m.articles = j.at("articles").get<std::size_t>();
    m.producer = j.value("producer", "");
    if (auto it = j.find("path"); it != j.end()) m.vectors = it->get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string(), 1, e.what());
  }
  if (m.vectors.empty()) {
    auto name = manifest_path.filename().string();
    constexpr std::string_view suffix = ".manifest.json";
    if (name.ends_with(suffix)) name.resize(name.size() - suffix.size());
    else name = manifest_path.stem().string();
    m.vectors = manifest_path.parent_path() / (name + ".jsonl");
  } else if (m.vectors.is_relative()) {
    m.vectors = manifest_path.parent_path() / m.vectors;
  }
  return m;
}

FeatureMatrix ingest_vectors(const std::filesystem::path& path, const FeatureGroup& group) {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::set<std::string, std::less<>> seen;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    std::string id;
    const nlohmann::json* vec = nullptr;
    try {
      id = j.at("id").get<std::string>();
      vec = &j.at("vector");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line, e.what());
    }
    if (!vec->is_array()) throw ParseError(path.string(), line, "vector is not an array");
    if (static_cast<Eigen::Index>(vec->size()) != group.expected_dim)
      throw DimensionError(group.name + ": id " + id + " has " + std::to_string(vec->size()) +
                           " values, expected " + std::to_string(group.expected_dim));
    if (!seen.insert(id).second) throw ValidationError(group.name + ": duplicate id " + id);
    for (const auto& v : *vec) {
      if (!v.is_number())
        throw ValidationError(group.name + ": non-numeric value for id " + id);
      double x = v.get<double>();
      if (!std::isfinite(x)) throw ValidationError(group.name + ": non-finite value for id " + id);
      values.push_back(x);
    }
    ids.push_back(std::move(id));
  });
  Eigen::MatrixXd rows = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(ids.size()), group.expected_dim);
  return FeatureMatrix(group, std::move(ids), std::move(rows));
}

FeatureMatrix ingest_manifest(const std::filesystem::path& manifest_path, const FeatureRegistry& registry) {
  const auto manifest = read_manifest(manifest_path);
  FeatureGroup group;
  if (auto known = registry.find(manifest.group)) {
    group = *known;
    if (manifest.dim != group.expected_dim)
      throw DimensionError("group " + group.name + ": manifest dim " + std::to_string(manifest.dim) +
                           " != expected dim " + std::to_string(group.expected_dim));
  } else {
    group = {manifest.group, manifest.dim, FeatureSource::external, 0, 0};
  }
  auto m = ingest_vectors(manifest.vectors, group);
  if (m.size() != manifest.articles)
    throw ValidationError("group " + group.name + ": manifest lists " + std::to_string(manifest.articles) +
                          " articles, file has " + std::to_string(m.size()));
  return m;
}

void write_vectors(const FeatureMatrix& m, const std::filesystem::path& dir, std::string_view producer) {
  std::filesystem::create_directories(dir);
  const auto vectors = dir / (m.group().name + ".jsonl");
  {
    std::ofstream out(vectors, std::ios::binary);
    if (!out) throw Error("cannot write " + vectors.string());
    for (std::size_t i = 0; i < m.size(); ++i) {
      nlohmann::ordered_json j;
      j["id"] = m.ids()[i];
      const auto row = m.rows().row(static_cast<Eigen::Index>(i));
      j["vector"] = std::vector<double>(row.begin(), row.end());
      out << j.dump() << '\n';
    }
  }
  VectorManifest manifest{m.group().name, m.dim(), m.size(), std::string(producer),
                          vectors.filename()};
  const auto manifest_path = dir / (m.group().name + ".manifest.json");
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw Error("cannot write " + manifest_path.string());
  out << manifest.to_json().dump(2) << '\n';
}

FeatureMatrix concat_groups(std::span<const FeatureMatrix> groups, std::span<const std::string> ids) {
  if (groups.empty()) throw ConfigError("concat: no groups");
  FeatureGroup out_group{"", 0, FeatureSource::native, 0, 0};
  for (const auto& g : groups) {
    if (!out_group.name.empty()) out_group.name += '+';
    out_group.name += g.group().name;
    out_group.expected_dim += g.dim();
    if (g.group().source == FeatureSource::external) out_group.source = FeatureSource::external;
  }
  if (groups.size() == 1) {
    out_group = groups.front().group();
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(ids.size()), out_group.expected_dim);
  Eigen::Index col = 0;
  for (const auto& g : groups) {
    rows.middleCols(col, g.dim()) = g.select(ids);
    col += g.dim();
  }
  return FeatureMatrix(out_group, {ids.begin(), ids.end()}, std::move(rows));
}

std::pair<FeatureMatrix, FeatureMatrix> standardize(const FeatureMatrix& train, const FeatureMatrix& apply_to) {
  if (train.dim() != apply_to.dim() || train.group().name != apply_to.group().name)
    throw DimensionError("standardize: train and target belong to different groups");
  const auto scaler = ColumnScaler<double>::fit(train.rows());
  return {FeatureMatrix(train.group(), train.ids(), scaler.apply(train.rows())),
          FeatureMatrix(apply_to.group(), apply_to.ids(), scaler.apply(apply_to.rows()))};
}

}  // namespace newstox
