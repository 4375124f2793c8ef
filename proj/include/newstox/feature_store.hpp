#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace newstox {

enum class FeatureSource { native, external };

/// A named per-article vector family with a fixed width.
struct FeatureGroup {
  std::string name;
  Eigen::Index expected_dim = 0;
  FeatureSource source = FeatureSource::external;
  /// Title/body widths for groups that concatenate the two parts (0 otherwise).
  Eigen::Index title_dim = 0;
  Eigen::Index body_dim = 0;

  /// Groups computed from the English translation.
  bool needs_translation() const { return name.ends_with("_en"); }

  bool operator==(const FeatureGroup&) const = default;
};

/// The known groups with their fixed widths (title part + body part).
class FeatureRegistry {
 public:
  /// Registry pre-populated with the embedding, NELA, LSA, stylometry and media groups.
  static const FeatureRegistry& standard();

  std::optional<FeatureGroup> find(std::string_view name) const;
  const FeatureGroup& at(std::string_view name) const;
  const std::map<std::string, FeatureGroup, std::less<>>& groups() const { return groups_; }

  void add(FeatureGroup g);

 private:
  std::map<std::string, FeatureGroup, std::less<>> groups_;
};

/// Rows of one feature group keyed by article id.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Validates shape, finiteness and id uniqueness.
  FeatureMatrix(FeatureGroup group, std::vector<std::string> ids, Eigen::MatrixXd rows);

  const FeatureGroup& group() const { return group_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& rows() const { return rows_; }
  Eigen::Index dim() const { return rows_.cols(); }
  std::size_t size() const { return ids_.size(); }

  std::optional<std::size_t> find(std::string_view id) const;
  auto row(std::string_view id) const { return rows_.row(static_cast<Eigen::Index>(*find(id))); }

  /// Rows for the given ids in that order. Throws ConfigError naming missing ids.
  Eigen::MatrixXd select(std::span<const std::string> ids) const;

  bool operator==(const FeatureMatrix& o) const {
    return group_ == o.group_ && ids_ == o.ids_ && rows_ == o.rows_;
  }

 private:
  FeatureGroup group_;
  std::vector<std::string> ids_;
  Eigen::MatrixXd rows_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Companion manifest of a vector file.
struct VectorManifest {
  std::string group;
  Eigen::Index dim = 0;
  std::size_t articles = 0;
  std::string producer;
  /// Vector file; resolved relative to the manifest when read from disk.
  std::filesystem::path vectors;

  nlohmann::ordered_json to_json() const;
};

/// Reads a manifest. Without an explicit "path" key the vector file is the
/// manifest path with ".manifest.json" replaced by ".jsonl".
VectorManifest read_manifest(const std::filesystem::path& manifest_path);

/// Reads a vector-JSONL file. Errors name the offending id (dimension
/// mismatch, duplicate id, non-finite value) or line (syntax).
FeatureMatrix ingest_vectors(const std::filesystem::path& path, const FeatureGroup& group);

/// Loads the manifest and its vectors; the group comes from the registry, or
/// is registered as an external group of the manifest's width if unknown.
/// Throws DimensionError when manifest and registry widths disagree.
FeatureMatrix ingest_manifest(const std::filesystem::path& manifest_path,
                              const FeatureRegistry& registry = FeatureRegistry::standard());

/// Writes `<dir>/<group>.jsonl` and `<dir>/<group>.manifest.json`.
void write_vectors(const FeatureMatrix& m, const std::filesystem::path& dir, std::string_view producer);

/// Horizontal concatenation in list order for the requested ids.
/// The result's group name joins the member names with '+'.
FeatureMatrix concat_groups(std::span<const FeatureMatrix> groups, std::span<const std::string> ids);

/// Column statistics estimated on a training partition.
template <typename Scalar>
struct ColumnScaler {
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> inv_std;  // 0 for constant columns

  template <typename Derived>
  static ColumnScaler fit(const Eigen::MatrixBase<Derived>& train) {
    ColumnScaler s;
    const auto n = static_cast<Scalar>(train.rows());
    s.mean = train.colwise().mean();
    s.inv_std.resize(train.cols());
    for (Eigen::Index c = 0; c < train.cols(); ++c) {
      const Scalar var = (train.col(c).array() - s.mean(c)).square().sum() / n;
      const Scalar sd = std::sqrt(var);
      const Scalar scale = std::max<Scalar>(Scalar(1), std::abs(s.mean(c)));
      s.inv_std(c) = sd > Scalar(1e-12) * scale ? Scalar(1) / sd : Scalar(0);
    }
    return s;
  }

  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> apply(const Eigen::MatrixBase<Derived>& x) const {
    return (x.rowwise() - mean).array().rowwise() * inv_std.array();
  }
};

/// Z-scores both matrices with the training matrix's column mean and
/// population standard deviation. Constant training columns map to 0.
std::pair<FeatureMatrix, FeatureMatrix> standardize(const FeatureMatrix& train, const FeatureMatrix& apply_to);

}  // namespace newstox
