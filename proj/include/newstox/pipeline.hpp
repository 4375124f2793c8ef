#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "newstox/corpus.hpp"
#include "newstox/feature_store.hpp"
#include "newstox/folds.hpp"
#include "newstox/lsa.hpp"
#include "newstox/metrics.hpp"
#include "newstox/models.hpp"
#include "newstox/resample.hpp"

namespace newstox {

// --- fold planning ----------------------------------------------------------

/// Outer folds over the corpus and, per outer fold, inner folds over its
/// training rows. All indices are article rows of the dataset.
struct FoldPlan {
  FoldAssignment outer;
  /// inner[f].fold_of is indexed by position in outer_train(f).
  std::vector<FoldAssignment> inner;
  std::uint64_t seed = 42;

  int num_outer() const { return outer.num_folds; }
  std::vector<std::size_t> outer_train(int f) const { return outer.train_rows(f); }
  std::vector<std::size_t> outer_test(int f) const { return outer.test_rows(f); }
};

/// Stratified by primary label. Warns (best effort) when a class has fewer
/// members than folds; throws ConfigError with fewer articles than outer folds.
FoldPlan plan_folds(const Dataset& d, int outer = 5, int inner = 5, std::uint64_t seed = 42);

// --- setups -----------------------------------------------------------------

enum class ClassifierKind { baseline, softmax, mlp, meta };

std::string_view to_string(ClassifierKind k);
std::optional<ClassifierKind> parse_classifier(std::string_view name);

struct SetupSpec {
  int id = 0;
  std::string name;
  std::string language;  // "BG", "EN" or "-"
  std::vector<std::string> groups;
  ClassifierKind classifier = ClassifierKind::softmax;
  ResamplePlan resample{};
  /// Base setup ids for the meta-classifier.
  std::vector<int> bases;
};

/// The fourteen evaluated setups: baseline, per-group and combined softmax
/// models, media features, and the stacked meta-classifier over 2-5, 7-10, 12.
const std::vector<SetupSpec>& standard_setups();
const SetupSpec& standard_setup(int id);

/// Parses "all", "14", "1,2,5" or "2-5,12". Throws ConfigError on anything else.
std::vector<int> parse_setup_selection(std::string_view text);

// --- features ---------------------------------------------------------------

/// Every feature group available for one dataset, aligned to article rows.
/// Stylometric and media groups are computed on construction; LSA is fitted
/// per training partition and is therefore always available.
class FeatureBank {
 public:
  explicit FeatureBank(const Dataset& d, const FeatureRegistry& registry = FeatureRegistry::standard());

  /// Replaces any existing group of the same name. Throws ConfigError when the
  /// matrix ids do not exactly cover the corpus (missing and extra ids listed).
  void add(const FeatureMatrix& m);

  bool has(std::string_view group) const;
  std::vector<std::string> available() const;
  Eigen::Index dim(std::string_view group) const;

  /// Rows of a stored group (not LSA) in article-row order.
  Eigen::MatrixXd rows(std::string_view group, std::span<const std::size_t> article_rows) const;

  const Dataset& dataset() const { return *dataset_; }
  const FeatureRegistry& registry() const { return registry_; }

 private:
  const Dataset* dataset_;
  FeatureRegistry registry_;
  std::map<std::string, Eigen::MatrixXd, std::less<>> groups_;
};

/// Natively computed "stylo" (15 dims) or "media" (6 dims) rows for every article.
FeatureMatrix native_feature_matrix(const Dataset& d, std::string_view group);

/// Ids of `m` that are missing from / foreign to the corpus.
struct Alignment {
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  bool ok() const { return missing.empty() && extra.empty(); }
};
Alignment check_alignment(const FeatureMatrix& m, const Dataset& d);

// --- configuration ----------------------------------------------------------

struct PipelineConfig {
  std::uint64_t seed = 42;
  int outer_folds = 5;
  int inner_folds = 5;
  HyperGrid grid{};
  LsaConfig lsa{};
  MlpOptions mlp{};
  ResamplePlan resample{};
  /// Classifier used by the single-model setups; the meta level is always softmax.
  ClassifierKind base_classifier = ClassifierKind::softmax;

  nlohmann::ordered_json to_json() const;
};

// --- leak audit -------------------------------------------------------------

/// Bookkeeping of every fitted model's training rows and every prediction it
/// contributed, used to prove no prediction comes from a model that saw the article.
class AuditLog {
 public:
  enum class Use { test_prediction, meta_train_feature, meta_test_feature, inner_validation };

  std::size_t register_model(std::string tag, std::vector<std::size_t> train_rows);
  void record(std::size_t model, std::size_t article_row, Use use);
  void record_all(std::size_t model, std::span<const std::size_t> article_rows, Use use);

  /// Descriptions of every violating record; empty when the audit passes.
  std::vector<std::string> violations() const;

  std::size_t model_count() const { return models_.size(); }
  std::size_t record_count() const { return records_.size(); }
  std::size_t count(Use use) const;
  const std::vector<std::size_t>& training_rows(std::size_t model) const { return models_.at(model).train; }
  const std::string& tag(std::size_t model) const { return models_.at(model).tag; }

  struct Record {
    std::size_t model;
    std::size_t row;
    Use use;
  };
  const std::vector<Record>& records() const { return records_; }

  /// Appends another log's models and records.
  void merge(const AuditLog& other);

 private:
  struct Model {
    std::string tag;
    std::vector<std::size_t> train;  // sorted
  };
  std::vector<Model> models_;
  std::vector<Record> records_;
};

std::string_view to_string(AuditLog::Use use);

// --- reports ----------------------------------------------------------------

struct FoldMetrics {
  int fold = 0;
  std::size_t test_size = 0;
  double accuracy = 0;
  double macro_f1 = 0;
  /// Selected L2 strength (absent for the baseline and the MLP).
  std::optional<double> l2;
};

struct PredictionRow {
  std::string id;
  int fold = 0;
  int truth = 0;
  int predicted = 0;
};

struct RunReport {
  int setup_id = 0;
  std::string name;
  std::string language;
  Eigen::Index dimension = 0;
  Metrics metrics;
  std::vector<FoldMetrics> folds;
  std::vector<PredictionRow> predictions;
  nlohmann::ordered_json config;
  std::shared_ptr<const AuditLog> audit;

  double accuracy_percent() const { return 100.0 * metrics.accuracy; }
  double macro_f1_percent() const { return 100.0 * metrics.macro_f1; }
  nlohmann::ordered_json to_json() const;
};

/// Per-fold posteriors of one base setup, kept for stacking.
struct BasePosteriors {
  /// Out-of-fold posteriors for outer_train(f), in that row order.
  std::vector<Eigen::MatrixXd> oof;
  /// Posteriors of the model refit on outer_train(f) for outer_test(f).
  std::vector<Eigen::MatrixXd> test;
  /// AuditLog model ids behind each oof row / test row.
  std::vector<std::vector<std::size_t>> oof_models;
  std::vector<std::size_t> test_models;
  /// Log that owns the model ids above.
  std::shared_ptr<const AuditLog> audit;
};

struct SetupOutcome {
  RunReport report;
  std::optional<BasePosteriors> posteriors;
};

/// Majority class of each outer training fold predicted for its test fold.
RunReport run_baseline(const Dataset& d, const FoldPlan& plan, const PipelineConfig& cfg = {});

/// Nested cross-validation of one single-model setup. With `keep_posteriors`
/// the out-of-fold and test posteriors needed for stacking are retained.
SetupOutcome run_setup(const FeatureBank& bank, const FoldPlan& plan, const SetupSpec& spec,
                       const PipelineConfig& cfg = {}, bool keep_posteriors = false);

/// Stacked meta-classifier over the base setups' out-of-fold posteriors.
/// `cached` may already hold posteriors for some bases (keyed by setup id).
RunReport run_meta(const FeatureBank& bank, const FoldPlan& plan, std::span<const SetupSpec> base_specs,
                   const PipelineConfig& cfg = {}, const std::map<int, BasePosteriors>* cached = nullptr,
                   const SetupSpec* meta_spec = nullptr);

/// Throws ConfigError before any training when a setup (or a meta base)
/// needs a group the bank lacks, or an English group with untranslated articles.
void check_requirements(const FeatureBank& bank, const SetupSpec& spec);

/// Runs the selected standard setups (meta bases are run automatically) and
/// returns one report per selected id, in ascending id order.
std::vector<RunReport> run_setups(const FeatureBank& bank, std::span<const int> setup_ids,
                                  const PipelineConfig& cfg = {});

/// Writes report.json, confusion.csv and summary.txt into out_dir.
void emit_report(const RunReport& report, const std::filesystem::path& out_dir);

/// One line per report: setup,name,dimension,accuracy,macro_f1.
void write_table(std::span<const RunReport> reports, const std::filesystem::path& path);

}  // namespace newstox
