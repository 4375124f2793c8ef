#include "newstox/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <spdlog/spdlog.h>

#include "newstox/error.hpp"
#include "newstox/local_features.hpp"
#include "newstox/math.hpp"
#include "newstox/rng.hpp"

namespace newstox {

namespace {

constexpr std::string_view kLsaGroup = "lsa_bg";

template <typename T>
std::vector<T> gather(std::span<const T> values, std::span<const std::size_t> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(values[r]);
  return out;
}

std::string join(const std::vector<std::string>& items, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  if (items.size() > limit) out += ", ... (" + std::to_string(items.size()) + " total)";
  return out;
}

/// Design matrices for one training partition and the rows it is applied to.
/// LSA and standardization are fitted on the training rows only.
struct Design {
  Eigen::MatrixXd train;
  Eigen::MatrixXd apply;
};

Design build_design(const FeatureBank& bank, const std::vector<std::string>& groups,
                    std::span<const std::size_t> train_rows, std::span<const std::size_t> apply_rows,
                    const PipelineConfig& cfg) {
  std::vector<Eigen::MatrixXd> train_blocks, apply_blocks;
  Eigen::Index width = 0;
  for (const auto& g : groups) {
    if (g == kLsaGroup) {
      const auto model = fit_lsa(bank.dataset(), train_rows, cfg.lsa);
      train_blocks.push_back(lsa_features(bank.dataset(), train_rows, model));
      apply_blocks.push_back(lsa_features(bank.dataset(), apply_rows, model));
    } else {
      train_blocks.push_back(bank.rows(g, train_rows));
      apply_blocks.push_back(bank.rows(g, apply_rows));
    }
    width += train_blocks.back().cols();
  }
  Design out{Eigen::MatrixXd(static_cast<Eigen::Index>(train_rows.size()), width),
             Eigen::MatrixXd(static_cast<Eigen::Index>(apply_rows.size()), width)};
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < train_blocks.size(); ++i) {
    const auto w = train_blocks[i].cols();
    out.train.middleCols(col, w) = train_blocks[i];
    out.apply.middleCols(col, w) = apply_blocks[i];
    col += w;
  }
  const auto scaler = ColumnScaler<double>::fit(out.train);
  out.train = scaler.apply(out.train);
  out.apply = scaler.apply(out.apply);
  return out;
}

Eigen::MatrixXd constant_posteriors(Eigen::Index rows, int cls) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(rows, kNumLabels);
  p.col(cls).setOnes();
  return p;
}

/// Fits the setup's classifier (after optional resampling) and returns test posteriors.
Eigen::MatrixXd fit_predict(const Eigen::MatrixXd& x_train, std::span<const int> y_train,
                            const Eigen::MatrixXd& x_apply, const SetupSpec& spec, double l2,
                            const PipelineConfig& cfg, std::uint64_t seed) {
  auto plan = spec.resample;
  plan.seed = derive_seed(seed, {0x7e});
  const auto data = resample(x_train, y_train, plan);
  if (std::all_of(data.y.begin(), data.y.end(), [&](int c) { return c == data.y.front(); }))
    return constant_posteriors(x_apply.rows(), data.y.front());
  if (spec.classifier == ClassifierKind::mlp)
    return fit_mlp(data.x, data.y, cfg.mlp, seed, kNumLabels).predict_proba(x_apply);
  return fit_softmax(data.x, data.y, l2, seed, kNumLabels, cfg.grid.fit).predict_proba(x_apply);
}

std::string l2_tag(double l2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", l2);
  return buf;
}

/// Pools per-article predictions (stored by article row) into a report.
void finish_report(RunReport& r, const Dataset& d, const FoldPlan& plan, const std::vector<int>& predicted) {
  const auto truth = d.primary_labels();
  r.metrics = compute_metrics(truth, predicted, kNumLabels);
  r.predictions.clear();
  for (std::size_t i = 0; i < d.size(); ++i)
    r.predictions.push_back({d.article(i).id, plan.outer.fold_of[i], truth[i], predicted[i]});
  for (auto& fm : r.folds) {
    const auto rows = plan.outer_test(fm.fold);
    const auto m = compute_metrics(gather<int>(truth, rows), gather<int>(predicted, rows), kNumLabels);
    fm.test_size = rows.size();
    fm.accuracy = 100.0 * m.accuracy;
    fm.macro_f1 = 100.0 * m.macro_f1;
  }
}

nlohmann::ordered_json spec_json(const SetupSpec& spec) {
  nlohmann::ordered_json j;
  j["id"] = spec.id;
  j["classifier"] = std::string(to_string(spec.classifier));
  j["groups"] = spec.groups;
  j["resample"] = std::string(to_string(spec.resample.strategy));
  if (spec.resample.strategy == ResampleStrategy::smote) j["k_neighbors"] = spec.resample.k_neighbors;
  if (!spec.bases.empty()) j["bases"] = spec.bases;
  return j;
}

nlohmann::ordered_json config_snapshot(const PipelineConfig& cfg, const SetupSpec& spec) {
  nlohmann::ordered_json j = cfg.to_json();
  j["setup"] = spec_json(spec);
  return j;
}

SetupSpec resolve(const SetupSpec& standard, const PipelineConfig& cfg) {
  SetupSpec s = standard;
  if (s.classifier == ClassifierKind::softmax || s.classifier == ClassifierKind::mlp) {
    s.classifier = cfg.base_classifier;
    s.resample = cfg.resample;
  }
  return s;
}

}  // namespace

// --- fold planning ----------------------------------------------------------

FoldPlan plan_folds(const Dataset& d, int outer, int inner, std::uint64_t seed) {
  const auto labels = d.primary_labels();
  FoldPlan plan;
  plan.seed = seed;
  plan.outer = stratified_folds(labels, outer, derive_seed(seed, {0x0f}));
  if (!plan.outer.fully_stratified)
    spdlog::warn("fold plan: some class has fewer than {} articles; stratification is best effort", outer);
  for (int f = 0; f < outer; ++f) {
    const auto train = plan.outer_train(f);
    plan.inner.push_back(
        stratified_folds(gather<int>(labels, train), inner, derive_seed(seed, {0x1f, static_cast<std::uint64_t>(f)})));
  }
  return plan;
}

// --- setups -----------------------------------------------------------------

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::baseline: return "baseline";
    case ClassifierKind::softmax: return "softmax";
    case ClassifierKind::mlp: return "mlp";
    case ClassifierKind::meta: return "meta";
  }
  return "softmax";
}

std::optional<ClassifierKind> parse_classifier(std::string_view name) {
  if (name == "softmax") return ClassifierKind::softmax;
  if (name == "mlp") return ClassifierKind::mlp;
  return std::nullopt;
}

const std::vector<SetupSpec>& standard_setups() {
  using K = ClassifierKind;
  static const std::vector<SetupSpec> setups = {
      {1, "Baseline", "-", {}, K::baseline, {}, {}},
      {2, "BERT(title), BERT(text)", "BG", {"bert_bg"}, K::softmax, {}, {}},
      {3, "XLM(title), XLM(text)", "BG", {"xlm_bg"}, K::softmax, {}, {}},
      {4, "Styl(title), Styl(text)", "BG", {"stylo"}, K::softmax, {}, {}},
      {5, "LSA(title), LSA(text)", "BG", {"lsa_bg"}, K::softmax, {}, {}},
      {6, "Bulgarian combined", "BG", {"bert_bg", "xlm_bg", "stylo", "lsa_bg"}, K::softmax, {}, {}},
      {7, "USE(title), USE(text)", "EN", {"use_en"}, K::softmax, {}, {}},
      {8, "NELA(title), NELA(text)", "EN", {"nela_en"}, K::softmax, {}, {}},
      {9, "BERT(title), BERT(text)", "EN", {"bert_en"}, K::softmax, {}, {}},
      {10, "ElMo(title), ElMo(text)", "EN", {"elmo_en"}, K::softmax, {}, {}},
      {11, "English combined", "EN", {"use_en", "nela_en", "bert_en", "elmo_en"}, K::softmax, {}, {}},
      {12, "Media meta", "-", {"media"}, K::softmax, {}, {}},
      {13, "All combined", "-",
       {"bert_bg", "xlm_bg", "stylo", "lsa_bg", "use_en", "nela_en", "bert_en", "elmo_en", "media"},
       K::softmax, {}, {}},
      {14, "Meta classifier", "-", {}, K::meta, {}, {2, 3, 4, 5, 7, 8, 9, 10, 12}},
  };
  return setups;
}

const SetupSpec& standard_setup(int id) {
  const auto& all = standard_setups();
  if (id < 1 || id > static_cast<int>(all.size())) throw ConfigError("unknown setup " + std::to_string(id));
  return all[static_cast<std::size_t>(id - 1)];
}

std::vector<int> parse_setup_selection(std::string_view text) {
  const int last = static_cast<int>(standard_setups().size());
  std::set<int> ids;
  if (text == "all") {
    for (int i = 1; i <= last; ++i) ids.insert(i);
    return {ids.begin(), ids.end()};
  }
  auto number = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 1 || v > last)
      throw ConfigError("bad setup selection '" + std::string(text) + "'");
    return v;
  };
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (auto dash = item.find('-'); dash != std::string_view::npos) {
      int a = number(item.substr(0, dash)), b = number(item.substr(dash + 1));
      if (a > b) throw ConfigError("bad setup range '" + std::string(item) + "'");
      for (int i = a; i <= b; ++i) ids.insert(i);
    } else {
      ids.insert(number(item));
    }
  }
  if (ids.empty()) throw ConfigError("empty setup selection");
  return {ids.begin(), ids.end()};
}

// --- features ---------------------------------------------------------------

FeatureMatrix native_feature_matrix(const Dataset& d, std::string_view group) {
  const auto n = static_cast<Eigen::Index>(d.size());
  std::vector<std::string> ids;
  for (const auto& a : d.articles()) ids.push_back(a.id);
  Eigen::MatrixXd rows;
  if (group == "stylo") {
    rows.resize(n, StyloVector::kDim);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& a = d.article(static_cast<std::size_t>(i));
      rows.row(i) = stylometric_features(a.title, a.body).to_vector().transpose();
    }
  } else if (group == "media") {
    rows.resize(n, MediaVector::kDim);
    for (Eigen::Index i = 0; i < n; ++i)
      rows.row(i) = media_features(d.medium_of(d.article(static_cast<std::size_t>(i)))).to_vector().transpose();
  } else {
    throw ConfigError("'" + std::string(group) + "' is not a natively computed group");
  }
  return FeatureMatrix(FeatureRegistry::standard().at(group), std::move(ids), std::move(rows));
}

FeatureBank::FeatureBank(const Dataset& d, const FeatureRegistry& registry) : dataset_(&d), registry_(registry) {
  for (std::string_view g : {"stylo", "media"}) groups_.emplace(std::string(g), native_feature_matrix(d, g).rows());
}

Alignment check_alignment(const FeatureMatrix& m, const Dataset& d) {
  Alignment a;
  for (const auto& art : d.articles())
    if (!m.find(art.id)) a.missing.push_back(art.id);
  for (const auto& id : m.ids())
    if (!d.find(id)) a.extra.push_back(id);
  return a;
}

void FeatureBank::add(const FeatureMatrix& m) {
  const auto& name = m.group().name;
  if (name == kLsaGroup) throw ConfigError("lsa_bg is fitted per fold and cannot be ingested");
  if (auto known = registry_.find(name); known && known->expected_dim != m.dim())
    throw DimensionError("group " + name + ": expected dim " + std::to_string(known->expected_dim) + ", got " +
                         std::to_string(m.dim()));
  const auto a = check_alignment(m, *dataset_);
  if (!a.ok()) {
    std::string msg = "group " + name + " does not cover the corpus exactly";
    if (!a.missing.empty()) msg += "; missing ids: " + join(a.missing);
    if (!a.extra.empty()) msg += "; unknown ids: " + join(a.extra);
    throw ConfigError(msg);
  }
  std::vector<std::string> ids;
  for (const auto& art : dataset_->articles()) ids.push_back(art.id);
  if (!registry_.find(name)) registry_.add(m.group());
  groups_.insert_or_assign(name, m.select(ids));
}

bool FeatureBank::has(std::string_view group) const { return group == kLsaGroup || groups_.contains(group); }

std::vector<std::string> FeatureBank::available() const {
  std::vector<std::string> out{std::string(kLsaGroup)};
  for (const auto& [name, m] : groups_) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::Index FeatureBank::dim(std::string_view group) const {
  if (group == kLsaGroup) return registry_.at(kLsaGroup).expected_dim;
  auto it = groups_.find(group);
  if (it == groups_.end()) throw ConfigError("feature group '" + std::string(group) + "' is not available");
  return it->second.cols();
}

Eigen::MatrixXd FeatureBank::rows(std::string_view group, std::span<const std::size_t> article_rows) const {
  auto it = groups_.find(group);
  if (it == groups_.end()) throw ConfigError("feature group '" + std::string(group) + "' is not available");
  return take_rows(it->second, article_rows);
}

// --- configuration ----------------------------------------------------------

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["outer_folds"] = outer_folds;
  j["inner_folds"] = inner_folds;
  j["l2_grid"] = grid.l2;
  j["optimizer"] = {{"learning_rate", grid.fit.adam.learning_rate},
                    {"beta1", grid.fit.adam.beta1},
                    {"beta2", grid.fit.adam.beta2},
                    {"max_iterations", grid.fit.max_iterations},
                    {"tolerance", grid.fit.tolerance}};
  j["lsa"] = {{"title_dim", lsa.title_dim}, {"body_dim", lsa.body_dim}};
  j["base_classifier"] = std::string(to_string(base_classifier));
  if (base_classifier == ClassifierKind::mlp)
    j["mlp"] = {{"epochs", mlp.epochs},
                {"learning_rate", mlp.learning_rate},
                {"dropout_rate", mlp.dropout_rate},
                {"batch_size", mlp.batch_size}};
  j["resample"] = std::string(to_string(resample.strategy));
  return j;
}

// --- leak audit -------------------------------------------------------------

std::size_t AuditLog::register_model(std::string tag, std::vector<std::size_t> train_rows) {
  std::sort(train_rows.begin(), train_rows.end());
  models_.push_back({std::move(tag), std::move(train_rows)});
  return models_.size() - 1;
}

void AuditLog::record(std::size_t model, std::size_t article_row, Use use) {
  records_.push_back({model, article_row, use});
}

void AuditLog::record_all(std::size_t model, std::span<const std::size_t> article_rows, Use use) {
  for (auto r : article_rows) record(model, r, use);
}

std::vector<std::string> AuditLog::violations() const {
  std::vector<std::string> out;
  for (const auto& rec : records_) {
    const auto& m = models_.at(rec.model);
    if (std::binary_search(m.train.begin(), m.train.end(), rec.row))
      out.push_back(std::string(to_string(rec.use)) + ": row " + std::to_string(rec.row) + " predicted by " + m.tag +
                    ", which trained on it");
  }
  return out;
}

std::size_t AuditLog::count(Use use) const {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [&](const Record& r) { return r.use == use; }));
}

void AuditLog::merge(const AuditLog& other) {
  const auto offset = models_.size();
  models_.insert(models_.end(), other.models_.begin(), other.models_.end());
  for (auto rec : other.records_) {
    rec.model += offset;
    records_.push_back(rec);
  }
}

std::string_view to_string(AuditLog::Use use) {
  switch (use) {
    case AuditLog::Use::test_prediction: return "test_prediction";
    case AuditLog::Use::meta_train_feature: return "meta_train_feature";
    case AuditLog::Use::meta_test_feature: return "meta_test_feature";
    case AuditLog::Use::inner_validation: return "inner_validation";
  }
  return "unknown";
}

// --- running ----------------------------------------------------------------

void check_requirements(const FeatureBank& bank, const SetupSpec& spec) {
  std::vector<std::string> groups = spec.groups;
  for (int b : spec.bases)
    for (const auto& g : standard_setup(b).groups) groups.push_back(g);
  std::vector<std::string> missing;
  for (const auto& g : groups)
    if (!bank.has(g) && std::find(missing.begin(), missing.end(), g) == missing.end()) missing.push_back(g);
  if (!missing.empty())
    throw ConfigError("setup " + std::to_string(spec.id) + " needs unavailable feature groups: " + join(missing));
  const bool english = std::any_of(groups.begin(), groups.end(), [](const std::string& g) { return g.ends_with("_en"); });
  if (english) {
    std::vector<std::string> untranslated;
    for (const auto& a : bank.dataset().articles())
      if (!a.has_translation()) untranslated.push_back(a.id);
    if (!untranslated.empty())
      throw ConfigError("setup " + std::to_string(spec.id) + " uses English features but these articles lack " +
                        "translations: " + join(untranslated));
  }
}

RunReport run_baseline(const Dataset& d, const FoldPlan& plan, const PipelineConfig& cfg) {
  RunReport r;
  const auto& spec = standard_setup(1);
  r.setup_id = spec.id;
  r.name = spec.name;
  r.language = spec.language;
  r.config = config_snapshot(cfg, spec);
  auto audit = std::make_shared<AuditLog>();
  const auto y = d.primary_labels();
  std::vector<int> predicted(d.size(), 0);
  for (int f = 0; f < plan.num_outer(); ++f) {
    const auto train = plan.outer_train(f);
    const auto test = plan.outer_test(f);
    std::array<std::size_t, kNumLabels> counts{};
    for (auto row : train) ++counts[static_cast<std::size_t>(y[row])];
    const int majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const auto model = audit->register_model("baseline/fold" + std::to_string(f), train);
    for (auto row : test) predicted[row] = majority;
    audit->record_all(model, test, AuditLog::Use::test_prediction);
    r.folds.push_back({f, 0, 0, 0, std::nullopt});
  }
  finish_report(r, d, plan, predicted);
  r.audit = audit;
  return r;
}

SetupOutcome run_setup(const FeatureBank& bank, const FoldPlan& plan, const SetupSpec& spec,
                       const PipelineConfig& cfg, bool keep_posteriors) {
  if (spec.classifier == ClassifierKind::baseline) return {run_baseline(bank.dataset(), plan, cfg), std::nullopt};
  if (spec.classifier == ClassifierKind::meta) throw ConfigError("run_setup: use run_meta for the meta-classifier");
  if (spec.groups.empty()) throw ConfigError("setup " + std::to_string(spec.id) + " lists no feature groups");
  check_requirements(bank, spec);

  const auto& d = bank.dataset();
  const auto y = d.primary_labels();
  const bool softmax = spec.classifier == ClassifierKind::softmax;
  const std::vector<double> grid = softmax ? cfg.grid.l2 : std::vector<double>{0.0};
  if (grid.empty()) throw ConfigError("empty l2 grid");

  SetupOutcome out;
  auto& r = out.report;
  r.setup_id = spec.id;
  r.name = spec.name;
  r.language = spec.language;
  for (const auto& g : spec.groups) r.dimension += bank.dim(g);
  r.config = config_snapshot(cfg, spec);
  auto audit = std::make_shared<AuditLog>();
  BasePosteriors posteriors;
  std::vector<int> predicted(d.size(), 0);
  const auto setup_key = static_cast<std::uint64_t>(spec.id);

  for (int f = 0; f < plan.num_outer(); ++f) {
    const auto fold_key = static_cast<std::uint64_t>(f);
    const auto train = plan.outer_train(f);
    const auto test = plan.outer_test(f);
    const auto& inner = plan.inner.at(static_cast<std::size_t>(f));
    const bool need_inner = keep_posteriors || grid.size() > 1;

    std::vector<Eigen::MatrixXd> oof(grid.size(), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(train.size()), kNumLabels));
    std::vector<std::vector<std::size_t>> oof_models(grid.size(), std::vector<std::size_t>(train.size(), 0));
    std::vector<double> mean_accuracy(grid.size(), 0.0);
    if (need_inner) {
      for (int j = 0; j < inner.num_folds; ++j) {
        const auto fit_pos = inner.train_rows(j);
        const auto val_pos = inner.test_rows(j);
        if (val_pos.empty()) continue;
        const auto fit_rows = gather<std::size_t>(train, fit_pos);
        const auto val_rows = gather<std::size_t>(train, val_pos);
        const auto design = build_design(bank, spec.groups, fit_rows, val_rows, cfg);
        const auto fit_y = gather<int>(y, fit_rows);
        for (std::size_t g = 0; g < grid.size(); ++g) {
          const auto seed = derive_seed(cfg.seed, {setup_key, fold_key, static_cast<std::uint64_t>(j) + 1, g});
          const auto p = fit_predict(design.train, fit_y, design.apply, spec, grid[g], cfg, seed);
          const auto model = audit->register_model("setup" + std::to_string(spec.id) + "/fold" + std::to_string(f) +
                                                       "/inner" + std::to_string(j) + "/l2=" + l2_tag(grid[g]),
                                                   fit_rows);
          audit->record_all(model, val_rows, AuditLog::Use::inner_validation);
          std::size_t correct = 0;
          const auto pred = argmax_rows(p);
          for (std::size_t v = 0; v < val_pos.size(); ++v) {
            oof[g].row(static_cast<Eigen::Index>(val_pos[v])) = p.row(static_cast<Eigen::Index>(v));
            oof_models[g][val_pos[v]] = model;
            correct += pred[v] == y[val_rows[v]];
          }
          mean_accuracy[g] += static_cast<double>(correct) / static_cast<double>(val_pos.size());
        }
      }
      for (auto& a : mean_accuracy) a /= inner.num_folds;
    }
    const std::size_t best = grid.size() > 1 ? best_grid_index(grid, mean_accuracy) : 0;

    const auto design = build_design(bank, spec.groups, train, test, cfg);
    const auto seed = derive_seed(cfg.seed, {setup_key, fold_key, 0});
    const auto p = fit_predict(design.train, gather<int>(y, train), design.apply, spec, grid[best], cfg, seed);
    const auto model = audit->register_model("setup" + std::to_string(spec.id) + "/fold" + std::to_string(f), train);
    audit->record_all(model, test, AuditLog::Use::test_prediction);
    const auto pred = argmax_rows(p);
    for (std::size_t t = 0; t < test.size(); ++t) predicted[test[t]] = pred[t];
    r.folds.push_back({f, 0, 0, 0, softmax ? std::optional<double>(grid[best]) : std::nullopt});

    if (keep_posteriors) {
      posteriors.oof.push_back(std::move(oof[best]));
      posteriors.oof_models.push_back(std::move(oof_models[best]));
      posteriors.test.push_back(p);
      posteriors.test_models.push_back(model);
    }
  }
  finish_report(r, d, plan, predicted);
  r.audit = audit;
  if (keep_posteriors) out.posteriors = std::move(posteriors);
  return out;
}

RunReport run_meta(const FeatureBank& bank, const FoldPlan& plan, std::span<const SetupSpec> base_specs,
                   const PipelineConfig& cfg, const std::map<int, BasePosteriors>* cached,
                   const SetupSpec* meta_spec) {
  if (base_specs.empty()) throw ConfigError("meta-classifier needs at least one base setup");
  SetupSpec spec = meta_spec ? *meta_spec : standard_setup(14);
  spec.bases.clear();
  for (const auto& b : base_specs) spec.bases.push_back(b.id);
  for (const auto& b : base_specs) check_requirements(bank, b);

  const auto& d = bank.dataset();
  const auto y = d.primary_labels();
  auto audit = std::make_shared<AuditLog>();

  // Base posteriors plus the audit offset of each base's models in our log.
  std::vector<BasePosteriors> bases;
  std::vector<std::size_t> offsets;
  for (const auto& b : base_specs) {
    BasePosteriors post;
    std::shared_ptr<const AuditLog> base_audit;
    if (cached && cached->contains(b.id)) {
      post = cached->at(b.id);
    } else {
      spdlog::info("meta: running base setup {}", b.id);
      auto outcome = run_setup(bank, plan, b, cfg, true);
      post = std::move(*outcome.posteriors);
      base_audit = outcome.report.audit;
    }
    if (!post.audit && !base_audit) throw ConfigError("meta: base posteriors for setup " + std::to_string(b.id) + " lack an audit log");
    offsets.push_back(audit->model_count());
    audit->merge(base_audit ? *base_audit : *post.audit);
    bases.push_back(std::move(post));
  }

  RunReport r;
  r.setup_id = spec.id;
  r.name = spec.name;
  r.language = spec.language;
  r.dimension = static_cast<Eigen::Index>(base_specs.size()) * kNumLabels;
  r.config = config_snapshot(cfg, spec);
  std::vector<int> predicted(d.size(), 0);

  for (int f = 0; f < plan.num_outer(); ++f) {
    const auto train = plan.outer_train(f);
    const auto test = plan.outer_test(f);
    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train.size()), r.dimension);
    Eigen::MatrixXd x_test(static_cast<Eigen::Index>(test.size()), r.dimension);
    for (std::size_t b = 0; b < bases.size(); ++b) {
      const auto& post = bases[b];
      const auto fi = static_cast<std::size_t>(f);
      x_train.middleCols(static_cast<Eigen::Index>(b) * kNumLabels, kNumLabels) = post.oof.at(fi);
      x_test.middleCols(static_cast<Eigen::Index>(b) * kNumLabels, kNumLabels) = post.test.at(fi);
      for (std::size_t t = 0; t < train.size(); ++t)
        audit->record(post.oof_models.at(fi)[t] + offsets[b], train[t], AuditLog::Use::meta_train_feature);
      audit->record_all(post.test_models.at(fi) + offsets[b], test, AuditLog::Use::meta_test_feature);
    }
    const auto y_train = gather<int>(y, train);
    const auto& inner = plan.inner.at(static_cast<std::size_t>(f));
    const double l2 = grid_search(x_train, y_train, cfg.grid, inner, kNumLabels).best_l2;
    const auto seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(spec.id), static_cast<std::uint64_t>(f), 0});
    Eigen::MatrixXd p;
    if (std::all_of(y_train.begin(), y_train.end(), [&](int c) { return c == y_train.front(); }))
      p = constant_posteriors(x_test.rows(), y_train.front());
    else
      p = fit_softmax(x_train, y_train, l2, seed, kNumLabels, cfg.grid.fit).predict_proba(x_test);
    const auto model = audit->register_model("meta/fold" + std::to_string(f), train);
    audit->record_all(model, test, AuditLog::Use::test_prediction);
    const auto pred = argmax_rows(p);
    for (std::size_t t = 0; t < test.size(); ++t) predicted[test[t]] = pred[t];
    r.folds.push_back({f, 0, 0, 0, l2});
  }
  finish_report(r, d, plan, predicted);
  r.audit = audit;
  return r;
}

std::vector<RunReport> run_setups(const FeatureBank& bank, std::span<const int> setup_ids, const PipelineConfig& cfg) {
  std::set<int> selected(setup_ids.begin(), setup_ids.end());
  for (int id : selected) check_requirements(bank, standard_setup(id));
  const auto plan = plan_folds(bank.dataset(), cfg.outer_folds, cfg.inner_folds, cfg.seed);

  const bool meta = selected.contains(14);
  std::set<int> bases;
  if (meta)
    for (int b : standard_setup(14).bases) bases.insert(b);

  std::map<int, RunReport> reports;
  std::map<int, BasePosteriors> cached;
  std::set<int> to_run = selected;
  to_run.insert(bases.begin(), bases.end());
  to_run.erase(14);
  for (int id : to_run) {
    const auto spec = resolve(standard_setup(id), cfg);
    spdlog::info("running setup {} ({})", id, spec.name);
    auto outcome = run_setup(bank, plan, spec, cfg, bases.contains(id));
    if (outcome.posteriors) {
      outcome.posteriors->audit = outcome.report.audit;
      cached.emplace(id, std::move(*outcome.posteriors));
    }
    if (selected.contains(id)) reports.emplace(id, std::move(outcome.report));
  }
  if (meta) {
    spdlog::info("running setup 14 (meta classifier)");
    std::vector<SetupSpec> base_specs;
    for (int b : standard_setup(14).bases) base_specs.push_back(resolve(standard_setup(b), cfg));
    reports.emplace(14, run_meta(bank, plan, base_specs, cfg, &cached));
  }
  std::vector<RunReport> out;
  for (auto& [id, rep] : reports) out.push_back(std::move(rep));
  return out;
}

}  // namespace newstox
