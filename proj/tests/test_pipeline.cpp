#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "newstox/error.hpp"
#include "newstox/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace newstox;
namespace nt = newstox::testing;

namespace {

PipelineConfig quick_config() {
  PipelineConfig cfg;
  cfg.grid.l2 = {0.1, 10.0};
  cfg.grid.fit.max_iterations = 150;
  cfg.mlp.epochs = 20;
  return cfg;
}

SetupSpec custom_setup(int id, std::vector<std::string> groups) {
  SetupSpec s;
  s.id = id;
  s.name = "custom " + std::to_string(id);
  s.language = "-";
  s.groups = std::move(groups);
  return s;
}

FeatureMatrix label_leak(const Dataset& d) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()), kNumLabels);
  std::vector<std::string> ids;
  const auto y = d.primary_labels();
  for (std::size_t i = 0; i < d.size(); ++i) {
    rows(static_cast<Eigen::Index>(i), y[i]) = 1;
    ids.push_back(d.article(i).id);
  }
  return FeatureMatrix(FeatureGroup{"leak", kNumLabels, FeatureSource::external}, ids, rows);
}

void expect_consistent(const RunReport& r, std::size_t n) {
  EXPECT_EQ(r.metrics.count, n);
  EXPECT_EQ(r.metrics.confusion.sum(), static_cast<std::int64_t>(n));
  EXPECT_DOUBLE_EQ(static_cast<double>(r.metrics.confusion.trace()) / static_cast<double>(n), r.metrics.accuracy);
  std::set<std::string> ids;
  for (const auto& p : r.predictions) EXPECT_TRUE(ids.insert(p.id).second);
  EXPECT_EQ(ids.size(), n);
  ASSERT_TRUE(r.audit);
  EXPECT_TRUE(r.audit->violations().empty());
}

}  // namespace

TEST(FoldPlanTest, TenArticles) {
  const auto d = nt::balanced_corpus(1);
  const auto d10 = nt::make_corpus({{Label::fake_news, 5}, {Label::non_toxic, 5}}, 2);
  const auto plan = plan_folds(d10);
  for (int f = 0; f < 5; ++f) EXPECT_EQ(plan.outer_test(f).size(), 2u);
  EXPECT_THROW(plan_folds(nt::make_corpus({{Label::fake_news, 4}}, 1)), ConfigError);
  EXPECT_NO_THROW(plan_folds(d));
}

TEST(FoldPlanTest, PartitionsAndDeterminism) {
  const auto d = nt::reference_corpus();
  const auto plan = plan_folds(d, 5, 5, 42);
  const auto again = plan_folds(d, 5, 5, 42);
  EXPECT_EQ(plan.outer.fold_of, again.outer.fold_of);
  std::multiset<std::size_t> sizes;
  for (int f = 0; f < 5; ++f) {
    sizes.insert(plan.outer_test(f).size());
    EXPECT_EQ(plan.inner[static_cast<std::size_t>(f)].fold_of, again.inner[static_cast<std::size_t>(f)].fold_of);
    const auto train = plan.outer_train(f);
    const auto& inner = plan.inner[static_cast<std::size_t>(f)];
    EXPECT_EQ(inner.fold_of.size(), train.size());
    std::size_t covered = 0;
    for (int j = 0; j < inner.num_folds; ++j) covered += inner.test_rows(j).size();
    EXPECT_EQ(covered, train.size());
  }
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{63, 63, 63, 64, 64}));
}

TEST(Setups, StandardTable) {
  const auto& s = standard_setups();
  ASSERT_EQ(s.size(), 14u);
  for (int i = 0; i < 14; ++i) EXPECT_EQ(s[static_cast<std::size_t>(i)].id, i + 1);
  EXPECT_EQ(s[0].classifier, ClassifierKind::baseline);
  EXPECT_EQ(s[13].classifier, ClassifierKind::meta);
  EXPECT_EQ(s[13].bases, (std::vector<int>{2, 3, 4, 5, 7, 8, 9, 10, 12}));
  EXPECT_EQ(standard_setup(6).groups, (std::vector<std::string>{"bert_bg", "xlm_bg", "stylo", "lsa_bg"}));
  const auto& r = FeatureRegistry::standard();
  auto width = [&](int id) {
    Eigen::Index w = 0;
    for (const auto& g : standard_setup(id).groups) w += r.at(g).expected_dim;
    return w;
  };
  EXPECT_EQ(width(2), 1536);
  EXPECT_EQ(width(3), 2048);
  EXPECT_EQ(width(4), 15);
  EXPECT_EQ(width(5), 215);
  EXPECT_EQ(width(6), 3814);
  EXPECT_EQ(width(7), 1024);
  EXPECT_EQ(width(8), 258);
  EXPECT_EQ(width(12), 6);
}

TEST(Setups, Selection) {
  EXPECT_EQ(parse_setup_selection("all").size(), 14u);
  EXPECT_EQ(parse_setup_selection("1"), (std::vector<int>{1}));
  EXPECT_EQ(parse_setup_selection("2-5,12"), (std::vector<int>{2, 3, 4, 5, 12}));
  EXPECT_EQ(parse_setup_selection("5,1,5"), (std::vector<int>{1, 5}));
  for (const char* bad : {"", "0", "15", "3-", "x", "5-2"}) EXPECT_THROW(parse_setup_selection(bad), ConfigError) << bad;
}

TEST(Baseline, ReferenceDistribution) {
  const auto d = nt::reference_corpus();
  const auto r = run_baseline(d, plan_folds(d));
  EXPECT_NEAR(r.accuracy_percent(), 30.3, 0.3);
  EXPECT_NEAR(r.macro_f1_percent(), 5.17, 0.05);
  expect_consistent(r, d.size());
}

TEST(Baseline, SingleClassCorpus) {
  const auto d = nt::make_corpus({{Label::conspiracies, 12}}, 4);
  const auto r = run_baseline(d, plan_folds(d));
  EXPECT_DOUBLE_EQ(r.metrics.accuracy, 1.0);
  EXPECT_NEAR(r.metrics.macro_f1, 1.0 / 9, 1e-12);
}

TEST(Baseline, EvenTwoClass) {
  const auto d = nt::make_corpus({{Label::fake_news, 50}, {Label::non_toxic, 50}}, 5);
  const auto r = run_baseline(d, plan_folds(d));
  EXPECT_NEAR(r.metrics.accuracy, 0.5, 0.05);
}

TEST(Baseline, MatchesGlobalMajorityShare) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = nt::make_corpus({{Label::non_toxic, 40}, {Label::fake_news, 25}, {Label::delusion, 12}}, seed);
    const auto r = run_baseline(d, plan_folds(d, 5, 5, seed));
    EXPECT_NEAR(r.metrics.accuracy, 40.0 / 77, 1.0 / 77);
  }
}

TEST(RunSetup, SeparableGroupScoresHigh) {
  const auto d = nt::balanced_corpus(20);
  FeatureBank bank(d);
  bank.add(nt::clustered_group(d, FeatureGroup{"signal", 20, FeatureSource::external}, 1.5, 3));
  const auto r = run_setup(bank, plan_folds(d), custom_setup(20, {"signal"}), quick_config()).report;
  EXPECT_GE(r.metrics.accuracy, 0.9);
  EXPECT_EQ(r.dimension, 20);
  EXPECT_EQ(r.folds.size(), 5u);
  for (const auto& f : r.folds) EXPECT_TRUE(f.l2.has_value());
  expect_consistent(r, d.size());
}

TEST(RunSetup, NativeAndFoldLocalGroups) {
  const auto d = nt::balanced_corpus(8);
  FeatureBank bank(d);
  auto cfg = quick_config();
  cfg.grid.l2 = {1.0};
  for (int id : {4, 5, 12}) {
    const auto r = run_setup(bank, plan_folds(d), standard_setup(id), cfg).report;
    expect_consistent(r, d.size());
  }
}

TEST(RunSetup, MissingGroupFailsBeforeTraining) {
  const auto d = nt::balanced_corpus(5);
  FeatureBank bank(d);
  try {
    run_setup(bank, plan_folds(d), standard_setup(2));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bert_bg"), std::string::npos);
  }
}

TEST(RunSetup, EnglishGroupNeedsTranslations) {
  const auto d = nt::balanced_corpus(5, 3, false);
  FeatureBank bank(d);
  bank.add(nt::clustered_group(d, FeatureRegistry::standard().at("nela_en"), 1.0, 1));
  EXPECT_THROW(check_requirements(bank, standard_setup(8)), ConfigError);
}

TEST(RunSetup, BankRejectsMisalignedGroups) {
  const auto d = nt::balanced_corpus(3);
  FeatureBank bank(d);
  const auto small = nt::balanced_corpus(2);
  EXPECT_THROW(bank.add(nt::clustered_group(small, FeatureGroup{"x", 3, FeatureSource::external}, 1, 1)), ConfigError);
  EXPECT_THROW(bank.add(nt::clustered_group(d, FeatureGroup{"bert_bg", 5, FeatureSource::external}, 1, 1)),
               DimensionError);
  EXPECT_TRUE(bank.has("lsa_bg"));
  EXPECT_TRUE(bank.has("stylo"));
  EXPECT_FALSE(bank.has("bert_bg"));
}

TEST(RunSetup, ResampledAndMlpVariants) {
  const auto d = nt::make_corpus({{Label::fake_news, 30}, {Label::delusion, 8}, {Label::non_toxic, 20}}, 6);
  FeatureBank bank(d);
  bank.add(nt::clustered_group(d, FeatureGroup{"signal", 6, FeatureSource::external}, 1.5, 4));
  auto spec = custom_setup(30, {"signal"});
  for (auto s : {ResampleStrategy::random, ResampleStrategy::smote}) {
    spec.resample.strategy = s;
    expect_consistent(run_setup(bank, plan_folds(d), spec, quick_config()).report, d.size());
  }
  spec.resample.strategy = ResampleStrategy::none;
  spec.classifier = ClassifierKind::mlp;
  const auto r = run_setup(bank, plan_folds(d), spec, quick_config()).report;
  expect_consistent(r, d.size());
  for (const auto& f : r.folds) EXPECT_FALSE(f.l2.has_value());
}

TEST(Meta, LabelLeakingBaseNeverSeesItsArticles) {
  const auto d = nt::balanced_corpus(10);
  FeatureBank bank(d);
  bank.add(label_leak(d));
  bank.add(nt::clustered_group(d, FeatureGroup{"noise", 4, FeatureSource::external}, 0.0, 5));
  const std::vector<SetupSpec> bases = {custom_setup(40, {"leak"}), custom_setup(41, {"noise"}), standard_setup(4)};
  const auto plan = plan_folds(d);
  const auto r = run_meta(bank, plan, bases, quick_config());
  EXPECT_EQ(r.dimension, 27);
  expect_consistent(r, d.size());
  const auto& audit = *r.audit;
  EXPECT_EQ(audit.count(AuditLog::Use::meta_train_feature), bases.size() * d.size() * 4);
  EXPECT_EQ(audit.count(AuditLog::Use::meta_test_feature), bases.size() * d.size());
  for (const auto& rec : audit.records()) {
    const auto& train = audit.training_rows(rec.model);
    EXPECT_FALSE(std::binary_search(train.begin(), train.end(), rec.row));
  }
}

TEST(Meta, DimensionIsBasesTimesClasses) {
  const auto d = nt::balanced_corpus(6);
  FeatureBank bank(d);
  std::vector<SetupSpec> bases;
  for (int i = 0; i < 9; ++i) bases.push_back(custom_setup(50 + i, {i % 2 ? "stylo" : "media"}));
  auto cfg = quick_config();
  cfg.grid.l2 = {1.0};
  cfg.grid.fit.max_iterations = 30;
  const auto r = run_meta(bank, plan_folds(d), bases, cfg);
  EXPECT_EQ(r.dimension, 81);
}

TEST(Audit, DetectsViolation) {
  AuditLog log;
  const auto m = log.register_model("m", {0, 1, 2});
  log.record(m, 3, AuditLog::Use::test_prediction);
  EXPECT_TRUE(log.violations().empty());
  log.record(m, 1, AuditLog::Use::meta_train_feature);
  ASSERT_EQ(log.violations().size(), 1u);
  AuditLog other;
  other.register_model("n", {5});
  other.record(0, 6, AuditLog::Use::test_prediction);
  log.merge(other);
  EXPECT_EQ(log.model_count(), 2u);
  EXPECT_EQ(log.records().back().model, 1u);
  EXPECT_EQ(log.violations().size(), 1u);
}

TEST(Report, FilesAndDeterminism) {
  const auto d = nt::reference_corpus();
  const auto r = run_baseline(d, plan_folds(d));
  const auto dir = nt::scratch_dir("report");
  emit_report(r, dir / "a");
  emit_report(r, dir / "b");
  for (const char* f : {"report.json", "confusion.csv", "summary.txt"})
    EXPECT_EQ(nt::read_file(dir / "a" / f), nt::read_file(dir / "b" / f)) << f;
  const auto csv = nt::read_file(dir / "a" / "confusion.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto dist = label_distribution(d);
  for (auto l : kAllLabels) {
    std::getline(in, line);
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    EXPECT_EQ(cell, to_string(l));
    long long sum = 0;
    while (std::getline(cells, cell, ',')) sum += std::stoll(cell);
    EXPECT_EQ(sum, static_cast<long long>(dist.at(l)));
  }
  const auto json = nlohmann::json::parse(nt::read_file(dir / "a" / "report.json"));
  EXPECT_EQ(json["setup"], 1);
  EXPECT_TRUE(json["audit"]["passed"].get<bool>());
}

TEST(Report, TableRows) {
  const auto d = nt::reference_corpus();
  const std::vector<RunReport> reports = {run_baseline(d, plan_folds(d))};
  const auto dir = nt::scratch_dir("table");
  write_table(reports, dir / "table3.csv");
  const auto text = nt::read_file(dir / "table3.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "setup,language,feature_set,dimension,accuracy,macro_f1");
  EXPECT_NE(text.find("30.28"), std::string::npos) << text;
  EXPECT_NE(text.find("5.17"), std::string::npos) << text;
}
