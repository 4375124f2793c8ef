#include <fstream>

#include <gtest/gtest.h>

#include "newstox/corpus.hpp"
#include "newstox/error.hpp"
#include "support/synthetic.hpp"

using namespace newstox;
namespace nt = newstox::testing;

namespace {

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
}

const std::string kMedium =
    R"({"id":"m1","has_editor":true,"has_responsible_person":false,"bg_server":true,"alexa_rank":100,"has_domain_person":false,"created_date":"2005-01-01"})";

std::string article(const std::string& id, const std::string& medium = "m1", const std::string& labels = R"(["fake_news"])") {
  return R"({"id":")" + id + R"(","title":"Заглавие","body":"Текст на статията.","title_en":null,"body_en":null,"labels":)" +
         labels + R"(,"medium_id":")" + medium + R"("})";
}

}  // namespace

TEST(Corpus, LoadsMinimalBundle) {
  const auto dir = nt::scratch_dir("corpus_min");
  write_lines(dir / "a.jsonl", {article("x1"), article("x2")});
  write_lines(dir / "m.jsonl", {kMedium});
  const auto d = load_dataset(dir / "a.jsonl", dir / "m.jsonl");
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.media().size(), 1u);
  EXPECT_EQ(d.article(0).title, "Заглавие");
  EXPECT_FALSE(d.article(0).has_translation());
  EXPECT_EQ(d.medium_of(d.article(1)).alexa_rank, 100);
}

TEST(Corpus, UnresolvedMediumNamesArticle) {
  const auto dir = nt::scratch_dir("corpus_unresolved");
  write_lines(dir / "a.jsonl", {article("x1"), article("orphan", "nowhere")});
  write_lines(dir / "m.jsonl", {kMedium});
  try {
    load_dataset(dir / "a.jsonl", dir / "m.jsonl");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("orphan"), std::string::npos) << e.what();
  }
}

TEST(Corpus, DuplicateIdRejected) {
  const auto dir = nt::scratch_dir("corpus_dup");
  write_lines(dir / "a.jsonl", {article("x1"), article("x1")});
  write_lines(dir / "m.jsonl", {kMedium});
  EXPECT_THROW(load_dataset(dir / "a.jsonl", dir / "m.jsonl"), ValidationError);
}

TEST(Corpus, ParseErrorCarriesLineNumber) {
  const auto dir = nt::scratch_dir("corpus_parse");
  write_lines(dir / "a.jsonl", {article("x1"), "{not json"});
  write_lines(dir / "m.jsonl", {kMedium});
  try {
    load_dataset(dir / "a.jsonl", dir / "m.jsonl");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u) << e.what();
  }
}

TEST(Corpus, EmptyTextAndLabelRulesRejected) {
  Article a{"a", "", "body", std::nullopt, std::nullopt, {Label::fake_news}, "m"};
  EXPECT_FALSE(article_problems(a).empty());
  a.title = "t";
  EXPECT_TRUE(article_problems(a).empty());
  a.labels = {};
  EXPECT_FALSE(article_problems(a).empty());
  a.labels = {Label::non_toxic, Label::fake_news};
  EXPECT_FALSE(article_problems(a).empty());
}

TEST(Corpus, MediumRules) {
  Medium m;
  m.id = "m";
  EXPECT_TRUE(medium_problems(m).empty());
  m.alexa_rank = 0;
  EXPECT_FALSE(medium_problems(m).empty());
  m.alexa_rank = 1;
  m.created_date = Date{std::chrono::year{2019}, std::chrono::January, std::chrono::day{2}};
  EXPECT_FALSE(medium_problems(m).empty());
}

TEST(Corpus, LabelNamesRoundTrip) {
  for (auto l : kAllLabels) EXPECT_EQ(parse_label(to_string(l)), l);
  EXPECT_FALSE(parse_label("satire").has_value());
  EXPECT_EQ(label_index(Label::non_toxic), 8);
}

TEST(Corpus, SaveLoadRoundTripKeepsCyrillic) {
  const auto d = nt::reference_corpus(3);
  const auto dir = nt::scratch_dir("corpus_roundtrip");
  save_dataset(d, dir / "a.jsonl", dir / "m.jsonl");
  const auto back = load_dataset(dir / "a.jsonl", dir / "m.jsonl");
  EXPECT_TRUE(back == d);
  save_dataset(back, dir / "a2.jsonl", dir / "m2.jsonl");
  EXPECT_EQ(nt::read_file(dir / "a.jsonl"), nt::read_file(dir / "a2.jsonl"));
  EXPECT_NE(nt::read_file(dir / "a.jsonl").find("България"), std::string::npos);
}

TEST(Corpus, DistributionCountsPrimaryLabels) {
  const auto d = nt::reference_corpus();
  const auto dist = label_distribution(d);
  EXPECT_EQ(dist.size(), 9u);
  std::size_t total = 0;
  for (const auto& [l, n] : dist) total += n;
  EXPECT_EQ(total, d.size());
  EXPECT_EQ(d.size(), 317u);
  EXPECT_EQ(dist.at(Label::non_toxic), 96u);
  EXPECT_EQ(total - dist.at(Label::non_toxic), 221u);
}

TEST(Corpus, DistributionSingleAndSymmetric) {
  const auto one = nt::make_corpus({{Label::non_toxic, 1}}, 1);
  const auto d1 = label_distribution(one);
  for (const auto& [l, n] : d1) EXPECT_EQ(n, l == Label::non_toxic ? 1u : 0u);
  const auto nine = nt::balanced_corpus(1);
  for (const auto& [l, n] : label_distribution(nine)) EXPECT_EQ(n, 1u);
}

TEST(Corpus, DatesParseAndFormat) {
  const auto d = parse_date("2005-01-01");
  ASSERT_TRUE(d);
  EXPECT_EQ(format_date(*d), "2005-01-01");
  EXPECT_FALSE(parse_date("2005-13-01"));
  EXPECT_FALSE(parse_date("yesterday"));
}
