#include "newstox/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include <json.hpp>

#include "newstox/error.hpp"
#include "jsonl.hpp"

namespace newstox {

namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "fake_news",       "sensations",        "hate_speech",
    "conspiracies",    "anti_democratic",   "pro_authoritarian",
    "defamation",      "delusion",          "non_toxic",
};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

Article parse_article(const nlohmann::json& j) {
  Article a;
  a.id = j.at("id").get<std::string>();
  a.title = j.at("title").get<std::string>();
  a.body = j.at("body").get<std::string>();
  a.title_en = optional_string(j, "title_en");
  a.body_en = optional_string(j, "body_en");
  for (const auto& l : j.at("labels")) {
    auto name = l.get<std::string>();
    auto label = parse_label(name);
    if (!label) throw ValidationError("article " + a.id + ": unknown label '" + name + "'");
    a.labels.push_back(*label);
  }
  a.medium_id = j.at("medium_id").get<std::string>();
  return a;
}

Medium parse_medium(const nlohmann::json& j) {
  Medium m;
  m.id = j.at("id").get<std::string>();
  m.has_editor = j.at("has_editor").get<bool>();
  m.has_responsible_person = j.at("has_responsible_person").get<bool>();
  m.bg_server = j.at("bg_server").get<bool>();
  if (auto it = j.find("alexa_rank"); it != j.end() && !it->is_null())
    m.alexa_rank = it->get<long long>();
  m.has_domain_person = j.at("has_domain_person").get<bool>();
  auto date_text = j.at("created_date").get<std::string>();
  auto date = parse_date(date_text);
  if (!date) throw ValidationError("medium " + m.id + ": bad created_date '" + date_text + "'");
  m.created_date = *date;
  return m;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(Label label) { return kLabelNames.at(static_cast<std::size_t>(label)); }

std::optional<Label> parse_label(std::string_view name) {
  for (int i = 0; i < kNumLabels; ++i)
    if (kLabelNames[i] == name) return static_cast<Label>(i);
  return std::nullopt;
}

Label label_from_index(int index) {
  if (index < 0 || index >= kNumLabels) throw std::out_of_range("label index out of range");
  return static_cast<Label>(index);
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::vector<std::string> article_problems(const Article& a) {
  std::vector<std::string> out;
  if (a.id.empty()) out.push_back("empty id");
  if (blank(a.title)) out.push_back("article " + a.id + ": empty title");
  if (blank(a.body)) out.push_back("article " + a.id + ": empty body");
  if (a.labels.empty()) {
    out.push_back("article " + a.id + ": no labels");
  } else if (a.labels.size() > 1 &&
             std::find(a.labels.begin(), a.labels.end(), Label::non_toxic) != a.labels.end()) {
    out.push_back("article " + a.id + ": non_toxic combined with other labels");
  }
  return out;
}

std::vector<std::string> medium_problems(const Medium& m) {
  std::vector<std::string> out;
  if (m.id.empty()) out.push_back("medium with empty id");
  if (m.alexa_rank && *m.alexa_rank < 1) out.push_back("medium " + m.id + ": alexa_rank < 1");
  if (std::chrono::sys_days{m.created_date} > std::chrono::sys_days{kReferenceDate})
    out.push_back("medium " + m.id + ": created_date after 2019-01-01");
  return out;
}

Dataset::Dataset(std::vector<Article> articles, std::map<std::string, Medium> media)
    : articles_(std::move(articles)), media_(std::move(media)) {
  std::vector<std::string> problems;
  std::vector<std::string> unresolved;
  for (const auto& [key, m] : media_) {
    if (key != m.id) problems.push_back("medium key '" + key + "' does not match id '" + m.id + "'");
    auto p = medium_problems(m);
    problems.insert(problems.end(), p.begin(), p.end());
  }
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    const auto& a = articles_[i];
    auto p = article_problems(a);
    problems.insert(problems.end(), p.begin(), p.end());
    if (!index_.emplace(a.id, i).second) problems.push_back("duplicate article id " + a.id);
    if (!media_.contains(a.medium_id)) unresolved.push_back(a.id);
  }
  if (!unresolved.empty())
    problems.push_back("unresolved medium reference in articles: " + join(unresolved, ", "));
  if (!problems.empty()) throw ValidationError(join(problems, "; "));
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Dataset::primary_labels() const {
  std::vector<int> y;
  y.reserve(articles_.size());
  for (const auto& a : articles_) y.push_back(label_index(a.primary_label()));
  return y;
}

Dataset load_dataset(const std::filesystem::path& articles_path,
                     const std::filesystem::path& media_path) {
  std::map<std::string, Medium> media;
  for_each_jsonl(media_path, [&](const nlohmann::json& j, std::size_t line) {
    Medium m;
    try {
      m = parse_medium(j);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(media_path.string(), line, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(media_path.string(), line, e.what());
    }
    auto id = m.id;
    if (!media.emplace(id, std::move(m)).second)
      throw ValidationError("duplicate medium id " + id);
  });

  std::vector<Article> articles;
  for_each_jsonl(articles_path, [&](const nlohmann::json& j, std::size_t line) {
    try {
      articles.push_back(parse_article(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(articles_path.string(), line, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(articles_path.string(), line, e.what());
    }
  });
  return Dataset(std::move(articles), std::move(media));
}

void save_dataset(const Dataset& d, const std::filesystem::path& articles_path,
                  const std::filesystem::path& media_path) {
  std::ofstream out(articles_path, std::ios::binary);
  if (!out) throw Error("cannot write " + articles_path.string());
  for (const auto& a : d.articles()) {
    nlohmann::ordered_json j;
    j["id"] = a.id;
    j["title"] = a.title;
    j["body"] = a.body;
    j["title_en"] = a.title_en ? nlohmann::ordered_json(*a.title_en) : nullptr;
    j["body_en"] = a.body_en ? nlohmann::ordered_json(*a.body_en) : nullptr;
    auto& labels = j["labels"] = nlohmann::ordered_json::array();
    for (auto l : a.labels) labels.push_back(std::string(to_string(l)));
    j["medium_id"] = a.medium_id;
    out << j.dump() << '\n';
  }
  std::ofstream mout(media_path, std::ios::binary);
  if (!mout) throw Error("cannot write " + media_path.string());
  for (const auto& [id, m] : d.media()) {
    nlohmann::ordered_json j;
    j["id"] = m.id;
    j["has_editor"] = m.has_editor;
    j["has_responsible_person"] = m.has_responsible_person;
    j["bg_server"] = m.bg_server;
    j["alexa_rank"] = m.alexa_rank ? nlohmann::ordered_json(*m.alexa_rank) : nullptr;
    j["has_domain_person"] = m.has_domain_person;
    j["created_date"] = format_date(m.created_date);
    mout << j.dump() << '\n';
  }
}

std::map<Label, std::size_t> label_distribution(const Dataset& d) {
  std::map<Label, std::size_t> counts;
  for (auto l : kAllLabels) counts[l] = 0;
  for (const auto& a : d.articles()) ++counts[a.primary_label()];
  return counts;
}

}  // namespace newstox
