#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace newstox {

/// The nine classes: eight toxicity categories plus non-toxic.
enum class Label : int {
  fake_news = 0,
  sensations,
  hate_speech,
  conspiracies,
  anti_democratic,
  pro_authoritarian,
  defamation,
  delusion,
  non_toxic,
};

inline constexpr int kNumLabels = 9;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::fake_news,       Label::sensations,        Label::hate_speech,
    Label::conspiracies,    Label::anti_democratic,   Label::pro_authoritarian,
    Label::defamation,      Label::delusion,          Label::non_toxic,
};

constexpr int label_index(Label l) { return static_cast<int>(l); }

std::string_view to_string(Label label);

/// Inverse of to_string; std::nullopt for anything that is not one of the nine names.
std::optional<Label> parse_label(std::string_view name);

/// Label for a class index in [0, kNumLabels). Throws std::out_of_range otherwise.
Label label_from_index(int index);

using Date = std::chrono::year_month_day;

/// Strict "YYYY-MM-DD"; std::nullopt if malformed or not a real calendar date.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

/// Upper bound for medium creation dates and the default reference date for media age.
inline constexpr Date kReferenceDate{std::chrono::year{2019}, std::chrono::January, std::chrono::day{1}};

struct Article {
  std::string id;
  std::string title;
  std::string body;
  std::optional<std::string> title_en;
  std::optional<std::string> body_en;
  std::vector<Label> labels;
  std::string medium_id;

  /// The class used for single-label training and evaluation: the first listed label.
  Label primary_label() const { return labels.front(); }

  bool has_translation() const { return title_en.has_value() && body_en.has_value(); }

  bool operator==(const Article&) const = default;
};

struct Medium {
  std::string id;
  bool has_editor = false;
  bool has_responsible_person = false;
  bool bg_server = false;
  std::optional<long long> alexa_rank;
  bool has_domain_person = false;
  Date created_date = kReferenceDate;

  bool operator==(const Medium&) const = default;
};

/// Validated, immutable collection of articles and the media they reference.
class Dataset {
 public:
  /// Checks every invariant and throws ValidationError listing all offenders.
  Dataset(std::vector<Article> articles, std::map<std::string, Medium> media);

  const std::vector<Article>& articles() const { return articles_; }
  const std::map<std::string, Medium>& media() const { return media_; }
  std::size_t size() const { return articles_.size(); }

  const Article& article(std::size_t i) const { return articles_.at(i); }
  const Medium& medium_of(const Article& a) const { return media_.at(a.medium_id); }

  /// Row index of an article id, or std::nullopt.
  std::optional<std::size_t> find(std::string_view id) const;

  /// Primary labels as class indices, in article order.
  std::vector<int> primary_labels() const;

  bool operator==(const Dataset& other) const {
    return articles_ == other.articles_ && media_ == other.media_;
  }

 private:
  std::vector<Article> articles_;
  std::map<std::string, Medium> media_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Validates a single article in isolation; returns the problems found (empty when valid).
std::vector<std::string> article_problems(const Article& a);
std::vector<std::string> medium_problems(const Medium& m);

Dataset load_dataset(const std::filesystem::path& articles_path,
                     const std::filesystem::path& media_path);

/// Writes the two JSONL files in the same schema load_dataset reads.
void save_dataset(const Dataset& d, const std::filesystem::path& articles_path,
                  const std::filesystem::path& media_path);

/// Counts of primary labels; every label is present as a key.
std::map<Label, std::size_t> label_distribution(const Dataset& d);

}  // namespace newstox
