#include <fstream>

#include "newstox/error.hpp"
#include "newstox/pipeline.hpp"

namespace newstox {

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["setup"] = setup_id;
  j["name"] = name;
  j["language"] = language;
  j["dimension"] = dimension;
  j["accuracy"] = accuracy_percent();
  j["macro_f1"] = macro_f1_percent();
  j["articles"] = metrics.count;

  auto& per_class = j["per_class"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < metrics.per_class.size(); ++c) {
    const auto& pc = metrics.per_class[c];
    nlohmann::ordered_json e;
    e["label"] = std::string(to_string(label_from_index(static_cast<int>(c))));
    e["precision"] = pc.precision;
    e["recall"] = pc.recall;
    e["f1"] = pc.f1;
    e["support"] = pc.support;
    e["predicted"] = pc.predicted;
    per_class.push_back(e);
  }

  auto& confusion = j["confusion"];
  confusion["labels"] = nlohmann::ordered_json::array();
  for (auto l : kAllLabels) confusion["labels"].push_back(std::string(to_string(l)));
  confusion["rows"] = "true";
  confusion["columns"] = "predicted";
  auto& matrix = confusion["matrix"] = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < metrics.confusion.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < metrics.confusion.cols(); ++c) row.push_back(metrics.confusion(r, c));
    matrix.push_back(row);
  }

  auto& folds_json = j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    nlohmann::ordered_json e;
    e["fold"] = f.fold;
    e["test_size"] = f.test_size;
    e["accuracy"] = f.accuracy;
    e["macro_f1"] = f.macro_f1;
    if (f.l2) e["l2"] = *f.l2;
    folds_json.push_back(e);
  }

  if (audit) {
    const auto v = audit->violations();
    j["audit"] = {{"models", audit->model_count()},
                  {"records", audit->record_count()},
                  {"violations", v.size()},
                  {"passed", v.empty()}};
  }

  auto& preds = j["predictions"] = nlohmann::ordered_json::array();
  for (const auto& p : predictions) {
    nlohmann::ordered_json e;
    e["id"] = p.id;
    e["fold"] = p.fold;
    e["true"] = std::string(to_string(label_from_index(p.truth)));
    e["predicted"] = std::string(to_string(label_from_index(p.predicted)));
    preds.push_back(e);
  }
  j["config"] = config;
  return j;
}

void emit_report(const RunReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  open_out(out_dir / "report.json") << report.to_json().dump(2) << '\n';

  auto csv = open_out(out_dir / "confusion.csv");
  csv << "true\\predicted";
  for (auto l : kAllLabels) csv << ',' << to_string(l);
  csv << '\n';
  for (Eigen::Index r = 0; r < report.metrics.confusion.rows(); ++r) {
    csv << to_string(label_from_index(static_cast<int>(r)));
    for (Eigen::Index c = 0; c < report.metrics.confusion.cols(); ++c) csv << ',' << report.metrics.confusion(r, c);
    csv << '\n';
  }

  auto summary = open_out(out_dir / "summary.txt");
  summary << "N\tLanguage\tFeature Set\tDimension\tAccuracy\tF1-macro\n";
  summary << report.setup_id << '\t' << report.language << '\t' << report.name << '\t'
          << (report.dimension > 0 ? std::to_string(report.dimension) : "-") << '\t'
          << fixed2(report.accuracy_percent()) << '\t' << fixed2(report.macro_f1_percent()) << '\n';
}

void write_table(std::span<const RunReport> reports, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto out = open_out(path);
  out << "setup,language,feature_set,dimension,accuracy,macro_f1\n";
  for (const auto& r : reports)
    out << r.setup_id << ',' << r.language << ',' << csv_field(r.name) << ','
        << (r.dimension > 0 ? std::to_string(r.dimension) : "-") << ',' << fixed2(r.accuracy_percent()) << ','
        << fixed2(r.macro_f1_percent()) << '\n';
}

}  // namespace newstox
