#include "newstox/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "newstox/error.hpp"

namespace newstox {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

Dataset load_corpus(const CliConfig& cfg) {
  if (cfg.articles.empty() || cfg.media.empty()) throw ConfigError("--articles and --media are required");
  return load_dataset(cfg.articles, cfg.media);
}

void print_error(std::ostream& out, const nlohmann::ordered_json& e) { out << e.dump() << '\n'; }

}  // namespace

void load_run_config(const std::filesystem::path& path, CliConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "articles", "media",        "features",    "out",  "seed",       "setups",        "grid",
      "resample", "k_neighbors",  "classifier",  "max_iterations",    "learning_rate", "tolerance",
      "outer_folds", "inner_folds", "mlp",        "lsa"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");

  const auto base = path.parent_path();
  auto& p = cfg.pipeline;
  try {
    if (j.contains("articles")) cfg.articles = resolve(base, j["articles"].get<std::string>());
    if (j.contains("media")) cfg.media = resolve(base, j["media"].get<std::string>());
    if (j.contains("features"))
      for (const auto& f : j["features"]) cfg.features.push_back(resolve(base, f.get<std::string>()));
    if (j.contains("out")) cfg.out = resolve(base, j["out"].get<std::string>());
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("setups")) {
      const auto& s = j["setups"];
      if (s.is_string()) {
        cfg.setups = s.get<std::string>();
      } else {
        cfg.setups.clear();
        for (const auto& id : s) cfg.setups += (cfg.setups.empty() ? "" : ",") + std::to_string(id.get<int>());
      }
    }
    if (j.contains("grid")) p.grid.l2 = j["grid"].get<std::vector<double>>();
    if (j.contains("max_iterations")) p.grid.fit.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("learning_rate")) p.grid.fit.adam.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("tolerance")) p.grid.fit.tolerance = j["tolerance"].get<double>();
    if (j.contains("outer_folds")) p.outer_folds = j["outer_folds"].get<int>();
    if (j.contains("inner_folds")) p.inner_folds = j["inner_folds"].get<int>();
    if (j.contains("resample")) {
      const auto name = j["resample"].get<std::string>();
      auto s = parse_resample_strategy(name);
      if (!s) throw ConfigError("config: unknown resample strategy '" + name + "'");
      p.resample.strategy = *s;
    }
    if (j.contains("k_neighbors")) p.resample.k_neighbors = j["k_neighbors"].get<int>();
    if (j.contains("classifier")) {
      const auto name = j["classifier"].get<std::string>();
      auto c = parse_classifier(name);
      if (!c) throw ConfigError("config: unknown classifier '" + name + "'");
      p.base_classifier = *c;
    }
    if (j.contains("mlp")) {
      const auto& m = j["mlp"];
      p.mlp.epochs = m.value("epochs", p.mlp.epochs);
      p.mlp.learning_rate = m.value("learning_rate", p.mlp.learning_rate);
      p.mlp.dropout_rate = m.value("dropout_rate", p.mlp.dropout_rate);
      p.mlp.batch_size = m.value("batch_size", p.mlp.batch_size);
    }
    if (j.contains("lsa")) {
      const auto& l = j["lsa"];
      p.lsa.title_dim = l.value("title_dim", p.lsa.title_dim);
      p.lsa.body_dim = l.value("body_dim", p.lsa.body_dim);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (p.grid.l2.empty()) throw ConfigError("config: empty grid");
}

int cmd_validate(const CliConfig& cfg, std::ostream& out) {
  const auto d = load_corpus(cfg);
  const auto& registry = FeatureRegistry::standard();
  std::vector<nlohmann::ordered_json> errors;

  struct Row {
    std::string group;
    std::string dim;
    std::string expected;
    std::size_t rows = 0;
    std::size_t missing = 0;
    std::size_t extra = 0;
    std::string status;
  };
  std::vector<Row> table;
  for (std::string_view g : {"stylo", "media"}) {
    const auto dim = std::to_string(registry.at(g).expected_dim);
    table.push_back({std::string(g), dim, dim, d.size(), 0, 0, "native"});
  }
  table.push_back({"lsa_bg", std::to_string(registry.at("lsa_bg").expected_dim),
                   std::to_string(registry.at("lsa_bg").expected_dim), d.size(), 0, 0, "native (per fold)"});

  for (const auto& manifest_path : cfg.features) {
    Row row;
    try {
      const auto manifest = read_manifest(manifest_path);
      row.group = manifest.group;
      row.dim = std::to_string(manifest.dim);
      auto group = registry.find(manifest.group);
      if (group) {
        row.expected = std::to_string(group->expected_dim);
        if (manifest.dim != group->expected_dim) {
          errors.push_back({{"error", "dimension"},
                            {"group", manifest.group},
                            {"expected_dim", group->expected_dim},
                            {"manifest_dim", manifest.dim}});
        }
      } else {
        row.expected = "-";
        group = FeatureGroup{manifest.group, manifest.dim, FeatureSource::external, 0, 0};
      }
      const auto m = ingest_vectors(manifest.vectors, *group);
      row.rows = m.size();
      if (m.size() != manifest.articles)
        errors.push_back({{"error", "article_count"},
                          {"group", manifest.group},
                          {"manifest_articles", manifest.articles},
                          {"rows", m.size()}});
      const auto a = check_alignment(m, d);
      row.missing = a.missing.size();
      row.extra = a.extra.size();
      if (!a.missing.empty()) errors.push_back({{"error", "missing_ids"}, {"group", manifest.group}, {"ids", a.missing}});
      if (!a.extra.empty()) errors.push_back({{"error", "unknown_ids"}, {"group", manifest.group}, {"ids", a.extra}});
    } catch (const DimensionError& e) {
      nlohmann::ordered_json err{{"error", "dimension"}, {"group", row.group}};
      if (auto g = registry.find(row.group)) err["expected_dim"] = g->expected_dim;
      err["message"] = e.what();
      errors.push_back(err);
    } catch (const Error& e) {
      errors.push_back({{"error", "invalid_file"}, {"manifest", manifest_path.string()}, {"message", e.what()}});
      if (row.group.empty()) row.group = manifest_path.filename().string();
    }
    const bool bad = std::any_of(errors.begin(), errors.end(), [&](const auto& e) {
      return e.contains("group") && e["group"] == row.group;
    });
    row.status = bad ? "INVALID" : "ok";
    table.push_back(row);
  }

  out << "articles " << d.size() << ", media " << d.media().size() << '\n';
  out << std::left << std::setw(12) << "group" << std::setw(8) << "dim" << std::setw(10) << "expected"
      << std::setw(8) << "rows" << std::setw(9) << "missing" << std::setw(7) << "extra" << "status\n";
  for (const auto& r : table)
    out << std::left << std::setw(12) << r.group << std::setw(8) << r.dim << std::setw(10) << r.expected
        << std::setw(8) << r.rows << std::setw(9) << r.missing << std::setw(7) << r.extra << r.status << '\n';
  for (const auto& e : errors) print_error(out, e);
  return errors.empty() ? kExitOk : kExitInvalid;
}

int cmd_featurize(const CliConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto d = load_corpus(cfg);
  for (std::string_view g : {"stylo", "media"}) {
    const auto m = native_feature_matrix(d, g);
    write_vectors(m, cfg.out, "newstox featurize");
    out << "wrote " << (cfg.out / (std::string(g) + ".jsonl")).string() << " (" << m.size() << " x " << m.dim()
        << ")\n";
  }
  return kExitOk;
}

int cmd_run(const CliConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto d = load_corpus(cfg);
  FeatureBank bank(d);
  for (const auto& manifest : cfg.features) bank.add(ingest_manifest(manifest));
  const auto ids = parse_setup_selection(cfg.setups);
  for (int id : ids) check_requirements(bank, standard_setup(id));

  std::vector<RunReport> reports;
  try {
    reports = run_setups(bank, ids, cfg.pipeline);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("pipeline failed: ") + e.what());
  }
  std::size_t violations = 0;
  for (const auto& r : reports) {
    char dir[32];
    std::snprintf(dir, sizeof dir, "setup_%02d", r.setup_id);
    emit_report(r, cfg.out / dir);
    if (r.audit) violations += r.audit->violations().size();
  }
  write_table(reports, cfg.out / "table3.csv");
  out << "N   dim    acc     macro-F1  feature set\n";
  for (const auto& r : reports) {
    char line[160];
    std::snprintf(line, sizeof line, "%-3d %-6s %6.2f  %6.2f    %s\n", r.setup_id,
                  r.dimension > 0 ? std::to_string(r.dimension).c_str() : "-", r.accuracy_percent(),
                  r.macro_f1_percent(), r.name.c_str());
    out << line;
  }
  if (violations > 0) {
    out << "leak audit FAILED: " << violations << " violating predictions\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"News toxicity classification pipeline"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::filesystem::path config_file;
  std::string articles, media, out_dir, setups, resample, classifier;
  std::vector<std::string> features;
  std::uint64_t seed = 42;
  int verbosity = 0;
  bool quiet = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON run configuration");
    sub->add_option("--articles", articles, "articles JSONL");
    sub->add_option("--media", media, "media JSONL");
    sub->add_flag("-v,--verbose", verbosity, "more logging (repeatable)");
    sub->add_flag("-q,--quiet", quiet, "errors only");
  };
  auto* validate = app.add_subcommand("validate", "check corpus and feature files");
  common(validate);
  validate->add_option("--features", features, "feature manifests")->expected(1, -1);
  auto* featurize = app.add_subcommand("featurize", "write stylometric and media vectors");
  common(featurize);
  featurize->add_option("--out", out_dir, "output directory");
  auto* run = app.add_subcommand("run", "run cross-validated setups");
  common(run);
  run->add_option("--features", features, "feature manifests")->expected(1, -1);
  run->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_option = run->add_option("--seed", seed, "random seed");
  run->add_option("--setups", setups, "'all', ids, or ranges such as 2-5,12");
  run->add_option("--resample", resample, "oversampling of training folds")
      ->check(CLI::IsMember({"none", "random", "smote"}));
  run->add_option("--classifier", classifier, "single-model classifier")->check(CLI::IsMember({"softmax", "mlp"}));

  std::vector<char*> argv;
  std::string program = "newstox";
  argv.push_back(program.data());
  std::vector<std::string> storage(args);
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  spdlog::set_level(quiet            ? spdlog::level::err
                    : verbosity >= 2 ? spdlog::level::debug
                    : verbosity == 1 ? spdlog::level::info
                                     : spdlog::level::warn);
  try {
    if (!config_file.empty()) load_run_config(config_file, cfg);
    if (!articles.empty()) cfg.articles = articles;
    if (!media.empty()) cfg.media = media;
    if (!features.empty()) cfg.features.assign(features.begin(), features.end());
    if (!out_dir.empty()) cfg.out = out_dir;
    if (seed_option->count() > 0) cfg.pipeline.seed = seed;
    if (!setups.empty()) cfg.setups = setups;
    if (!resample.empty()) cfg.pipeline.resample.strategy = *parse_resample_strategy(resample);
    if (!classifier.empty()) cfg.pipeline.base_classifier = *parse_classifier(classifier);
    cfg.verbosity = verbosity;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (cfg.subcommand == "validate") return cmd_validate(cfg, out);
    if (cfg.subcommand == "featurize") return cmd_featurize(cfg, out);
    return cmd_run(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace newstox
