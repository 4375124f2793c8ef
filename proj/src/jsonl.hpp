#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "newstox/error.hpp"

namespace newstox {

/// Calls fn(object, line_number) for every non-blank line. Syntax errors and
/// non-object lines raise ParseError with the 1-based line number.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    if (!j.is_object()) throw ParseError(path.string(), lineno, "expected a JSON object");
    fn(j, lineno);
  }
}

}  // namespace newstox
