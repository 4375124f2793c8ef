#include "newstox/folds.hpp"

#include <map>
#include <string>

#include "newstox/error.hpp"
#include "newstox/rng.hpp"

namespace newstox {

std::vector<std::size_t> FoldAssignment::test_rows(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_rows(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != f) out.push_back(i);
  return out;
}

FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  if (labels.size() < static_cast<std::size_t>(k))
    throw ConfigError("cannot split " + std::to_string(labels.size()) + " rows into " +
                      std::to_string(k) + " folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  FoldAssignment out{std::vector<int>(labels.size(), 0), k, true};
  std::size_t dealt = 0;
  for (auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(k)) out.fully_stratified = false;
    rng.shuffle(std::span(members));
    for (auto row : members) out.fold_of[row] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return out;
}

FoldAssignment random_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  if (n < static_cast<std::size_t>(k))
    throw ConfigError("cannot split " + std::to_string(n) + " rows into " + std::to_string(k) + " folds");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  FoldAssignment out{std::vector<int>(n, 0), k, false};
  for (std::size_t j = 0; j < n; ++j) out.fold_of[order[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
  return out;
}

}  // namespace newstox
