#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace newstox {

/// Fold index for every row.
struct FoldAssignment {
  std::vector<int> fold_of;
  int num_folds = 0;
  /// False when some class had fewer members than folds.
  bool fully_stratified = true;

  /// Row positions in fold f (test side) or outside it (train side), ascending.
  std::vector<std::size_t> test_rows(int f) const;
  std::vector<std::size_t> train_rows(int f) const;
};

/// Stratified k-fold: each class is shuffled and dealt round-robin, continuing
/// the deal across classes, so fold sizes differ by at most one and every
/// class's per-fold count differs by at most one. Throws ConfigError if
/// labels.size() < k or k < 2.
FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Unstratified k-fold over a shuffled order.
FoldAssignment random_folds(std::size_t n, int k, std::uint64_t seed);

}  // namespace newstox
