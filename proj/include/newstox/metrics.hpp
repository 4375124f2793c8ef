#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace newstox {

using ConfusionMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;    // true count
  std::size_t predicted = 0;  // predicted count
};

struct Metrics {
  double accuracy = 0;
  /// Unweighted mean of per-class F1 over the whole declared label space.
  double macro_f1 = 0;
  std::vector<ClassMetrics> per_class;
  /// Rows are true classes, columns predicted classes.
  ConfusionMatrix confusion;
  std::size_t count = 0;
};

/// Undefined ratios (0/0) are 0. Throws ValidationError on length mismatch,
/// empty input, or a label outside [0, num_classes).
Metrics compute_metrics(std::span<const int> truth, std::span<const int> predicted, int num_classes);

}  // namespace newstox
