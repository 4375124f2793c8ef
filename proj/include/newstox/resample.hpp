#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace newstox {

enum class ResampleStrategy { none, random, smote };

std::string_view to_string(ResampleStrategy s);
std::optional<ResampleStrategy> parse_resample_strategy(std::string_view name);

/// Oversampling applied to a training partition.
struct ResamplePlan {
  ResampleStrategy strategy = ResampleStrategy::none;
  /// Final per-class counts. Empty: raise every present class to the majority count.
  std::map<int, std::size_t> target;
  int k_neighbors = 5;
  std::uint64_t seed = 42;
};

/// Originals first, in input order, followed by the new rows grouped by class.
struct Resampled {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

/// Resolved target counts for `y` under `plan`. Throws ConfigError for a
/// target below a class's current count or for a targeted class with no samples.
std::map<int, std::size_t> resample_targets(std::span<const int> y, const ResamplePlan& plan);

/// Duplicates uniformly chosen rows of each short class (with replacement).
Resampled random_oversample(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y,
                            const ResamplePlan& plan);

/// SMOTE: each new row is x + u (x_nn - x) for a random class member x, one of
/// its k nearest same-class neighbours x_nn (Euclidean) and u ~ U[0, 1].
/// k is clamped to class_size - 1; a one-sample class is duplicated with a warning.
Resampled smote(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y, const ResamplePlan& plan);

/// Dispatches on plan.strategy; `none` returns the input unchanged.
Resampled resample(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y, const ResamplePlan& plan);

}  // namespace newstox
