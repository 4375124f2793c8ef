#include "newstox/resample.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "newstox/error.hpp"
#include "newstox/rng.hpp"

namespace newstox {

namespace {

std::map<int, std::vector<std::size_t>> members_by_class(std::span<const int> y) {
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < y.size(); ++i) out[y[i]].push_back(i);
  return out;
}

/// Copies the originals and reserves room for the new rows.
Resampled start(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y, std::size_t total) {
  Resampled out;
  out.x.resize(static_cast<Eigen::Index>(total), x.cols());
  out.x.topRows(x.rows()) = x;
  out.y.assign(y.begin(), y.end());
  out.y.reserve(total);
  return out;
}

std::size_t total_count(const std::map<int, std::size_t>& targets) {
  std::size_t n = 0;
  for (const auto& [c, t] : targets) n += t;
  return n;
}

/// Indices of the k nearest members of `members` to members[self] (self excluded), ties by position.
std::vector<std::size_t> nearest(const Eigen::Ref<const Eigen::MatrixXd>& x, const std::vector<std::size_t>& members,
                                 std::size_t self, int k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(members.size());
  const auto origin = x.row(static_cast<Eigen::Index>(members[self]));
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (j == self) continue;
    dist.emplace_back((x.row(static_cast<Eigen::Index>(members[j])) - origin).squaredNorm(), j);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kk; ++i) out.push_back(members[dist[i].second]);
  return out;
}

}  // namespace

std::string_view to_string(ResampleStrategy s) {
  switch (s) {
    case ResampleStrategy::none: return "none";
    case ResampleStrategy::random: return "random";
    case ResampleStrategy::smote: return "smote";
  }
  return "none";
}

std::optional<ResampleStrategy> parse_resample_strategy(std::string_view name) {
  if (name == "none") return ResampleStrategy::none;
  if (name == "random") return ResampleStrategy::random;
  if (name == "smote") return ResampleStrategy::smote;
  return std::nullopt;
}

std::map<int, std::size_t> resample_targets(std::span<const int> y, const ResamplePlan& plan) {
  const auto members = members_by_class(y);
  std::map<int, std::size_t> targets;
  if (plan.target.empty()) {
    std::size_t majority = 0;
    for (const auto& [c, m] : members) majority = std::max(majority, m.size());
    for (const auto& [c, m] : members) targets[c] = majority;
    return targets;
  }
  for (const auto& [c, m] : members) targets[c] = m.size();
  for (const auto& [c, t] : plan.target) {
    auto it = members.find(c);
    const std::size_t have = it == members.end() ? 0 : it->second.size();
    if (have == 0 && t > 0) throw ConfigError("resample: class " + std::to_string(c) + " has no samples");
    if (t < have)
      throw ConfigError("resample: target " + std::to_string(t) + " for class " + std::to_string(c) +
                        " is below its current count " + std::to_string(have));
    targets[c] = t;
  }
  return targets;
}

Resampled random_oversample(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y,
                            const ResamplePlan& plan) {
  const auto targets = resample_targets(y, plan);
  const auto members = members_by_class(y);
  auto out = start(x, y, total_count(targets));
  auto row = x.rows();
  for (const auto& [c, target] : targets) {
    const auto& m = members.at(c);
    Rng rng(derive_seed(plan.seed, {static_cast<std::uint64_t>(c), 0x5a}));
    for (std::size_t i = m.size(); i < target; ++i) {
      out.x.row(row++) = x.row(static_cast<Eigen::Index>(m[rng.index(m.size())]));
      out.y.push_back(c);
    }
  }
  return out;
}

Resampled smote(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y, const ResamplePlan& plan) {
  if (plan.k_neighbors < 1) throw ConfigError("smote: k_neighbors must be positive");
  const auto targets = resample_targets(y, plan);
  const auto members = members_by_class(y);
  auto out = start(x, y, total_count(targets));
  auto row = x.rows();
  for (const auto& [c, target] : targets) {
    const auto& m = members.at(c);
    if (target <= m.size()) continue;
    Rng rng(derive_seed(plan.seed, {static_cast<std::uint64_t>(c), 0x53}));
    if (m.size() == 1) {
      spdlog::warn("smote: class {} has a single sample; duplicating it", c);
      for (std::size_t i = 1; i < target; ++i) {
        out.x.row(row++) = x.row(static_cast<Eigen::Index>(m[0]));
        out.y.push_back(c);
      }
      continue;
    }
    const int k = std::min<int>(plan.k_neighbors, static_cast<int>(m.size()) - 1);
    std::vector<std::vector<std::size_t>> neighbours(m.size());
    for (std::size_t i = m.size(); i < target; ++i) {
      const std::size_t base = rng.index(m.size());
      if (neighbours[base].empty()) neighbours[base] = nearest(x, m, base, k);
      const auto& nn = neighbours[base];
      const auto other = nn[rng.index(nn.size())];
      const double u = rng.uniform_closed();
      const auto origin = x.row(static_cast<Eigen::Index>(m[base]));
      out.x.row(row++) = origin + u * (x.row(static_cast<Eigen::Index>(other)) - origin);
      out.y.push_back(c);
    }
  }
  return out;
}

Resampled resample(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y, const ResamplePlan& plan) {
  switch (plan.strategy) {
    case ResampleStrategy::random: return random_oversample(x, y, plan);
    case ResampleStrategy::smote: return smote(x, y, plan);
    case ResampleStrategy::none: break;
  }
  return {x, {y.begin(), y.end()}};
}

}  // namespace newstox
