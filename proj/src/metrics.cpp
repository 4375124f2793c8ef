#include "newstox/metrics.hpp"

#include <string>

#include "newstox/error.hpp"

namespace newstox {

namespace {

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

Metrics compute_metrics(std::span<const int> truth, std::span<const int> predicted, int num_classes) {
  if (truth.size() != predicted.size())
    throw ValidationError("metrics: " + std::to_string(truth.size()) + " labels vs " +
                          std::to_string(predicted.size()) + " predictions");
  if (truth.empty()) throw ValidationError("metrics: no predictions");
  Metrics m;
  m.count = truth.size();
  m.confusion = ConfusionMatrix::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
      throw ValidationError("metrics: label outside the declared label space at position " + std::to_string(i));
    ++m.confusion(t, p);
  }
  m.accuracy = static_cast<double>(m.confusion.trace()) / static_cast<double>(m.count);
  m.per_class.resize(static_cast<std::size_t>(num_classes));
  double f1_sum = 0;
  for (int c = 0; c < num_classes; ++c) {
    auto& pc = m.per_class[static_cast<std::size_t>(c)];
    const auto tp = static_cast<double>(m.confusion(c, c));
    pc.support = static_cast<std::size_t>(m.confusion.row(c).sum());
    pc.predicted = static_cast<std::size_t>(m.confusion.col(c).sum());
    pc.precision = ratio(tp, static_cast<double>(pc.predicted));
    pc.recall = ratio(tp, static_cast<double>(pc.support));
    pc.f1 = ratio(2 * pc.precision * pc.recall, pc.precision + pc.recall);
    f1_sum += pc.f1;
  }
  m.macro_f1 = f1_sum / num_classes;
  return m;
}

}  // namespace newstox
