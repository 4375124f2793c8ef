#pragma once

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "newstox/adam.hpp"
#include "newstox/corpus.hpp"
#include "newstox/folds.hpp"

namespace newstox {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Full-batch optimizer settings for softmax regression.
struct FitOptions {
  AdamConfig adam{};
  int max_iterations = 2000;
  /// Stop once the gradient norm drops below this.
  double tolerance = 1e-6;

  bool operator==(const FitOptions& o) const {
    return adam.learning_rate == o.adam.learning_rate && adam.beta1 == o.adam.beta1 &&
           adam.beta2 == o.adam.beta2 && adam.epsilon == o.adam.epsilon &&
           max_iterations == o.max_iterations && tolerance == o.tolerance;
  }
};

/// Multinomial logistic regression: p(y | x) = softmax(W x + b).
class SoftmaxClassifier {
 public:
  SoftmaxClassifier() = default;
  /// Zero weights; predicts the uniform distribution.
  SoftmaxClassifier(int num_classes, Eigen::Index dim, double l2_lambda = 0);

  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }
  double l2_lambda() const { return l2_lambda_; }
  int num_classes() const { return static_cast<int>(bias_.size()); }
  Eigen::Index dim() const { return weights_.cols(); }
  int iterations() const { return iterations_; }

  Matrix predict_proba(const Eigen::Ref<const Matrix>& x) const;
  Matrix logits(const Eigen::Ref<const Matrix>& x) const;
  std::vector<int> predict(const Eigen::Ref<const Matrix>& x) const;

  nlohmann::json to_json() const;
  static SoftmaxClassifier from_json(const nlohmann::json& j);

  friend SoftmaxClassifier fit_softmax(const Eigen::Ref<const Matrix>& x, std::span<const int> y,
                                       double l2_lambda, std::uint64_t seed, int num_classes,
                                       const FitOptions& options);

 private:
  Matrix weights_;  // K x d
  Vector bias_;     // K
  double l2_lambda_ = 0;
  int iterations_ = 0;
};

/// Mean cross-entropy + (l2/2)||W||^2 and its gradient (bias unregularized).
double softmax_objective(const Eigen::Ref<const Matrix>& weights, const Eigen::Ref<const Vector>& bias,
                         const Eigen::Ref<const Matrix>& x,
                         std::span<const int> y, double l2_lambda, Matrix* grad_weights = nullptr,
                         Vector* grad_bias = nullptr);

/// Adam from zero initialization. The procedure is deterministic; `seed` is
/// accepted for interface symmetry with the stochastic learners.
/// Throws ValidationError on a single-class target or non-finite inputs.
SoftmaxClassifier fit_softmax(const Eigen::Ref<const Matrix>& x, std::span<const int> y, double l2_lambda,
                              std::uint64_t seed, int num_classes = kNumLabels,
                              const FitOptions& options = {});

struct MlpOptions {
  int epochs = 200;
  double learning_rate = 1e-3;
  double dropout_rate = 0.35;
  int batch_size = 32;
};

/// Shapes of the feed-forward network d -> 64 (ReLU) -> 32 (tanh) -> K (softmax).
struct MlpShape {
  static constexpr Eigen::Index kHidden1 = 64;
  static constexpr Eigen::Index kHidden2 = 32;

  Eigen::Index input_dim = 0;
  int num_classes = kNumLabels;

  Eigen::Index parameter_count() const {
    return (input_dim * kHidden1 + kHidden1) + (kHidden1 * kHidden2 + kHidden2) +
           (kHidden2 * num_classes + num_classes);
  }
};

/// Typed views into a flat parameter vector laid out as [W1 b1 W2 b2 W3 b3],
/// weights column-major with shape (out x in).
template <typename VectorType>
struct MlpView {
  using Scalar = typename std::remove_const_t<VectorType>::Scalar;
  static constexpr bool kConst = std::is_const_v<VectorType>;
  using MatMap = Eigen::Map<std::conditional_t<kConst, const Matrix, Matrix>>;
  using VecMap = Eigen::Map<std::conditional_t<kConst, const Vector, Vector>>;

  MatMap w1, w2, w3;
  VecMap b1, b2, b3;

  MlpView(VectorType& theta, const MlpShape& s)
      : w1(ptr(theta, 0), MlpShape::kHidden1, s.input_dim),
        w2(ptr(theta, off_w2(s)), MlpShape::kHidden2, MlpShape::kHidden1),
        w3(ptr(theta, off_w3(s)), s.num_classes, MlpShape::kHidden2),
        b1(ptr(theta, MlpShape::kHidden1 * s.input_dim), MlpShape::kHidden1),
        b2(ptr(theta, off_w2(s) + MlpShape::kHidden2 * MlpShape::kHidden1), MlpShape::kHidden2),
        b3(ptr(theta, off_w3(s) + s.num_classes * MlpShape::kHidden2), s.num_classes) {}

 private:
  static auto ptr(VectorType& theta, Eigen::Index offset) { return theta.data() + offset; }
  static Eigen::Index off_w2(const MlpShape& s) { return MlpShape::kHidden1 * s.input_dim + MlpShape::kHidden1; }
  static Eigen::Index off_w3(const MlpShape& s) {
    return off_w2(s) + MlpShape::kHidden2 * MlpShape::kHidden1 + MlpShape::kHidden2;
  }
};

/// Dropout masks for one forward pass, already scaled by 1/(1-p). Empty = no dropout.
struct DropoutMasks {
  Matrix hidden1;
  Matrix hidden2;

  bool empty() const { return hidden1.size() == 0; }
};

/// Mean cross-entropy of the network and, optionally, its gradient w.r.t. theta.
double mlp_objective(const Vector& theta, const MlpShape& shape, const Eigen::Ref<const Matrix>& x,
                     std::span<const int> y, const DropoutMasks& masks = {}, Vector* grad = nullptr);

class MlpClassifier {
 public:
  MlpClassifier() = default;
  MlpClassifier(MlpShape shape, Vector theta, double dropout_rate);

  const MlpShape& shape() const { return shape_; }
  const Vector& parameters() const { return theta_; }
  Eigen::Index parameter_count() const { return shape_.parameter_count(); }
  double dropout_rate() const { return dropout_rate_; }
  int num_classes() const { return shape_.num_classes; }
  Eigen::Index dim() const { return shape_.input_dim; }
  /// Full-data training loss (no dropout) after every epoch.
  const std::vector<double>& loss_history() const { return loss_history_; }

  /// Deterministic: dropout is never applied at inference.
  Matrix predict_proba(const Eigen::Ref<const Matrix>& x) const;
  std::vector<int> predict(const Eigen::Ref<const Matrix>& x) const;

  nlohmann::json to_json() const;
  static MlpClassifier from_json(const nlohmann::json& j);

  friend MlpClassifier fit_mlp(const Eigen::Ref<const Matrix>& x, std::span<const int> y,
                               const MlpOptions& options, std::uint64_t seed, int num_classes);

 private:
  MlpShape shape_;
  Vector theta_;
  double dropout_rate_ = 0.35;
  std::vector<double> loss_history_;
};

/// Glorot-uniform initial parameters (biases zero).
Vector init_mlp_parameters(const MlpShape& shape, std::uint64_t seed);

/// Minibatch Adam with inverted dropout after each hidden layer.
MlpClassifier fit_mlp(const Eigen::Ref<const Matrix>& x, std::span<const int> y, const MlpOptions& options,
                      std::uint64_t seed, int num_classes = kNumLabels);

/// L2 strengths searched by nested cross-validation.
struct HyperGrid {
  std::vector<double> l2 = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  FitOptions fit{};
};

struct GridSearchResult {
  double best_l2 = 0;
  /// Mean inner-fold accuracy per grid entry (empty when the grid had one entry).
  std::vector<double> mean_accuracy;
};

/// Index of the highest mean accuracy; ties (within 1e-12) go to the larger l2.
std::size_t best_grid_index(std::span<const double> l2, std::span<const double> mean_accuracy);

/// Picks the grid value with the highest mean accuracy over the given folds;
/// ties go to the larger (more regularized) value.
GridSearchResult grid_search(const Eigen::Ref<const Matrix>& x, std::span<const int> y, const HyperGrid& grid,
                             const FoldAssignment& folds, int num_classes = kNumLabels);

/// As above with stratified inner folds drawn from `seed`. Falls back to
/// unstratified folds, with a warning, when some class has fewer samples than folds.
GridSearchResult grid_search(const Eigen::Ref<const Matrix>& x, std::span<const int> y, const HyperGrid& grid,
                             int inner_folds, std::uint64_t seed, int num_classes = kNumLabels);

}  // namespace newstox
