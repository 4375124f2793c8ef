#include "newstox/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <spdlog/spdlog.h>

#include "newstox/error.hpp"
#include "newstox/math.hpp"
#include "newstox/rng.hpp"

namespace newstox {

namespace {

constexpr int kModelVersion = 1;

void check_training_input(const Eigen::Ref<const Matrix>& x, std::span<const int> y, int num_classes) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw DimensionError("fit: " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) + " labels");
  if (y.size() < 2) throw ValidationError("fit: need at least 2 samples");
  if (!x.allFinite()) throw ValidationError("fit: non-finite input");
  std::set<int> distinct;
  for (int c : y) {
    if (c < 0 || c >= num_classes) throw ValidationError("fit: label " + std::to_string(c) + " out of range");
    distinct.insert(c);
  }
  if (distinct.size() < 2) throw ValidationError("fit: need at least 2 distinct classes");
}

void check_columns(Eigen::Index got, Eigen::Index expected) {
  if (got != expected)
    throw DimensionError("predict: expected " + std::to_string(expected) + " columns, got " + std::to_string(got));
}

std::vector<double> to_std(const Eigen::Ref<const Vector>& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

// --- softmax regression -----------------------------------------------------

SoftmaxClassifier::SoftmaxClassifier(int num_classes, Eigen::Index dim, double l2_lambda)
    : weights_(Matrix::Zero(num_classes, dim)), bias_(Vector::Zero(num_classes)), l2_lambda_(l2_lambda) {}

Matrix SoftmaxClassifier::logits(const Eigen::Ref<const Matrix>& x) const {
  check_columns(x.cols(), dim());
  return (x * weights_.transpose()).rowwise() + bias_.transpose();
}

Matrix SoftmaxClassifier::predict_proba(const Eigen::Ref<const Matrix>& x) const { return softmax_rows(logits(x)); }

std::vector<int> SoftmaxClassifier::predict(const Eigen::Ref<const Matrix>& x) const { return argmax_rows(logits(x)); }

nlohmann::json SoftmaxClassifier::to_json() const {
  return {{"version", kModelVersion},
          {"kind", "softmax"},
          {"num_classes", num_classes()},
          {"dim", dim()},
          {"l2_lambda", l2_lambda_},
          {"iterations", iterations_},
          {"weights", to_std(Eigen::Map<const Vector>(weights_.data(), weights_.size()))},
          {"bias", to_std(bias_)}};
}

SoftmaxClassifier SoftmaxClassifier::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kModelVersion || j.at("kind") != "softmax")
    throw ConfigError("softmax: unsupported model file");
  const int k = j.at("num_classes").get<int>();
  const auto d = j.at("dim").get<Eigen::Index>();
  SoftmaxClassifier m(k, d, j.at("l2_lambda").get<double>());
  m.iterations_ = j.at("iterations").get<int>();
  auto w = j.at("weights").get<std::vector<double>>();
  auto b = j.at("bias").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(w.size()) != k * d || static_cast<int>(b.size()) != k)
    throw DimensionError("softmax: parameter sizes do not match header");
  m.weights_ = Eigen::Map<const Matrix>(w.data(), k, d);
  m.bias_ = from_std(b);
  return m;
}

double softmax_objective(const Eigen::Ref<const Matrix>& weights, const Eigen::Ref<const Vector>& bias,
                         const Eigen::Ref<const Matrix>& x, std::span<const int> y, double l2_lambda,
                         Matrix* grad_weights, Vector* grad_bias) {
  const auto n = static_cast<double>(x.rows());
  // K x N so that each sample's class scores are contiguous.
  Matrix p = weights * x.transpose();
  p.colwise() += bias;
  double loss = 0;
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    auto col = p.col(i);
    const double top = col.maxCoeff();
    col.array() = (col.array() - top).exp();
    const double total = col.sum();
    const auto yi = y[static_cast<std::size_t>(i)];
    loss -= std::log(col(yi) / total);
    col /= total;
    col(yi) -= 1;  // softmax minus one-hot
  }
  loss = loss / n + 0.5 * l2_lambda * weights.squaredNorm();
  if (grad_weights) {
    grad_weights->noalias() = p * x / n;
    *grad_weights += l2_lambda * weights;
  }
  if (grad_bias) *grad_bias = p.rowwise().sum() / n;
  return loss;
}

SoftmaxClassifier fit_softmax(const Eigen::Ref<const Matrix>& x, std::span<const int> y, double l2_lambda,
                              std::uint64_t /*seed*/, int num_classes, const FitOptions& options) {
  check_training_input(x, y, num_classes);
  if (l2_lambda < 0) throw ConfigError("fit_softmax: negative l2");
  const Eigen::Index k = num_classes;
  const Eigen::Index d = x.cols();
  SoftmaxClassifier model(num_classes, d, l2_lambda);

  // Parameters packed as [vec(W), b] so one Adam state covers both.
  Vector theta = Vector::Zero(k * d + k);
  Adam adam(theta.size(), options.adam);
  Matrix gw(k, d);
  Vector gb(k);
  Vector grad(theta.size());
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Eigen::Map<const Matrix> w(theta.data(), k, d);
    Eigen::Map<const Vector> b(theta.data() + k * d, k);
    softmax_objective(w, b, x, y, l2_lambda, &gw, &gb);
    grad << Eigen::Map<const Vector>(gw.data(), gw.size()), gb;
    if (grad.norm() < options.tolerance) break;
    adam.step(theta, grad);
  }
  model.weights_ = Eigen::Map<const Matrix>(theta.data(), k, d);
  model.bias_ = theta.tail(k);
  model.iterations_ = it;
  return model;
}

// --- feed-forward network ---------------------------------------------------

namespace {

struct MlpForward {
  Matrix a1, h1, d1;  // pre-activation, activation, after dropout
  Matrix h2, d2;
  Matrix log_p;
};

MlpForward mlp_forward(const Vector& theta, const MlpShape& shape, const Eigen::Ref<const Matrix>& x,
                       const DropoutMasks& masks) {
  MlpView<const Vector> p(theta, shape);
  MlpForward f;
  f.a1 = (x * p.w1.transpose()).rowwise() + p.b1.transpose();
  f.h1 = f.a1.cwiseMax(0.0);
  f.d1 = masks.empty() ? f.h1 : Matrix(f.h1.cwiseProduct(masks.hidden1));
  f.h2 = ((f.d1 * p.w2.transpose()).rowwise() + p.b2.transpose()).array().tanh();
  f.d2 = masks.empty() ? f.h2 : Matrix(f.h2.cwiseProduct(masks.hidden2));
  f.log_p = log_softmax_rows(Matrix((f.d2 * p.w3.transpose()).rowwise() + p.b3.transpose()));
  return f;
}

DropoutMasks draw_masks(Eigen::Index rows, double rate, Rng& rng) {
  DropoutMasks m;
  const double keep = 1.0 - rate;
  auto draw = [&](Eigen::Index cols) {
    Matrix out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
    return out;
  };
  m.hidden1 = draw(MlpShape::kHidden1);
  m.hidden2 = draw(MlpShape::kHidden2);
  return m;
}

}  // namespace

double mlp_objective(const Vector& theta, const MlpShape& shape, const Eigen::Ref<const Matrix>& x,
                     std::span<const int> y, const DropoutMasks& masks, Vector* grad) {
  const auto f = mlp_forward(theta, shape, x, masks);
  const auto n = static_cast<double>(x.rows());
  double loss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) loss -= f.log_p(static_cast<Eigen::Index>(i), y[i]);
  loss /= n;
  if (!grad) return loss;

  MlpView<const Vector> p(theta, shape);
  grad->resize(theta.size());
  MlpView<Vector> g(*grad, shape);

  const Matrix dz = (f.log_p.array().exp().matrix() - one_hot(y, shape.num_classes)) / n;
  g.w3 = dz.transpose() * f.d2;
  g.b3 = dz.colwise().sum().transpose();
  Matrix dh2 = dz * p.w3;
  if (!masks.empty()) dh2 = dh2.cwiseProduct(masks.hidden2);
  const Matrix da2 = dh2.array() * (1.0 - f.h2.array().square());
  g.w2 = da2.transpose() * f.d1;
  g.b2 = da2.colwise().sum().transpose();
  Matrix dh1 = da2 * p.w2;
  if (!masks.empty()) dh1 = dh1.cwiseProduct(masks.hidden1);
  const Matrix da1 = (f.a1.array() > 0).select(dh1, 0.0);
  g.w1 = da1.transpose() * x;
  g.b1 = da1.colwise().sum().transpose();
  return loss;
}

Vector init_mlp_parameters(const MlpShape& shape, std::uint64_t seed) {
  Vector theta = Vector::Zero(shape.parameter_count());
  MlpView<Vector> p(theta, shape);
  Rng rng(seed);
  auto glorot = [&](auto& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
  };
  glorot(p.w1);
  glorot(p.w2);
  glorot(p.w3);
  return theta;
}

MlpClassifier::MlpClassifier(MlpShape shape, Vector theta, double dropout_rate)
    : shape_(shape), theta_(std::move(theta)), dropout_rate_(dropout_rate) {
  if (theta_.size() != shape_.parameter_count())
    throw DimensionError("mlp: expected " + std::to_string(shape_.parameter_count()) + " parameters, got " +
                         std::to_string(theta_.size()));
}

Matrix MlpClassifier::predict_proba(const Eigen::Ref<const Matrix>& x) const {
  check_columns(x.cols(), dim());
  return mlp_forward(theta_, shape_, x, {}).log_p.array().exp();
}

std::vector<int> MlpClassifier::predict(const Eigen::Ref<const Matrix>& x) const {
  check_columns(x.cols(), dim());
  return argmax_rows(mlp_forward(theta_, shape_, x, {}).log_p);
}

nlohmann::json MlpClassifier::to_json() const {
  return {{"version", kModelVersion},
          {"kind", "mlp"},
          {"num_classes", shape_.num_classes},
          {"dim", shape_.input_dim},
          {"hidden", {MlpShape::kHidden1, MlpShape::kHidden2}},
          {"dropout_rate", dropout_rate_},
          {"parameters", to_std(theta_)}};
}

MlpClassifier MlpClassifier::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kModelVersion || j.at("kind") != "mlp")
    throw ConfigError("mlp: unsupported model file");
  MlpShape shape{j.at("dim").get<Eigen::Index>(), j.at("num_classes").get<int>()};
  return MlpClassifier(shape, from_std(j.at("parameters").get<std::vector<double>>()),
                       j.at("dropout_rate").get<double>());
}

MlpClassifier fit_mlp(const Eigen::Ref<const Matrix>& x, std::span<const int> y, const MlpOptions& options,
                      std::uint64_t seed, int num_classes) {
  check_training_input(x, y, num_classes);
  if (options.dropout_rate < 0 || options.dropout_rate >= 1) throw ConfigError("mlp: dropout rate must be in [0, 1)");
  if (options.batch_size < 1 || options.epochs < 0) throw ConfigError("mlp: bad batch size or epoch count");
  const MlpShape shape{x.cols(), num_classes};
  MlpClassifier model(shape, init_mlp_parameters(shape, derive_seed(seed, {1})), options.dropout_rate);
  Rng rng(derive_seed(seed, {2}));
  Adam adam(model.theta_.size(), AdamConfig{options.learning_rate});

  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Vector grad;
  std::vector<int> batch_y;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(options.batch_size)) {
      const auto stop = std::min(n, start + static_cast<std::size_t>(options.batch_size));
      std::span<const std::size_t> rows(order.data() + start, stop - start);
      const Matrix bx = take_rows(x, rows);
      batch_y.clear();
      for (auto r : rows) batch_y.push_back(y[r]);
      DropoutMasks masks;
      if (options.dropout_rate > 0) masks = draw_masks(bx.rows(), options.dropout_rate, rng);
      mlp_objective(model.theta_, shape, bx, batch_y, masks, &grad);
      adam.step(model.theta_, grad);
    }
    model.loss_history_.push_back(mlp_objective(model.theta_, shape, x, y));
  }
  return model;
}

// --- hyperparameter search --------------------------------------------------

namespace {

/// Accuracy of a model trained on `train` and scored on `test`. A training
/// partition holding one class yields a constant predictor.
std::size_t correct_on_fold(const Eigen::Ref<const Matrix>& x, std::span<const int> y,
                            std::span<const std::size_t> train, std::span<const std::size_t> test, double l2,
                            const FitOptions& fit, int num_classes) {
  std::vector<int> ty;
  for (auto r : train) ty.push_back(y[r]);
  std::vector<int> pred;
  const Matrix tx = take_rows(x, test);
  if (std::all_of(ty.begin(), ty.end(), [&](int c) { return c == ty.front(); })) {
    pred.assign(test.size(), ty.front());
  } else {
    pred = fit_softmax(take_rows(x, train), ty, l2, 0, num_classes, fit).predict(tx);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) correct += pred[i] == y[test[i]];
  return correct;
}

}  // namespace

std::size_t best_grid_index(std::span<const double> l2, std::span<const double> mean_accuracy) {
  if (l2.empty() || l2.size() != mean_accuracy.size()) throw ConfigError("grid search: bad grid scores");
  std::size_t best = 0;
  for (std::size_t g = 1; g < l2.size(); ++g) {
    const double diff = mean_accuracy[g] - mean_accuracy[best];
    if (diff > 1e-12 || (std::abs(diff) <= 1e-12 && l2[g] > l2[best])) best = g;
  }
  return best;
}

GridSearchResult grid_search(const Eigen::Ref<const Matrix>& x, std::span<const int> y, const HyperGrid& grid,
                             const FoldAssignment& folds, int num_classes) {
  if (grid.l2.empty()) throw ConfigError("grid search: empty grid");
  if (grid.l2.size() == 1) return {grid.l2.front(), {}};
  if (folds.fold_of.size() != y.size()) throw DimensionError("grid search: fold assignment does not match rows");

  GridSearchResult result;
  result.mean_accuracy.assign(grid.l2.size(), 0.0);
  for (int f = 0; f < folds.num_folds; ++f) {
    const auto train = folds.train_rows(f);
    const auto test = folds.test_rows(f);
    if (test.empty() || train.empty()) continue;
    for (std::size_t g = 0; g < grid.l2.size(); ++g) {
      const auto correct = correct_on_fold(x, y, train, test, grid.l2[g], grid.fit, num_classes);
      result.mean_accuracy[g] += static_cast<double>(correct) / static_cast<double>(test.size());
    }
  }
  for (auto& a : result.mean_accuracy) a /= folds.num_folds;

  result.best_l2 = grid.l2[best_grid_index(grid.l2, result.mean_accuracy)];
  return result;
}

GridSearchResult grid_search(const Eigen::Ref<const Matrix>& x, std::span<const int> y, const HyperGrid& grid,
                             int inner_folds, std::uint64_t seed, int num_classes) {
  if (inner_folds < 2) throw ConfigError("grid search: need at least 2 inner folds");
  auto folds = stratified_folds(y, inner_folds, seed);
  if (!folds.fully_stratified) {
    spdlog::warn("grid search: a class has fewer than {} samples; using unstratified inner folds", inner_folds);
    folds = random_folds(y.size(), inner_folds, seed);
  }
  return grid_search(x, y, grid, folds, num_classes);
}

}  // namespace newstox
