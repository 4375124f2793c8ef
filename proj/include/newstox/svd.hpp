#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "newstox/error.hpp"

namespace newstox {

/// Top-k right singular vectors of an (uncentered) N x V matrix.
///
/// Rows of `components` are orthonormal; `singular_values` are non-increasing.
template <typename Scalar>
struct SvdProjector {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix components;  // k x V
  Vector singular_values;

  Eigen::Index k() const { return components.rows(); }
  Eigen::Index input_dim() const { return components.cols(); }

  /// Row-wise projection: rows * components^T. Accepts dense or sparse expressions.
  template <typename Rows>
  Matrix project(const Rows& rows) const {
    if (rows.cols() != input_dim())
      throw DimensionError("svd projection: expected " + std::to_string(input_dim()) +
                           " columns, got " + std::to_string(rows.cols()));
    return Matrix(rows * components.transpose());
  }
};

namespace detail {

/// Makes the largest-magnitude entry of every row positive.
template <typename Derived>
void canonicalize_signs(Eigen::MatrixBase<Derived>& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Eigen::Index arg;
    rows.row(r).cwiseAbs().maxCoeff(&arg);
    if (rows(r, arg) < 0) rows.row(r) *= -1;
  }
}

/// Modified Gram-Schmidt over rows [from, rows()); earlier rows are assumed orthonormal.
/// Returns false when a row collapses to (near) zero.
template <typename Matrix>
bool orthonormalize_row(Matrix& rows, Eigen::Index r) {
  using Scalar = typename Matrix::Scalar;
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index q = 0; q < r; ++q) rows.row(r) -= rows.row(q).dot(rows.row(r)) * rows.row(q);
  const Scalar norm = rows.row(r).norm();
  if (norm < Scalar(1e-6)) return false;
  rows.row(r) /= norm;
  return true;
}

template <typename Scalar>
SvdProjector<Scalar> svd_from_gram(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& gram, Eigen::Index k,
    bool gram_is_column_side) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw Error("svd: eigendecomposition did not converge");
  const Eigen::Index n = gram.rows();

  SvdProjector<Scalar> out;
  out.singular_values.resize(k);
  out.components.resize(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index src = n - 1 - i;  // eigenvalues are ascending
    out.singular_values(i) = std::sqrt(std::max(eig.eigenvalues()(src), Scalar(0)));
    if (gram_is_column_side) out.components.row(i) = eig.eigenvectors().col(src).transpose();
  }
  if (!gram_is_column_side) {
    // Caller maps the left vectors back; keep them in components for now.
    for (Eigen::Index i = 0; i < k; ++i)
      out.components.row(i) = eig.eigenvectors().col(n - 1 - i).transpose();
  }
  return out;
}

}  // namespace detail

/// Truncated SVD via the eigendecomposition of the smaller Gram matrix.
///
/// When V > N the left singular vectors u_i are mapped back through
/// v_i = M^T u_i / s_i; directions with a vanishing singular value are filled
/// with an orthonormal completion so that the k rows stay orthonormal.
template <typename MatrixType>
SvdProjector<typename MatrixType::Scalar> fit_svd(const MatrixType& m, Eigen::Index k) {
  using Scalar = typename MatrixType::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n_rows = m.rows();
  const Eigen::Index n_cols = m.cols();
  if (k < 1 || k > std::min(n_rows, n_cols))
    throw DimensionError("svd: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(std::min(n_rows, n_cols)) + "]");

  SvdProjector<Scalar> out;
  if (n_cols <= n_rows) {
    Matrix gram = Matrix(m.transpose() * m);
    out = detail::svd_from_gram<Scalar>(gram, k, true);
  } else {
    Matrix gram = Matrix(m * m.transpose());
    auto left = detail::svd_from_gram<Scalar>(gram, k, false);
    out.singular_values = left.singular_values;
    out.components.resize(k, n_cols);
    const Scalar s_max = left.singular_values(0);
    const Scalar tol = static_cast<Scalar>(std::max(n_rows, n_cols)) *
                       std::numeric_limits<Scalar>::epsilon() * std::max(s_max, Scalar(1));
    Eigen::Index filled = 0;
    for (; filled < k && left.singular_values(filled) > tol; ++filled) {
      Matrix u = left.components.row(filled).transpose();
      out.components.row(filled) = (Matrix(m.transpose() * u) / left.singular_values(filled)).transpose();
      if (!detail::orthonormalize_row(out.components, filled)) break;
    }
    // Remaining rows span part of the null space; complete from the standard basis.
    Eigen::Index basis = 0;
    for (Eigen::Index r = filled; r < k; ++r) {
      out.singular_values(r) = 0;
      do {
        out.components.row(r).setZero();
        out.components(r, basis++) = 1;
      } while (!detail::orthonormalize_row(out.components, r));
    }
  }
  detail::canonicalize_signs(out.components);
  return out;
}

}  // namespace newstox
