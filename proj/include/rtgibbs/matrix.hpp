#ifndef RTGIBBS_MATRIX_HPP
#define RTGIBBS_MATRIX_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <string>

#include "rtgibbs/errors.hpp"

namespace rtgibbs {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Absolute tolerance used for symmetry invariants of precision-type matrices.
inline constexpr double kSymmetryTol = 1e-12;

/// Diagonal pivots at or below this value are treated as a loss of positive
/// definiteness rather than clamped; clamping would corrupt the bijection
/// between a precision matrix and its telescoped form.
inline constexpr double kPivotTol = 1e-12;

template <typename Scalar>
bool is_symmetric(const MatrixX<Scalar>& m, Scalar tol = Scalar(kSymmetryTol)) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i)
      if (!(std::abs(m(i, j) - m(j, i)) <= tol)) return false;
  return true;
}

template <typename Scalar>
void require_square_symmetric(const MatrixX<Scalar>& m, const char* what,
                              Scalar tol = Scalar(kSymmetryTol)) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": matrix is not square (" +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  if (!is_symmetric(m, tol))
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric within tolerance");
}

/// Positive-definiteness test: true iff a Cholesky factorization succeeds with
/// every pivot above kPivotTol. Throws on non-square or asymmetric input.
template <typename Scalar>
bool cholesky_pd_check(const MatrixX<Scalar>& m) {
  require_square_symmetric(m, "cholesky_pd_check");
  Eigen::LLT<MatrixX<Scalar>> llt(m);
  if (llt.info() != Eigen::Success) return false;
  // LLT pivots are L_jj; the Schur pivots are their squares.
  const Scalar min_pivot = std::sqrt(Scalar(kPivotTol));
  return (llt.matrixLLT().diagonal().array() > min_pivot).all();
}

}  // namespace rtgibbs

#endif
