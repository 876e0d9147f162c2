#ifndef RTGIBBS_TELESCOPING_HPP
#define RTGIBBS_TELESCOPING_HPP

#include <string>

#include "rtgibbs/matrix.hpp"

namespace rtgibbs {

// Telescoping block decomposition of a symmetric positive definite matrix and
// its inverse. The forward map peels Schur complements of the trailing pivot
// one column at a time; the reverse map re-accumulates the same rank-1 terms.
// Columns j of the result hold (theta~_{.j}, theta~_{jj}) in rows 0..j.

/// Theta -> Theta~. Requires a PD input; throws numeric_error when a pivot
/// drops to or below kPivotTol (the input was not PD).
template <typename Scalar>
MatrixX<Scalar> forward_telescope(const MatrixX<Scalar>& theta) {
  require_square_symmetric(theta, "forward_telescope");
  MatrixX<Scalar> omega = theta;
  const Index p = omega.rows();
  for (Index j = p - 2; j >= 0; --j) {
    const Scalar pivot = omega(j + 1, j + 1);
    if (!(pivot > Scalar(kPivotTol)))
      throw numeric_error("forward_telescope: pivot " + std::to_string(pivot) +
                          " at column " + std::to_string(j + 2) + " (input not PD)");
    const VectorX<Scalar> u = omega.col(j + 1).head(j + 1);
    omega.topLeftCorner(j + 1, j + 1).noalias() -= (u / pivot) * u.transpose();
  }
  if (!(omega(0, 0) > Scalar(kPivotTol)))
    throw numeric_error("forward_telescope: pivot " + std::to_string(omega(0, 0)) +
                        " at column 1 (input not PD)");
  return omega;
}

/// Theta~ -> Theta, the exact inverse of forward_telescope. The rank-1 columns
/// are read from the unchanged input, not from the working copy.
template <typename Scalar>
MatrixX<Scalar> reverse_telescope(const MatrixX<Scalar>& ttheta) {
  require_square_symmetric(ttheta, "reverse_telescope");
  const Index p = ttheta.rows();
  for (Index j = 0; j < p; ++j)
    if (!(ttheta(j, j) > Scalar(kPivotTol)))
      throw numeric_error("reverse_telescope: non-positive diagonal " +
                          std::to_string(ttheta(j, j)) + " at column " + std::to_string(j + 1));
  MatrixX<Scalar> omega = ttheta;
  for (Index j = p - 2; j >= 0; --j) {
    const Scalar pivot = ttheta(j + 1, j + 1);
    const auto u = ttheta.col(j + 1).head(j + 1);
    omega.topLeftCorner(j + 1, j + 1).noalias() += (u / pivot) * u.transpose();
  }
  return omega;
}

/// Adds the rank-1 term (col col^T)/pivot to the leading block of the
/// accumulator. `col` holds theta~_{.j} (length j in 0-based column terms), so
/// after a full j = p-1..1 sweep column j of the accumulator equals gamma_j.
template <typename Scalar>
void accumulate_gamma(MatrixX<Scalar>& c, const VectorX<Scalar>& ttheta_col, Scalar ttheta_jj) {
  if (c.rows() != c.cols())
    throw std::invalid_argument("accumulate_gamma: accumulator must be square");
  if (ttheta_col.size() > c.rows())
    throw std::invalid_argument("accumulate_gamma: column length " +
                                std::to_string(ttheta_col.size()) + " exceeds accumulator size " +
                                std::to_string(c.rows()));
  if (!(ttheta_jj > Scalar(0)))
    throw std::invalid_argument("accumulate_gamma: pivot must be positive");
  const Index k = ttheta_col.size();
  if (k == 0) return;
  c.topLeftCorner(k, k).noalias() += (ttheta_col / ttheta_jj) * ttheta_col.transpose();
}

}  // namespace rtgibbs

#endif
