#ifndef RTGIBBS_FAST_GAUSSIAN_HPP
#define RTGIBBS_FAST_GAUSSIAN_HPP

#include <Eigen/Cholesky>
#include <string>

#include "rtgibbs/distributions.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/rng.hpp"

namespace rtgibbs {

/// One exact draw from
///   N( {X^T X + D^-1}^-1 X^T z,  {X^T X + D^-1}^-1 ),  D = diag(lambda2),
/// at cost O(max(n^2 q, n^3)): the q x q inverse is traded for an n x n solve.
/// Draw order is fixed (u then delta) so seeded runs are reproducible.
template <typename Scalar>
VectorX<Scalar> fast_gaussian(const MatrixX<Scalar>& x, const VectorX<Scalar>& z,
                              const VectorX<Scalar>& lambda2, RngStream& rng) {
  const Index n = x.rows();
  const Index q = x.cols();
  if (n < 1 || q < 1)
    throw std::invalid_argument("fast_gaussian: need n >= 1 and q >= 1");
  if (z.size() != n)
    throw std::invalid_argument("fast_gaussian: z has length " + std::to_string(z.size()) +
                                ", expected " + std::to_string(n));
  if (lambda2.size() != q)
    throw std::invalid_argument("fast_gaussian: lambda2 has length " +
                                std::to_string(lambda2.size()) + ", expected " + std::to_string(q));
  if (!(lambda2.array() > Scalar(0)).all())
    throw std::invalid_argument("fast_gaussian: lambda2 entries must be positive");

  VectorX<Scalar> u(q);
  for (Index i = 0; i < q; ++i) u[i] = std::sqrt(lambda2[i]) * static_cast<Scalar>(rng.normal());
  VectorX<Scalar> delta = sample_normal_vector<Scalar>(n, rng);

  VectorX<Scalar> v = delta;
  v.noalias() += x * u;

  // X Lambda^2 X^T + I is >= I, so an unpivoted Cholesky is always stable;
  // a failure here signals numerical corruption upstream.
  MatrixX<Scalar> a = x * lambda2.cwiseSqrt().asDiagonal();
  MatrixX<Scalar> m = MatrixX<Scalar>::Identity(n, n);
  m.template selfadjointView<Eigen::Lower>().rankUpdate(a);
  Eigen::LLT<MatrixX<Scalar>, Eigen::Lower> llt(m);
  if (llt.info() != Eigen::Success)
    throw numeric_error("fast_gaussian: Cholesky of X Lambda^2 X^T + I failed");
  VectorX<Scalar> zeta = llt.solve(z - v);

  u.noalias() += lambda2.asDiagonal() * (x.transpose() * zeta);
  return u;
}

}  // namespace rtgibbs

#endif
