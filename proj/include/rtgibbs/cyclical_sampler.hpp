#ifndef RTGIBBS_CYCLICAL_SAMPLER_HPP
#define RTGIBBS_CYCLICAL_SAMPLER_HPP

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <string>

#include "rtgibbs/analysis.hpp"
#include "rtgibbs/chain.hpp"
#include "rtgibbs/distributions.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/priors.hpp"
#include "rtgibbs/rng.hpp"

namespace rtgibbs {

// Baseline column-at-a-time Gibbs sampler. It consumes only the scatter
// matrix S = y^T y, never the data matrix itself, which is exactly why its
// per-sweep cost cannot drop below O(p^4): every column requires the explicit
// inverse of a (p-1) x (p-1) principal submatrix. Kept deliberately faithful
// to that cost profile; it is the comparator, not the contribution.

template <typename Scalar>
struct PartitionParts {
  MatrixX<Scalar> sub;   // the matrix with row/column j deleted
  VectorX<Scalar> col;   // off-diagonal entries of column j, original order
  Scalar corner;         // the (j, j) entry
};

/// Split a p x p matrix around 0-based index j into (sub, col, corner).
template <typename Scalar>
PartitionParts<Scalar> partition_views(const MatrixX<Scalar>& m, Index j) {
  const Index p = m.rows();
  if (m.cols() != p) throw std::invalid_argument("partition_views: matrix must be square");
  if (j < 0 || j >= p) throw std::invalid_argument("partition_views: index out of range");
  PartitionParts<Scalar> parts;
  parts.sub.resize(p - 1, p - 1);
  parts.sub.topLeftCorner(j, j) = m.topLeftCorner(j, j);
  parts.sub.topRightCorner(j, p - 1 - j) = m.topRightCorner(j, p - 1 - j);
  parts.sub.bottomLeftCorner(p - 1 - j, j) = m.bottomLeftCorner(p - 1 - j, j);
  parts.sub.bottomRightCorner(p - 1 - j, p - 1 - j) = m.bottomRightCorner(p - 1 - j, p - 1 - j);
  parts.col.resize(p - 1);
  parts.col.head(j) = m.col(j).head(j);
  parts.col.tail(p - 1 - j) = m.col(j).tail(p - 1 - j);
  parts.corner = m(j, j);
  return parts;
}

/// Run the cyclical chain on a scatter matrix S = y^T y with sample size n.
template <typename Scalar>
ChainResult<Scalar> cyclical_run(const MatrixX<Scalar>& s, Index n, const PriorSpec<Scalar>& prior,
                                 const ChainConfig& cfg) {
  cfg.validate();
  require_square_symmetric(s, "cyclical_run", Scalar(1e-8));
  if (n < 1) throw data_error("cyclical_run: need n >= 1");
  const Index p = s.rows();
  RngStream rng(cfg.seed, cfg.stream);

  MatrixX<Scalar> theta = MatrixX<Scalar>::Identity(p, p);
  ShrinkageState<Scalar> state = ShrinkageState<Scalar>::all_ones(p);

  ChainResult<Scalar> result;
  double elapsed = 0.0;
  Index stored = 0;

  for (Index m = 0; m < cfg.iterations; ++m) {
    const auto tic = std::chrono::steady_clock::now();
    for (Index j = 0; j < p; ++j) {
      const Scalar tjj =
          static_cast<Scalar>(sample_gamma(n / 2.0 + 1.0, static_cast<double>(s(j, j)) / 2.0, rng));
      if (p == 1) {
        theta(0, 0) = tjj;
        break;
      }
      PartitionParts<Scalar> th = partition_views(theta, j);
      Eigen::LLT<MatrixX<Scalar>> llt_sub(th.sub);
      if (llt_sub.info() != Eigen::Success)
        throw numeric_error("cyclical_run: Theta_{-j,-j} lost positive definiteness at column " +
                            std::to_string(j + 1) + "; this indicates a sampler bug");
      const MatrixX<Scalar> theta_sub_inv =
          llt_sub.solve(MatrixX<Scalar>::Identity(p - 1, p - 1));

      PartitionParts<Scalar> sc = partition_views(s, j);
      PartitionParts<Scalar> lam = partition_views(state.lambda2, j);

      MatrixX<Scalar> b = s(j, j) * theta_sub_inv;
      b.diagonal() += (lam.col * state.tau2).cwiseInverse();
      Eigen::LLT<MatrixX<Scalar>> llt_b(b);
      if (llt_b.info() != Eigen::Success)
        throw numeric_error("cyclical_run: conditional precision factorization failed at column " +
                            std::to_string(j + 1));
      VectorX<Scalar> mu = llt_b.solve(-sc.col);
      VectorX<Scalar> z = sample_normal_vector<Scalar>(p - 1, rng);
      VectorX<Scalar> tcol = mu + llt_b.matrixU().solve(z);

      // scatter the new column back and restore theta_jj via the inverse map
      Index r = 0;
      for (Index k = 0; k < p; ++k) {
        if (k == j) continue;
        theta(k, j) = tcol[r];
        theta(j, k) = tcol[r];
        ++r;
      }
      theta(j, j) = tjj + tcol.dot(theta_sub_inv * tcol);

      // local updates cover the upper-triangle entries of column j, so the
      // first column has nothing to update and each pair is hit once per sweep
      if (j >= 1) update_local(prior, VectorX<Scalar>(theta.col(j).head(j)), state, j, rng);
    }
    update_global_halfcauchy(theta, state, rng);
    const auto toc = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(toc - tic).count();
    result.per_iter_seconds.push_back(dt);
    elapsed += dt;
    ++result.iterations_run;

    if (cfg.store_traces) result.loglik_trace.push_back(log_likelihood_full(theta, s, n));
    if (m >= cfg.burnin && (m - cfg.burnin) % cfg.thin == 0) {
      spot_check_stored_draw(theta, stored, "cyclical_run");
      result.draws.push_back(theta);
      ++stored;
    }
    if (cfg.time_limit_seconds > 0.0 && elapsed > cfg.time_limit_seconds) {
      result.timed_out = true;
      break;
    }
  }

  result.final_theta = theta;
  result.final_state = state;
  return result;
}

}  // namespace rtgibbs

#endif
