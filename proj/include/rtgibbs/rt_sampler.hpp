#ifndef RTGIBBS_RT_SAMPLER_HPP
#define RTGIBBS_RT_SAMPLER_HPP

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "rtgibbs/analysis.hpp"
#include "rtgibbs/chain.hpp"
#include "rtgibbs/distributions.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/fast_gaussian.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/priors.hpp"
#include "rtgibbs/rng.hpp"
#include "rtgibbs/telescoping.hpp"

namespace rtgibbs {

// Reverse-telescoping block Gibbs sampler. Each sweep walks columns j = p..1
// in the telescoped parameterization, where positive definiteness reduces to
// t_jj > 0, then maps each column back to Theta through the running gamma
// accumulator. Per-sweep cost is O(max(n^2 p^2, p n^3, p^3)).

template <typename Scalar>
struct RtState {
  MatrixX<Scalar> theta;
  MatrixX<Scalar> ttheta;
  ShrinkageState<Scalar> shrinkage;
};

/// Initial state: Theta = (y^T y + 0.01 I)^-1, its telescoped form, local
/// scales all one, tau^2 = 1.
template <typename Scalar>
RtState<Scalar> rt_init(const MatrixX<Scalar>& y) {
  const Index n = y.rows();
  const Index p = y.cols();
  if (n < 1 || p < 1) throw data_error("rt_init: data matrix must be at least 1x1");
  if (!y.allFinite()) throw data_error("rt_init: data contains non-finite values");

  MatrixX<Scalar> a = MatrixX<Scalar>::Identity(p, p) * Scalar(0.01);
  a.template selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
  a.template triangularView<Eigen::StrictlyUpper>() = a.transpose();
  Eigen::LLT<MatrixX<Scalar>> llt(a);
  if (llt.info() != Eigen::Success)
    throw numeric_error("rt_init: factorization of y^T y + 0.01 I failed");

  RtState<Scalar> st;
  st.theta = llt.solve(MatrixX<Scalar>::Identity(p, p));
  st.theta = ((st.theta + st.theta.transpose()) / Scalar(2)).eval();
  st.ttheta = forward_telescope(st.theta);
  st.shrinkage = ShrinkageState<Scalar>::all_ones(p);
  return st;
}

/// Diagonal draw for 0-based column j: Gamma(n/2+1, rate y_1^T y_1 / 2) at
/// j = 0, otherwise GIG(n/2+1, ||y_{1:j} ttheta_col||^2, y_j^T y_j).
template <typename Scalar>
Scalar rt_sample_diag(Index j, const MatrixX<Scalar>& y, const VectorX<Scalar>& ttheta_col,
                      RngStream& rng) {
  const double psi = static_cast<double>(y.col(j).squaredNorm());
  if (!(psi > 0.0))
    throw std::invalid_argument("rt_sample_diag: column " + std::to_string(j + 1) +
                                " of the data has zero norm (constant/zero column)");
  if (j == 0) return static_cast<Scalar>(sample_gamma(y.rows() / 2.0 + 1.0, psi / 2.0, rng));
  if (ttheta_col.size() != j)
    throw std::invalid_argument("rt_sample_diag: ttheta_col has length " +
                                std::to_string(ttheta_col.size()) + ", expected " +
                                std::to_string(j));
  const double chi = static_cast<double>((y.leftCols(j) * ttheta_col).squaredNorm());
  return static_cast<Scalar>(sample_gig({y.rows() / 2.0 + 1.0, chi, psi}, rng));
}

/// Off-diagonal draw for 0-based column j >= 1: beta from the partial
/// regression posterior via fast_gaussian, then
/// ttheta_{.j} = sqrt(t_jj) beta - gamma_{.j}.
template <typename Scalar>
VectorX<Scalar> rt_sample_offdiag(Index j, const MatrixX<Scalar>& y, Scalar ttheta_jj,
                                  const VectorX<Scalar>& gamma_col,
                                  const VectorX<Scalar>& lambda2_col, Scalar tau2,
                                  RngStream& rng) {
  if (j < 1) throw std::invalid_argument("rt_sample_offdiag: need column index >= 1");
  if (gamma_col.size() != j || lambda2_col.size() != j)
    throw std::invalid_argument("rt_sample_offdiag: gamma/lambda2 length mismatch at column " +
                                std::to_string(j + 1));
  if (!(ttheta_jj > Scalar(0)) || !(tau2 > Scalar(0)))
    throw std::invalid_argument("rt_sample_offdiag: scale inputs must be positive");

  const Scalar sqrt_t = std::sqrt(ttheta_jj);
  MatrixX<Scalar> x = -y.leftCols(j);
  VectorX<Scalar> z = y.col(j) * sqrt_t;
  z.noalias() += x * (gamma_col / sqrt_t);
  VectorX<Scalar> d = (tau2 / ttheta_jj) * lambda2_col;
  VectorX<Scalar> beta = fast_gaussian(x, z, d, rng);
  return sqrt_t * beta - gamma_col;
}

/// One full Gibbs sweep over columns p..1 plus the global-scale update.
/// `c_workspace` is the p x p gamma accumulator, reset here each sweep.
template <typename Scalar>
void rt_sweep(RtState<Scalar>& st, const MatrixX<Scalar>& y, const PriorSpec<Scalar>& prior,
              MatrixX<Scalar>& c_workspace, RngStream& rng) {
  const Index p = y.cols();
  c_workspace.setZero();
  for (Index j = p - 1; j >= 1; --j) {
    const VectorX<Scalar> prev_col = st.ttheta.col(j).head(j);
    const Scalar tjj = rt_sample_diag(j, y, prev_col, rng);
    const VectorX<Scalar> gamma_col = c_workspace.col(j).head(j);
    const Scalar gamma_jj = c_workspace(j, j);
    const VectorX<Scalar> lambda2_col = st.shrinkage.lambda2.col(j).head(j);
    const VectorX<Scalar> tcol =
        rt_sample_offdiag(j, y, tjj, gamma_col, lambda2_col, st.shrinkage.tau2, rng);

    st.ttheta(j, j) = tjj;
    st.ttheta.col(j).head(j) = tcol;
    st.ttheta.row(j).head(j) = tcol.transpose();
    accumulate_gamma(c_workspace, tcol, tjj);

    st.theta(j, j) = tjj + gamma_jj;
    const VectorX<Scalar> theta_col = tcol + gamma_col;
    st.theta.col(j).head(j) = theta_col;
    st.theta.row(j).head(j) = theta_col.transpose();

    update_local(prior, theta_col, st.shrinkage, j, rng);
  }
  const Scalar t00 = rt_sample_diag(Index(0), y, VectorX<Scalar>(), rng);
  st.ttheta(0, 0) = t00;
  st.theta(0, 0) = t00 + c_workspace(0, 0);
  update_global_halfcauchy(st.theta, st.shrinkage, rng);
}

/// Run the reverse-telescoping chain on an n x p data matrix.
template <typename Scalar>
ChainResult<Scalar> rt_run(const MatrixX<Scalar>& y, const PriorSpec<Scalar>& prior,
                           const ChainConfig& cfg) {
  cfg.validate();
  RtState<Scalar> st = rt_init(y);
  const Index p = y.cols();
  RngStream rng(cfg.seed, cfg.stream);

  MatrixX<Scalar> s;  // scatter matrix, only needed for the log-likelihood trace
  if (cfg.store_traces) {
    s = MatrixX<Scalar>::Zero(p, p);
    s.template selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
    s.template triangularView<Eigen::StrictlyUpper>() = s.transpose();
  }

  ChainResult<Scalar> result;
  MatrixX<Scalar> c(p, p);
  double elapsed = 0.0;
  Index stored = 0;

  for (Index m = 0; m < cfg.iterations; ++m) {
    const auto tic = std::chrono::steady_clock::now();
    rt_sweep(st, y, prior, c, rng);
    const auto toc = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(toc - tic).count();
    result.per_iter_seconds.push_back(dt);
    elapsed += dt;
    ++result.iterations_run;

    if (cfg.store_traces) result.loglik_trace.push_back(log_likelihood_full(st.theta, s, y.rows()));
    if (m >= cfg.burnin && (m - cfg.burnin) % cfg.thin == 0) {
      spot_check_stored_draw(st.theta, stored, "rt_run");
      result.draws.push_back(st.theta);
      ++stored;
    }
    if (cfg.time_limit_seconds > 0.0 && elapsed > cfg.time_limit_seconds) {
      result.timed_out = true;
      break;
    }
  }

  result.final_theta = st.theta;
  result.final_state = st.shrinkage;
  return result;
}

}  // namespace rtgibbs

#endif
