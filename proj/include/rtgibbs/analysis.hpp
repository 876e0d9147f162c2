#ifndef RTGIBBS_ANALYSIS_HPP
#define RTGIBBS_ANALYSIS_HPP

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "rtgibbs/chain.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"

namespace rtgibbs {

template <typename Scalar>
Scalar frobenius(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("frobenius: shape mismatch");
  return (a - b).norm();
}

/// Log data factor of the posterior, constants dropped:
///   (n/2) log|Theta| - (1/2) tr(S Theta).
template <typename Scalar>
Scalar log_likelihood_full(const MatrixX<Scalar>& theta, const MatrixX<Scalar>& s, Index n) {
  require_square_symmetric(theta, "log_likelihood_full");
  if (s.rows() != theta.rows() || s.cols() != theta.cols())
    throw std::invalid_argument("log_likelihood_full: S/Theta shape mismatch");
  Eigen::LLT<MatrixX<Scalar>> llt(theta);
  if (llt.info() != Eigen::Success)
    throw numeric_error("log_likelihood_full: Theta is not positive definite");
  const Scalar half_logdet = llt.matrixLLT().diagonal().array().log().sum();
  return Scalar(n) * half_logdet - Scalar(0.5) * theta.cwiseProduct(s).sum();
}

/// Same quantity evaluated through the telescoped partial regressions,
///   sum_j [ (n/2) log t_jj - (t_jj/2) || y_j + y_{1:j-1} t_{.j} / t_jj ||^2 ],
/// with the same constants dropped as the full form.
template <typename Scalar>
Scalar log_likelihood_telescoped(const MatrixX<Scalar>& ttheta, const MatrixX<Scalar>& y) {
  require_square_symmetric(ttheta, "log_likelihood_telescoped");
  const Index p = ttheta.rows();
  const Index n = y.rows();
  if (y.cols() != p)
    throw std::invalid_argument("log_likelihood_telescoped: y has " + std::to_string(y.cols()) +
                                " columns, expected " + std::to_string(p));
  Scalar out = 0;
  for (Index j = 0; j < p; ++j) {
    const Scalar tjj = ttheta(j, j);
    if (!(tjj > Scalar(0)))
      throw numeric_error("log_likelihood_telescoped: non-positive diagonal at column " +
                          std::to_string(j + 1));
    Scalar rss;
    if (j == 0) {
      rss = y.col(0).squaredNorm();
    } else {
      VectorX<Scalar> resid = y.col(j);
      resid.noalias() += y.leftCols(j) * (ttheta.col(j).head(j) / tjj);
      rss = resid.squaredNorm();
    }
    out += Scalar(0.5) * Scalar(n) * std::log(tjj) - Scalar(0.5) * tjj * rss;
  }
  return out;
}

template <typename Scalar>
struct PosteriorSummary {
  MatrixX<Scalar> mean;
  MatrixX<Scalar> q_low;   // 25% at the default interval
  MatrixX<Scalar> q_med;   // 50%
  MatrixX<Scalar> q_high;  // 75%
  double ci = 0.5;         // central interval mass used for edge selection
  std::vector<std::pair<Index, Index>> edge_set;  // (j, k), j < k, 0-based
};

namespace detail {
// Nearest-rank empirical quantile: the ceil(q*N)-th order statistic.
template <typename Scalar>
Scalar nearest_rank_quantile(std::vector<Scalar>& scratch, double q) {
  const auto n = static_cast<std::ptrdiff_t>(scratch.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, n);
  std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
  return scratch[rank - 1];
}
}  // namespace detail

/// Entrywise posterior mean and central-interval quantiles; an edge (j, k) is
/// declared when the middle `ci` credible interval excludes zero.
template <typename Scalar>
PosteriorSummary<Scalar> summarize(const ChainResult<Scalar>& result, double ci = 0.5) {
  if (result.draws.empty()) throw data_error("summarize: no stored draws");
  if (!(ci > 0.0 && ci < 1.0)) throw config_error("summarize: ci must lie in (0, 1)");
  const Index p = result.draws.front().rows();
  const auto n_draws = result.draws.size();
  const double q_lo = (1.0 - ci) / 2.0;
  const double q_hi = 1.0 - q_lo;

  PosteriorSummary<Scalar> out;
  out.ci = ci;
  out.mean = MatrixX<Scalar>::Zero(p, p);
  for (const auto& d : result.draws) out.mean += d;
  out.mean /= static_cast<Scalar>(n_draws);

  out.q_low.resize(p, p);
  out.q_med.resize(p, p);
  out.q_high.resize(p, p);
  std::vector<Scalar> scratch(n_draws);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i <= j; ++i) {
      for (std::size_t m = 0; m < n_draws; ++m) scratch[m] = result.draws[m](i, j);
      const Scalar lo = detail::nearest_rank_quantile(scratch, q_lo);
      const Scalar med = detail::nearest_rank_quantile(scratch, 0.5);
      const Scalar hi = detail::nearest_rank_quantile(scratch, q_hi);
      out.q_low(i, j) = out.q_low(j, i) = lo;
      out.q_med(i, j) = out.q_med(j, i) = med;
      out.q_high(i, j) = out.q_high(j, i) = hi;
      if (i < j && (lo > Scalar(0) || hi < Scalar(0))) out.edge_set.emplace_back(i, j);
    }
  }
  return out;
}

struct TraceDiagnostics {
  bool degenerate = false;  // constant trace, autocorrelation undefined
  double lag1_autocorr = std::numeric_limits<double>::quiet_NaN();
  double ess_proxy = std::numeric_limits<double>::quiet_NaN();
};

/// Lag-1 autocorrelation of the log-likelihood trace and the AR(1) effective
/// sample size proxy M (1-rho)/(1+rho).
template <typename Scalar>
TraceDiagnostics trace_diagnostics(const ChainResult<Scalar>& result) {
  TraceDiagnostics d;
  const auto& tr = result.loglik_trace;
  const auto m = tr.size();
  if (m < 2) {
    d.degenerate = true;
    return d;
  }
  double mean = 0.0;
  for (auto v : tr) mean += static_cast<double>(v);
  mean /= static_cast<double>(m);
  double denom = 0.0, num = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double c = static_cast<double>(tr[t]) - mean;
    denom += c * c;
    if (t + 1 < m) num += c * (static_cast<double>(tr[t + 1]) - mean);
  }
  if (denom <= 0.0) {
    d.degenerate = true;
    return d;
  }
  d.lag1_autocorr = num / denom;
  const double rho = std::clamp(d.lag1_autocorr, -0.999999, 0.999999);
  d.ess_proxy = std::clamp(static_cast<double>(m) * (1.0 - rho) / (1.0 + rho), 1.0,
                           static_cast<double>(m));
  return d;
}

}  // namespace rtgibbs

#endif
