#ifndef RTGIBBS_PRIORS_HPP
#define RTGIBBS_PRIORS_HPP

#include <functional>
#include <string>

#include "rtgibbs/distributions.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/rng.hpp"

namespace rtgibbs {

// Element-wise shrinkage priors on the off-diagonals of a precision matrix:
// theta_jk | lambda_jk, tau ~ N(0, tau^2 lambda_jk^2). The local-scale full
// conditionals below are the conjugate updates implied by the half-Cauchy
// (GHS) and Exponential(1) (BGL) mixing densities; the prior-marginal
// recovery tests validate them against the target marginals.

enum class PriorKind { GHS, BGL, GHSLPlugin };

inline const char* prior_name(PriorKind k) {
  switch (k) {
    case PriorKind::GHS: return "ghs";
    case PriorKind::BGL: return "bgl";
    case PriorKind::GHSLPlugin: return "ghsl";
  }
  return "?";
}

/// Local scales Lambda^2 (symmetric, unit diagonal), global scale tau^2, and
/// the inverse-gamma augmentation variables nu (local) and xi (global) used by
/// the half-Cauchy conditionals.
template <typename Scalar>
struct ShrinkageState {
  MatrixX<Scalar> lambda2;
  Scalar tau2 = Scalar(1);
  MatrixX<Scalar> aux_local;  // nu_jk
  Scalar aux_global = Scalar(1);  // xi

  static ShrinkageState all_ones(Index p) {
    ShrinkageState s;
    s.lambda2 = MatrixX<Scalar>::Ones(p, p);
    s.aux_local = MatrixX<Scalar>::Ones(p, p);
    return s;
  }
};

template <typename Scalar>
using LocalUpdateFn = std::function<void(const VectorX<Scalar>& theta_col,
                                         ShrinkageState<Scalar>& state, Index j, RngStream& rng)>;

template <typename Scalar>
struct PriorSpec {
  PriorKind kind = PriorKind::GHS;
  LocalUpdateFn<Scalar> local_plugin;  // required for GHSLPlugin
};

template <typename Scalar>
PriorSpec<Scalar> make_prior(PriorKind kind, LocalUpdateFn<Scalar> plugin = nullptr) {
  if (kind == PriorKind::GHSLPlugin && !plugin)
    throw config_error("make_prior: the GHSL prior requires a local-update plugin callback");
  PriorSpec<Scalar> spec;
  spec.kind = kind;
  spec.local_plugin = std::move(plugin);
  return spec;
}

/// GHS local update for column j (0-based): for k < j,
///   lambda2_kj ~ IG(1, 1/nu_kj + theta_kj^2/(2 tau^2)),
///   nu_kj     ~ IG(1, 1 + 1/lambda2_kj),
/// mirrored across the diagonal. `theta_col` holds theta_{.j} (length j).
template <typename Scalar>
void update_local_ghs(const VectorX<Scalar>& theta_col, ShrinkageState<Scalar>& state, Index j,
                      RngStream& rng) {
  if (!(state.tau2 > Scalar(0))) throw numeric_error("update_local_ghs: tau2 must be positive");
  if (theta_col.size() != j)
    throw std::invalid_argument("update_local_ghs: theta_col has length " +
                                std::to_string(theta_col.size()) + ", expected " + std::to_string(j));
  for (Index k = 0; k < j; ++k) {
    const Scalar th2 = theta_col[k] * theta_col[k];
    const Scalar l2 = static_cast<Scalar>(
        sample_inverse_gamma(1.0, 1.0 / state.aux_local(k, j) + th2 / (2.0 * state.tau2), rng));
    state.lambda2(k, j) = l2;
    state.lambda2(j, k) = l2;
    const Scalar nu = static_cast<Scalar>(sample_inverse_gamma(1.0, 1.0 + 1.0 / l2, rng));
    state.aux_local(k, j) = nu;
    state.aux_local(j, k) = nu;
  }
}

/// BGL local update for column j: lambda2_kj ~ GIG(1/2, theta_kj^2/tau^2, 2),
/// the conditional obtained from the Exponential(1) mixing density.
template <typename Scalar>
void update_local_bgl(const VectorX<Scalar>& theta_col, ShrinkageState<Scalar>& state, Index j,
                      RngStream& rng) {
  if (!(state.tau2 > Scalar(0))) throw numeric_error("update_local_bgl: tau2 must be positive");
  if (theta_col.size() != j)
    throw std::invalid_argument("update_local_bgl: theta_col has length " +
                                std::to_string(theta_col.size()) + ", expected " + std::to_string(j));
  for (Index k = 0; k < j; ++k) {
    const Scalar th2 = theta_col[k] * theta_col[k];
    const Scalar l2 =
        static_cast<Scalar>(sample_gig({0.5, static_cast<double>(th2 / state.tau2), 2.0}, rng));
    state.lambda2(k, j) = l2;
    state.lambda2(j, k) = l2;
  }
}

/// Dispatch the prior-specific local update for column j.
template <typename Scalar>
void update_local(const PriorSpec<Scalar>& prior, const VectorX<Scalar>& theta_col,
                  ShrinkageState<Scalar>& state, Index j, RngStream& rng) {
  switch (prior.kind) {
    case PriorKind::GHS: update_local_ghs(theta_col, state, j, rng); break;
    case PriorKind::BGL: update_local_bgl(theta_col, state, j, rng); break;
    case PriorKind::GHSLPlugin: prior.local_plugin(theta_col, state, j, rng); break;
  }
}

/// Half-Cauchy global-scale update, shared by all priors here:
///   tau2 ~ IG((m+1)/2, 1/xi + sum_{j<k} theta_jk^2/(2 lambda2_jk)),  m = p(p-1)/2,
///   xi   ~ IG(1, 1 + 1/tau2).
template <typename Scalar>
void update_global_halfcauchy(const MatrixX<Scalar>& theta, ShrinkageState<Scalar>& state,
                              RngStream& rng) {
  const Index p = theta.rows();
  if (state.lambda2.rows() != p)
    throw std::invalid_argument("update_global_halfcauchy: state/theta dimension mismatch");
  double sum = 0.0;
  for (Index j = 1; j < p; ++j)
    for (Index k = 0; k < j; ++k)
      sum += theta(k, j) * theta(k, j) / (2.0 * state.lambda2(k, j));
  const double m = static_cast<double>(p) * static_cast<double>(p - 1) / 2.0;
  state.tau2 = static_cast<Scalar>(
      sample_inverse_gamma((m + 1.0) / 2.0, 1.0 / state.aux_global + sum, rng));
  state.aux_global = static_cast<Scalar>(sample_inverse_gamma(1.0, 1.0 + 1.0 / state.tau2, rng));
}

}  // namespace rtgibbs

#endif
