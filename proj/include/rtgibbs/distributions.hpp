#ifndef RTGIBBS_DISTRIBUTIONS_HPP
#define RTGIBBS_DISTRIBUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/rng.hpp"

namespace rtgibbs {

/// Gamma(shape, rate) draw with mean shape/rate, Marsaglia-Tsang squeeze.
inline double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("sample_gamma: shape and rate must be positive (shape=" +
                                std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
  if (shape < 1.0) {
    // boost: X ~ Gamma(shape+1) scaled by U^{1/shape}
    const double u = rng.uniform();
    return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

/// Inverse-gamma in shape-scale form: the reciprocal of a Gamma(shape, rate=scale) draw.
inline double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("sample_inverse_gamma: shape and scale must be positive");
  return 1.0 / sample_gamma(shape, scale, rng);
}

/// Parameters of the generalized inverse Gaussian density
///   f(x) ~ x^{lambda-1} exp{-(chi/x + psi x)/2},  x > 0.
struct GigParams {
  double lambda;
  double chi;
  double psi;
};

/// chi below this threshold is collapsed to the weak Gamma limit. The GIG
/// density is undefined at chi = 0, but chi = ||y theta~||^2 underflows under
/// heavy shrinkage and its limit is Gamma(lambda, rate = psi/2).
inline constexpr double kGigChiFloor = 1e-10;

namespace detail {

// Devroye (2014) rejection sampler for the two-parameter standard form
//   g(z) ~ z^{lambda-1} exp{-(omega/2)(z + 1/z)},  lambda >= 0, omega > 0.
// Works on t = log z shifted to the mode, where the log-density
//   psi(t) = -alpha (cosh t - 1) - lambda (e^t - t - 1)
// is concave with maximum 0 at t = 0; the hat is uniform between the two
// tangent crossings and exponential outside. Uniformly efficient in
// (lambda, omega).
inline double gig_standard_two_param(double lambda, double omega, RngStream& rng) {
  // alpha = sqrt(omega^2 + lambda^2) - lambda, in cancellation-free form
  const double alpha = omega * (omega / (std::sqrt(omega * omega + lambda * lambda) + lambda));

  const auto psi = [&](double t) {
    double r = -alpha * (std::cosh(t) - 1.0);
    if (lambda != 0.0) r -= lambda * (std::expm1(t) - t);
    return r;
  };
  const auto dpsi = [&](double t) {
    double r = -alpha * std::sinh(t);
    if (lambda != 0.0) r -= lambda * std::expm1(t);
    return r;
  };

  double t = 1.0;
  {
    const double v = -psi(1.0);
    if (v > 2.0)
      t = std::sqrt(2.0 / (alpha + lambda));
    else if (v < 0.5)
      t = std::log(4.0 / (alpha + 2.0 * lambda));
  }
  double s = 1.0;
  {
    const double w = -psi(-1.0);
    if (w > 2.0) {
      s = std::sqrt(4.0 / (alpha * std::cosh(1.0) + lambda));
    } else if (w < 0.5) {
      const double s1 = std::log(1.0 + 1.0 / alpha + std::sqrt(1.0 / (alpha * alpha) + 2.0 / alpha));
      s = (lambda > 0.0) ? std::min(1.0 / lambda, s1) : s1;
    }
  }

  const double eta = -psi(t);
  const double zeta = -dpsi(t);
  const double theta = -psi(-s);
  const double xi = dpsi(-s);
  const double pr = 1.0 / xi;
  const double rr = 1.0 / zeta;
  const double td = t - rr * eta;
  const double sd = s - pr * theta;
  const double q = td + sd;
  const double total = pr + q + rr;

  double x;
  for (;;) {
    const double u = rng.uniform();
    const double v = rng.uniform();
    const double w = rng.uniform();
    if (u < q / total)
      x = -sd + q * v;
    else if (u < (q + rr) / total)
      x = td - rr * std::log(v);
    else
      x = -sd + pr * std::log(v);
    double hat;
    if (x > td)
      hat = std::exp(-eta - zeta * (x - t));
    else if (x < -sd)
      hat = std::exp(-theta + xi * (x + s));
    else
      hat = 1.0;
    if (w * hat <= std::exp(psi(x))) break;
  }
  // undo the mode shift: exp(t*) with sinh(t*) = lambda/omega
  const double lo = lambda / omega;
  return std::exp(x) * (lo + std::sqrt(1.0 + lo * lo));
}

}  // namespace detail

/// GIG(lambda, chi, psi) draw; exact for every lambda in R, chi >= 0, psi > 0
/// (chi = 0 requires lambda > 0 and is sampled from the Gamma limit).
inline double sample_gig(const GigParams& params, RngStream& rng) {
  const double lambda = params.lambda;
  const double chi = params.chi;
  const double psi = params.psi;
  if (!(psi > 0.0))
    throw std::invalid_argument("sample_gig: psi must be positive (psi=" + std::to_string(psi) + ")");
  if (!(chi >= 0.0))
    throw std::invalid_argument("sample_gig: chi must be nonnegative (chi=" + std::to_string(chi) + ")");
  if (chi < kGigChiFloor) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("sample_gig: chi ~ 0 requires lambda > 0 (lambda=" +
                                  std::to_string(lambda) + ")");
    return sample_gamma(lambda, psi / 2.0, rng);
  }
  const double omega = std::sqrt(chi * psi);
  const double z = (lambda >= 0.0)
                       ? detail::gig_standard_two_param(lambda, omega, rng)
                       : 1.0 / detail::gig_standard_two_param(-lambda, omega, rng);
  return z * std::sqrt(chi / psi);
}

/// Vector of independent standard normals.
template <typename Scalar = double>
VectorX<Scalar> sample_normal_vector(Index n, RngStream& rng) {
  VectorX<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(rng.normal());
  return v;
}

}  // namespace rtgibbs

#endif
