#ifndef RTGIBBS_CHAIN_HPP
#define RTGIBBS_CHAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/priors.hpp"

namespace rtgibbs {

struct ChainConfig {
  Index iterations = 1000;
  Index burnin = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Index thin = 1;  // keep every thin-th post-burnin draw
  bool store_traces = true;
  double time_limit_seconds = 0.0;  // 0 = unlimited

  void validate() const {
    if (iterations < 1) throw config_error("chain config: iterations must be >= 1");
    if (burnin < 0 || burnin >= iterations)
      throw config_error("chain config: burnin must satisfy 0 <= burnin < iterations");
    if (thin < 1) throw config_error("chain config: thin must be >= 1");
    if (time_limit_seconds < 0.0) throw config_error("chain config: time limit must be >= 0");
  }
};

template <typename Scalar>
struct ChainResult {
  std::vector<MatrixX<Scalar>> draws;      // post-burnin, thinned
  std::vector<Scalar> loglik_trace;        // one value per iteration (burn-in included)
  std::vector<double> per_iter_seconds;    // sampling-sweep wall time per iteration
  MatrixX<Scalar> final_theta;
  ShrinkageState<Scalar> final_state;
  bool timed_out = false;
  Index iterations_run = 0;
};

// Stored draws are PD by construction; check every draw in assert-enabled
// builds and a sampled subset in release builds.
#ifdef NDEBUG
inline constexpr Index kPdSpotCheckStride = 16;
#else
inline constexpr Index kPdSpotCheckStride = 1;
#endif

template <typename Scalar>
void spot_check_stored_draw(const MatrixX<Scalar>& theta, Index stored_index, const char* sampler) {
  if (stored_index % kPdSpotCheckStride != 0) return;
  if (!cholesky_pd_check(theta))
    throw numeric_error(std::string(sampler) + ": stored draw " + std::to_string(stored_index) +
                        " is not positive definite; this indicates a sampler bug");
}

}  // namespace rtgibbs

#endif
