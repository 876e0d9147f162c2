#ifndef RTGIBBS_SIMULATION_HPP
#define RTGIBBS_SIMULATION_HPP

#include <Eigen/Cholesky>
#include <string>
#include <utility>
#include <vector>

#include "rtgibbs/distributions.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"
#include "rtgibbs/rng.hpp"

namespace rtgibbs {

enum class StructureKind { Tridiagonal, Hubs, CliquesPositive, CliquesNegative };

inline const char* structure_name(StructureKind k) {
  switch (k) {
    case StructureKind::Tridiagonal: return "tridiagonal";
    case StructureKind::Hubs: return "hubs";
    case StructureKind::CliquesPositive: return "cliques_positive";
    case StructureKind::CliquesNegative: return "cliques_negative";
  }
  return "?";
}

inline StructureKind parse_structure(const std::string& name) {
  if (name == "tridiagonal") return StructureKind::Tridiagonal;
  if (name == "hubs") return StructureKind::Hubs;
  if (name == "cliques_positive") return StructureKind::CliquesPositive;
  if (name == "cliques_negative") return StructureKind::CliquesNegative;
  throw config_error("unknown structure kind: " + name);
}

struct StructureSpec {
  StructureKind kind = StructureKind::Tridiagonal;
  Index p = 10;
  Index group_size = 10;
  Index clique_size = 3;
};

/// Ground-truth precision matrix for the simulation study. Unit diagonal;
/// tridiagonal puts 0.25 on |i-j| = 1, hubs puts 0.25 within contiguous
/// groups, the cliques kinds put -0.45 / 0.75 among the first clique_size
/// members of each group. The result is verified PD before return.
template <typename Scalar = double>
MatrixX<Scalar> make_structure(const StructureSpec& spec) {
  if (spec.p < 1) throw config_error("make_structure: p must be >= 1");
  MatrixX<Scalar> theta = MatrixX<Scalar>::Identity(spec.p, spec.p);
  switch (spec.kind) {
    case StructureKind::Tridiagonal:
      for (Index i = 0; i + 1 < spec.p; ++i) {
        theta(i, i + 1) = Scalar(0.25);
        theta(i + 1, i) = Scalar(0.25);
      }
      break;
    case StructureKind::Hubs:
    case StructureKind::CliquesPositive:
    case StructureKind::CliquesNegative: {
      if (spec.group_size < 1 || spec.p % spec.group_size != 0)
        throw config_error("make_structure: p = " + std::to_string(spec.p) +
                           " is not divisible by group size " + std::to_string(spec.group_size));
      if (spec.clique_size > spec.group_size)
        throw config_error("make_structure: clique size exceeds group size");
      const bool hubs = spec.kind == StructureKind::Hubs;
      const Scalar value = hubs                                        ? Scalar(0.25)
                           : spec.kind == StructureKind::CliquesPositive ? Scalar(-0.45)
                                                                         : Scalar(0.75);
      const Index members = hubs ? spec.group_size : spec.clique_size;
      for (Index g = 0; g < spec.p / spec.group_size; ++g) {
        const Index base = g * spec.group_size;
        for (Index a = 0; a < members; ++a)
          for (Index b = a + 1; b < members; ++b) {
            theta(base + a, base + b) = value;
            theta(base + b, base + a) = value;
          }
      }
      break;
    }
  }
  if (!cholesky_pd_check(theta))
    throw config_error("make_structure: requested structure is not positive definite");
  return theta;
}

/// n i.i.d. rows from N_p(0, theta0^-1): standard normal rows pushed through
/// the inverse transpose Cholesky factor of theta0.
template <typename Scalar>
MatrixX<Scalar> sample_mvn_data(const MatrixX<Scalar>& theta0, Index n, RngStream& rng) {
  require_square_symmetric(theta0, "sample_mvn_data");
  if (n < 1) throw std::invalid_argument("sample_mvn_data: need n >= 1");
  Eigen::LLT<MatrixX<Scalar>> llt(theta0);
  if (llt.info() != Eigen::Success)
    throw numeric_error("sample_mvn_data: theta0 is not positive definite");
  const Index p = theta0.rows();
  MatrixX<Scalar> zt(p, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) zt(j, i) = static_cast<Scalar>(rng.normal());
  llt.matrixU().solveInPlace(zt);  // rows of the result are L^-T z
  return zt.transpose();
}

/// The (n, p) grid used in the scaling study: n ~ 24 log p.
inline std::vector<std::pair<Index, Index>> paper_dimension_grid() {
  return {{110, 100}, {120, 150}, {127, 200}, {132, 250}, {137, 300}};
}

}  // namespace rtgibbs

#endif
