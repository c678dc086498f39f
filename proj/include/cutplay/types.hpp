#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace cutplay {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

/// Default tolerances used across the solvers and the CNP loop.
struct Tolerances {
  Scalar pivot = 1e-9;
  Scalar feasibility = 1e-7;
};

inline bool approx_equal(const Vector& a, const Vector& b, Scalar tol = 1e-8) {
  if (a.size() != b.size()) return false;
  return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace cutplay
