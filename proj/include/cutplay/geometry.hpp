#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "cutplay/types.hpp"

namespace cutplay {

/// Provenance tag carried by every cut appended to an approximation.
enum class CutKind { ValueCut, EsoCut, CoverCut, Disjunctive };

std::string to_string(CutKind k);

/// A valid inequality pi.x <= pi0.
struct Cut {
  Vector pi;
  Scalar pi0 = 0;
  CutKind provenance = CutKind::EsoCut;

  Cut() = default;
  Cut(Vector pi_, Scalar pi0_, CutKind prov) : pi(std::move(pi_)), pi0(pi0_), provenance(prov) {
    if (pi.lpNorm<1>() <= 0 || !pi.allFinite())
      throw std::invalid_argument("Cut: coefficient vector must be nonzero and finite");
  }
};

/// Half-open index range [begin, end) of auxiliary coordinates added by lifting.
struct AuxRange {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
};

/// A polyhedron in inequality form: { x : A x <= b } with an implied x >= 0
/// when `nonneg` is set. Immutable after construction; refinements return new
/// values. Detected infeasibility is an explicit flag with a Farkas witness,
/// never a contradictory 0.x <= b row.
class Polyhedron {
 public:
  Polyhedron() = default;
  Polyhedron(Index num_vars, Matrix a, Vector b, bool nonneg = true,
             std::optional<AuxRange> aux = std::nullopt);

  static Polyhedron empty(Index num_vars, Vector farkas_witness);
  /// Axis-aligned box [lb, ub]; infinite entries drop the corresponding row.
  static Polyhedron box(const Vector& lb, const Vector& ub);

  Index num_vars() const { return num_vars_; }
  Index num_rows() const { return a_.rows(); }
  /// Coordinates the payoff may reference (everything before aux_range).
  Index original_dim() const { return aux_ ? aux_->begin : num_vars_; }
  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  bool nonneg() const { return nonneg_; }
  const std::optional<AuxRange>& aux_range() const { return aux_; }
  bool is_empty_flagged() const { return empty_; }
  const Vector& farkas_witness() const { return farkas_witness_; }

 private:
  Index num_vars_ = 0;
  Matrix a_;   // num_rows x num_vars
  Vector b_;   // num_rows
  bool nonneg_ = true;
  std::optional<AuxRange> aux_;
  bool empty_ = false;
  Vector farkas_witness_;
};

/// Returns P with the cut appended as one extra row. Cuts living in the
/// original space are zero-padded over auxiliary coordinates.
Polyhedron add_cut(const Polyhedron& p, const Cut& c);

/// Balas' extended formulation of cl conv(Y u Z): variables (x, y1, y2, lambda)
/// with x = y1 + y2, A_Y y1 <= lambda b_Y, A_Z y2 <= (1 - lambda) b_Z and
/// 0 <= lambda <= 1. The aux_range marks (y1, y2, lambda).
Polyhedron balas_union(const Polyhedron& y, const Polyhedron& z);

/// Membership test. When `x` only covers the original coordinates of a lifted
/// polyhedron, feasibility of the auxiliary block is decided by an LP.
bool contains(const Polyhedron& p, const Vector& x, Scalar tol = 1e-9);

}  // namespace cutplay
