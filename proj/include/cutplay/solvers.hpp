#pragma once

#include <optional>
#include <vector>

#include "cutplay/types.hpp"

namespace cutplay {

enum class Sense { Min, Max };
enum class RowSense { LE, EQ, GE };

/// A dense linear program: optimize c.x subject to row constraints and
/// variable bounds (entries of lb/ub may be +-inf).
struct LinearProgram {
  Sense sense = Sense::Min;
  Vector c;
  Matrix a;  // num_rows x num_vars
  Vector b;
  std::vector<RowSense> row_sense;
  Vector lb, ub;

  Index num_vars() const { return c.size(); }
  Index num_rows() const { return a.rows(); }

  static LinearProgram minimize(Vector c);
  LinearProgram& add_row(const Vector& coeffs, RowSense sense, Scalar rhs);
  void validate() const;
};

enum class LpStatus { Optimal, Unbounded, Infeasible, NumericFailure };

struct LpOutcome {
  LpStatus status = LpStatus::NumericFailure;
  Vector x;        // primal point (Optimal)
  Scalar value = 0;
  Vector dual;     // one multiplier per row (Optimal); textbook sign convention:
                   // dual objective = dual.b (+ bound terms), so for Min a <= row
                   // has dual <= 0 and a >= row has dual >= 0 (flipped for Max).
  Vector ray;      // improving recession direction (Unbounded)
  Vector farkas;   // per-row multipliers certifying infeasibility (Infeasible);
                   // lambda_i * (a_i.x R_i b_i) aggregates, together with the
                   // variable bounds, to a contradiction.
};

/// Dense two-phase primal simplex with Bland anti-cycling. Deterministic.
LpOutcome solve_lp(const LinearProgram& lp, Scalar tol = 1e-9);

/// Lagrangian dual value at the reported multipliers (equals the primal value
/// at an optimal outcome); returns +-inf when the multipliers are dual-infeasible.
Scalar lp_dual_objective(const LinearProgram& lp, const Vector& dual);

/// Checks an infeasibility certificate against the program's rows and bounds.
bool lp_farkas_valid(const LinearProgram& lp, const Vector& farkas, Scalar tol = 1e-7);

/// Branch-and-bound on solve_lp. Integer variables must have finite bounds.
/// `pool`, when given, collects distinct integer-feasible points encountered
/// during the search (at most `pool_cap`).
struct MilpOptions {
  Scalar tol = 1e-9;
  Scalar int_tol = 1e-6;
  long node_limit = 200000;
  std::vector<Vector>* pool = nullptr;
  int pool_cap = 32;
};
LpOutcome solve_milp(const LinearProgram& lp, const IndexSet& int_idx, Scalar tol = 1e-9);
LpOutcome solve_milp(const LinearProgram& lp, const IndexSet& int_idx, const MilpOptions& opt);

/// 0 <= z  perp  (q + M z) >= 0.
struct LcpProblem {
  Matrix m;
  Vector q;
  Index dim() const { return q.size(); }
};

enum class LcpStatus { Solved, NoSolutionFound, RayTermination, NumericFailure };

struct LcpOutcome {
  LcpStatus status = LcpStatus::NoSolutionFound;
  Vector z;
};

/// Residual max_i |min(z_i, (q + M z)_i)| plus negative-part violations.
Scalar lcp_residual(const LcpProblem& p, const Vector& z);

/// Lemke complementary pivoting with a lexicographic ratio test. Ray
/// termination is reported as such, never as proven non-existence.
LcpOutcome solve_lcp_lemke(const LcpProblem& p, Scalar tol = 1e-9);

/// Lemke on deterministically perturbed copies of q, each success polished by
/// re-solving the revealed complementarity pattern on the exact data. Rescues
/// degenerate instances where the plain method ray-terminates.
LcpOutcome solve_lcp_lemke_perturbed(const LcpProblem& p, int trials = 8, Scalar tol = 1e-9);

/// Exhaustive complementarity branching with LP-feasibility pruning. Returns
/// every solution pattern found within the node budget; `select` optimizes a
/// linear function at each leaf and sorts the results by select.z (ascending).
/// A positive `max_solutions` stops the search early (reported as incomplete),
/// as does running past `time_budget` seconds.
struct LcpEnumerateResult {
  std::vector<LcpOutcome> solutions;
  bool complete = true;  // false when the node or time budget was exhausted
};
LcpEnumerateResult solve_lcp_enumerate(const LcpProblem& p,
                                       const std::optional<Vector>& select = std::nullopt,
                                       Scalar tol = 1e-9, long node_budget = 200000,
                                       long max_solutions = 0, double time_budget = kInf);

}  // namespace cutplay
