#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "cutplay/solvers.hpp"

namespace cutplay {

namespace {

bool integral_on(const Vector& x, const IndexSet& int_idx, Scalar int_tol) {
  for (Index j : int_idx)
    if (std::abs(x(j) - std::round(x(j))) > int_tol) return false;
  return true;
}

Index most_fractional(const Vector& x, const IndexSet& int_idx, Scalar int_tol) {
  Index best = -1;
  Scalar best_frac = int_tol;
  for (Index j : int_idx) {
    const Scalar frac = std::abs(x(j) - std::round(x(j)));
    if (frac > best_frac) {
      best_frac = frac;
      best = j;
    }
  }
  return best;
}

void record_pool(std::vector<Vector>* pool, int cap, const Vector& x) {
  if (!pool || static_cast<int>(pool->size()) >= cap) return;
  for (const Vector& p : *pool)
    if (approx_equal(p, x)) return;
  pool->push_back(x);
}

}  // namespace

LpOutcome solve_milp(const LinearProgram& lp, const IndexSet& int_idx, Scalar tol) {
  MilpOptions opt;
  opt.tol = tol;
  return solve_milp(lp, int_idx, opt);
}

LpOutcome solve_milp(const LinearProgram& lp, const IndexSet& int_idx, const MilpOptions& opt) {
  lp.validate();
  if (int_idx.empty()) return solve_lp(lp, opt.tol);
  for (Index j : int_idx)
    if (!std::isfinite(lp.lb(j)) || !std::isfinite(lp.ub(j)))
      throw std::invalid_argument("solve_milp: integer variables need finite bounds");

  const int sgn = (lp.sense == Sense::Max) ? -1 : 1;  // compare in min form

  struct Node {
    Vector lb, ub;
  };
  // Depth-first with a deterministic order: floor branch pushed last, so it
  // is explored first.
  std::deque<Node> stack;
  stack.push_back({lp.lb, lp.ub});

  LpOutcome incumbent;
  incumbent.status = LpStatus::Infeasible;
  Scalar incumbent_val = kInf;  // in min form
  bool any_unbounded = false;
  LpOutcome root_info;
  bool root = true;
  long nodes = 0;

  while (!stack.empty()) {
    if (++nodes > opt.node_limit) {
      LpOutcome out;
      out.status = LpStatus::NumericFailure;
      return out;
    }
    Node node = stack.back();
    stack.pop_back();

    LinearProgram sub = lp;
    sub.lb = node.lb;
    sub.ub = node.ub;
    bool bounds_ok = true;
    for (Index j = 0; j < sub.num_vars(); ++j)
      if (sub.lb(j) > sub.ub(j)) bounds_ok = false;
    if (!bounds_ok) continue;

    LpOutcome rel = solve_lp(sub, opt.tol);
    if (root) {
      root_info = rel;
      root = false;
    }
    if (rel.status == LpStatus::NumericFailure) return rel;
    if (rel.status == LpStatus::Infeasible) continue;
    if (rel.status == LpStatus::Unbounded) {
      // With integer variables boxed, unboundedness comes from the continuous
      // part and survives any branching.
      any_unbounded = true;
      incumbent = rel;
      break;
    }
    const Scalar bound = sgn * rel.value;
    if (bound >= incumbent_val - opt.tol * (1 + std::abs(incumbent_val))) continue;

    if (integral_on(rel.x, int_idx, opt.int_tol)) {
      Vector xr = rel.x;
      for (Index j : int_idx) xr(j) = std::round(xr(j));
      record_pool(opt.pool, opt.pool_cap, xr);
      incumbent = rel;
      incumbent.x = xr;
      incumbent_val = bound;
      continue;
    }
    const Index j = most_fractional(rel.x, int_idx, opt.int_tol);
    const Scalar v = rel.x(j);
    Node up = node, down = node;
    down.ub(j) = std::floor(v);
    up.lb(j) = std::ceil(v);
    stack.push_back(up);
    stack.push_back(down);
  }

  if (any_unbounded) return incumbent;
  if (incumbent.status == LpStatus::Optimal) return incumbent;
  // No integer-feasible point. Reuse the root certificate when the relaxation
  // itself was infeasible; otherwise report plain infeasibility.
  LpOutcome out;
  out.status = LpStatus::Infeasible;
  if (root_info.status == LpStatus::Infeasible) out.farkas = root_info.farkas;
  return out;
}

}  // namespace cutplay
