#include <algorithm>
#include <cmath>
#include <chrono>
#include <functional>
#include <random>
#include <stdexcept>

#include "cutplay/solvers.hpp"

namespace cutplay {

Scalar lcp_residual(const LcpProblem& p, const Vector& z) {
  const Vector w = p.q + p.m * z;
  Scalar res = 0;
  for (Index i = 0; i < p.dim(); ++i) {
    res = std::max(res, -std::min(z(i), Scalar(0)));
    res = std::max(res, -std::min(w(i), Scalar(0)));
    res = std::max(res, std::abs(std::min(z(i), w(i))));
  }
  return res;
}

namespace {

// Lexicographic comparison of two ratio rows (q entry followed by the
// B-inverse block), both already divided by the pivot element.
bool lex_less(const Vector& a, const Vector& b, Scalar tol) {
  for (Index k = 0; k < a.size(); ++k) {
    if (a(k) < b(k) - tol) return true;
    if (a(k) > b(k) + tol) return false;
  }
  return false;
}

}  // namespace

LcpOutcome solve_lcp_lemke(const LcpProblem& p, Scalar tol) {
  const Index n = p.dim();
  if (p.m.rows() != n || p.m.cols() != n) throw std::invalid_argument("LCP: M must be square");
  if (!p.m.allFinite() || !p.q.allFinite()) throw std::invalid_argument("LCP: non-finite entries");
  LcpOutcome out;
  if (n == 0) {
    out.status = LcpStatus::Solved;
    out.z = Vector(0);
    return out;
  }
  if (p.q.minCoeff() >= -tol) {
    out.status = LcpStatus::Solved;
    out.z = Vector::Zero(n);
    return out;
  }

  // Columns: [w_0..w_{n-1} | z_0..z_{n-1} | z0 | q]. The w block doubles as
  // the basis inverse for the lexicographic ratio test.
  const Index col_z0 = 2 * n;
  const Index col_q = 2 * n + 1;
  Matrix t(n, 2 * n + 2);
  t.leftCols(n) = Matrix::Identity(n, n);
  t.middleCols(n, n) = -p.m;
  t.col(col_z0) = -Vector::Ones(n);
  t.col(col_q) = p.q;
  std::vector<Index> basis(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) basis[static_cast<size_t>(i)] = i;  // w_i

  auto pivot = [&](Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index i = 0; i < n; ++i) {
      if (i == row) continue;
      t.row(i) -= t(i, col) * t.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  };
  auto complement = [&](Index var) -> Index { return var < n ? var + n : var - n; };

  // Initial pivot: z0 enters, the row with the most negative q leaves.
  Index row0 = 0;
  for (Index i = 1; i < n; ++i)
    if (t(i, col_q) < t(row0, col_q)) row0 = i;
  Index leaving = basis[static_cast<size_t>(row0)];
  pivot(row0, col_z0);
  Index entering = complement(leaving);

  const long max_iter = 1000 + 50 * static_cast<long>(n);
  for (long iter = 0; iter < max_iter; ++iter) {
    // Lexicographic minimum ratio over rows with positive pivot entry.
    Index lr = -1;
    Vector best;
    for (Index i = 0; i < n; ++i) {
      const Scalar di = t(i, entering);
      if (di <= tol) continue;
      Vector cand(1 + n);
      cand(0) = t(i, col_q) / di;
      cand.tail(n) = t.row(i).head(n) / di;
      if (lr < 0 || lex_less(cand, best, 1e-12)) {
        lr = i;
        best = cand;
      }
    }
    if (lr < 0) {
      out.status = LcpStatus::RayTermination;
      return out;
    }
    leaving = basis[static_cast<size_t>(lr)];
    pivot(lr, entering);
    if (leaving == col_z0) {
      Vector z = Vector::Zero(n);
      for (Index i = 0; i < n; ++i) {
        const Index bi = basis[static_cast<size_t>(i)];
        if (bi >= n && bi < 2 * n) z(bi - n) = std::max(t(i, col_q), 0.0);
      }
      out.z = z;
      out.status = lcp_residual(p, z) <= 1e-6 * (1 + p.q.lpNorm<Eigen::Infinity>())
                       ? LcpStatus::Solved
                       : LcpStatus::NumericFailure;
      return out;
    }
    entering = complement(leaving);
  }
  out.status = LcpStatus::NumericFailure;
  return out;
}

LcpOutcome solve_lcp_lemke_perturbed(const LcpProblem& p, int trials, Scalar tol) {
  const Index n = p.dim();
  LcpOutcome out;
  std::mt19937 rng(0x5eed);
  std::uniform_real_distribution<Scalar> unif(0.5, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    LcpProblem r = p;
    for (Index i = 0; i < n; ++i) r.q(i) += 1e-6 * unif(rng) * (1 + std::abs(p.q(i)));
    const LcpOutcome o = solve_lcp_lemke(r, tol);
    if (o.status != LcpStatus::Solved) continue;
    // The perturbed solution is only approximate for the original data, but
    // its complementarity pattern transfers: fix the zero side of each pair
    // and recover an exact point from one feasibility LP.
    const Vector w = r.q + r.m * o.z;
    LinearProgram lp = LinearProgram::minimize(Vector::Zero(n));
    lp.lb = Vector::Zero(n);
    lp.ub = Vector::Constant(n, kInf);
    for (Index i = 0; i < n; ++i) {
      const bool w_zero = o.z(i) > w(i);
      lp.add_row(p.m.row(i), w_zero ? RowSense::EQ : RowSense::GE, -p.q(i));
      if (!w_zero) lp.ub(i) = 0;
    }
    const LpOutcome lo = solve_lp(lp, tol);
    if (lo.status == LpStatus::Optimal &&
        lcp_residual(p, lo.x) <= 1e-6 * (1 + p.q.lpNorm<Eigen::Infinity>())) {
      out.status = LcpStatus::Solved;
      out.z = lo.x;
      return out;
    }
  }
  out.status = LcpStatus::RayTermination;
  return out;
}

LcpEnumerateResult solve_lcp_enumerate(const LcpProblem& p, const std::optional<Vector>& select,
                                       Scalar tol, long node_budget, long max_solutions,
                                       double time_budget) {
  const Index n = p.dim();
  LcpEnumerateResult result;
  long nodes = 0;
  bool stop = false;
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    return std::isfinite(time_budget) &&
           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
               time_budget;
  };

  // Branch on which side of each complementary pair is forced to zero,
  // pruning by LP feasibility of the partially-assigned system.
  //   choice[i]: 0 undecided, 1 -> z_i = 0, 2 -> w_i = 0.
  std::vector<int> choice(static_cast<size_t>(n), 0);

  // Node LPs minimize a linear complementarity proxy: for each undecided pair
  // the side (z_i or w_i) that the parent's point had smaller. It is bounded
  // below on the feasible set and steers relaxation points toward solutions.
  auto build_lp = [&](bool leaf, const std::vector<bool>& zside) {
    Vector obj = Vector::Zero(n);
    if (leaf) {
      if (select) obj = *select;
    } else {
      for (Index i = 0; i < n; ++i) {
        if (choice[static_cast<size_t>(i)] != 0) continue;
        if (zside[static_cast<size_t>(i)]) obj(i) += 1;
        else obj += p.m.row(i).transpose();
      }
    }
    LinearProgram lp = LinearProgram::minimize(std::move(obj));
    lp.lb = Vector::Zero(n);
    lp.ub = Vector::Constant(n, kInf);
    for (Index i = 0; i < n; ++i) {
      const int ci = choice[static_cast<size_t>(i)];
      lp.add_row(p.m.row(i), ci == 2 ? RowSense::EQ : RowSense::GE, -p.q(i));
      if (ci == 1) lp.ub(i) = 0;
    }
    return lp;
  };

  auto record = [&](const Vector& z) {
    for (const auto& s : result.solutions)
      if (approx_equal(s.z, z, 1e-8)) return;
    LcpOutcome o;
    o.status = LcpStatus::Solved;
    o.z = z;
    result.solutions.push_back(std::move(o));
    if (max_solutions > 0 && static_cast<long>(result.solutions.size()) >= max_solutions)
      stop = true;
  };

  bool exhausted = false;
  std::function<void(Index, std::vector<bool>)> dfs = [&](Index depth, std::vector<bool> zside) {
    if (exhausted || stop) return;
    if (++nodes > node_budget || out_of_time()) {
      exhausted = true;
      result.complete = false;
      return;
    }
    const bool leaf = depth == n;
    LpOutcome rel = solve_lp(build_lp(leaf, zside), tol);
    if (rel.status == LpStatus::Infeasible) return;
    if (rel.status == LpStatus::NumericFailure) {
      result.complete = false;
      return;
    }
    // A relaxation point that is already complementary is a solution; taking
    // it here lets capped searches dive straight to an answer.
    if (rel.status == LpStatus::Optimal && lcp_residual(p, rel.x) <= 1e-8) record(rel.x);
    if (stop) return;
    if (leaf) {
      if (rel.status == LpStatus::Unbounded) {
        // Solution set of this pattern is unbounded; fall back to a feasible
        // point without the selection objective.
        auto save = choice;
        LinearProgram feas = build_lp(false, zside);
        LpOutcome fo = solve_lp(feas, tol);
        choice = save;
        if (fo.status == LpStatus::Optimal) record(fo.x);
        return;
      }
      record(rel.x);
      return;
    }
    // Branch on the undecided pair whose complementarity the relaxation point
    // violates most, diving first toward the side it nearly satisfies.
    Index pick = -1;
    Scalar worst = -kInf;
    Vector w;
    if (rel.status == LpStatus::Optimal) w = p.q + p.m * rel.x;
    for (Index i = 0; i < n; ++i) {
      if (choice[static_cast<size_t>(i)] != 0) continue;
      if (pick < 0) pick = i;
      if (w.size() == 0) break;
      zside[static_cast<size_t>(i)] = rel.x(i) <= w(i);
      const Scalar v = std::min(rel.x(i), w(i));
      if (v > worst) {
        worst = v;
        pick = i;
      }
    }
    int first = 1;
    if (w.size() > 0 && rel.x(pick) > w(pick)) first = 2;
    choice[static_cast<size_t>(pick)] = first;
    dfs(depth + 1, zside);
    choice[static_cast<size_t>(pick)] = 3 - first;
    dfs(depth + 1, std::move(zside));
    choice[static_cast<size_t>(pick)] = 0;
  };
  dfs(0, std::vector<bool>(static_cast<size_t>(n), true));
  if (stop) result.complete = false;  // stopped early: the tree was not exhausted

  if (select) {
    std::stable_sort(result.solutions.begin(), result.solutions.end(),
                     [&](const LcpOutcome& a, const LcpOutcome& b) {
                       return select->dot(a.z) < select->dot(b.z);
                     });
  }
  return result;
}

}  // namespace cutplay
