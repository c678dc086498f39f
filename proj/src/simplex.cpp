#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cutplay/solvers.hpp"

namespace cutplay {

LinearProgram LinearProgram::minimize(Vector c) {
  LinearProgram lp;
  lp.sense = Sense::Min;
  const Index n = c.size();
  lp.c = std::move(c);
  lp.a.resize(0, n);
  lp.b.resize(0);
  lp.lb = Vector::Zero(n);
  lp.ub = Vector::Constant(n, kInf);
  return lp;
}

LinearProgram& LinearProgram::add_row(const Vector& coeffs, RowSense sense, Scalar rhs) {
  if (coeffs.size() != num_vars()) throw std::invalid_argument("add_row: dimension mismatch");
  a.conservativeResize(a.rows() + 1, Eigen::NoChange);
  a.row(a.rows() - 1) = coeffs.transpose();
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
  row_sense.push_back(sense);
  return *this;
}

void LinearProgram::validate() const {
  if (a.cols() != num_vars() || a.rows() != b.size() ||
      static_cast<Index>(row_sense.size()) != a.rows() || lb.size() != num_vars() ||
      ub.size() != num_vars())
    throw std::invalid_argument("LinearProgram: inconsistent dimensions");
  for (Index j = 0; j < num_vars(); ++j)
    if (lb(j) > ub(j)) throw std::invalid_argument("LinearProgram: lower bound exceeds upper bound");
  if (!c.allFinite()) throw std::invalid_argument("LinearProgram: non-finite objective");
}

namespace {

enum class VarState { Basic, AtLb, AtUb };

// Bounded-variable two-phase simplex on the internal form
//   min c.x   s.t.  A x = b,  l <= x <= u   (l finite everywhere),
// built from the user program by appending one slack per inequality row and
// substituting/splitting variables so every lower bound is finite.
struct Standardized {
  Matrix a;            // m x n_total equalities (row-scaled)
  Vector b;            // m
  Vector c;            // phase-2 costs
  Vector l, u;         // variable bounds, l finite
  Vector row_scale;    // original rows were divided by this
  Index n_user = 0;    // user variable count
  Index n_struct = 0;  // structural columns (before slacks)
  Scalar obj_shift = 0;
  // per user variable: column, and how to map back
  struct Map {
    Index col;
    enum Kind { Direct, Negated, Split } kind;
    Scalar offset;  // x_user = offset + sign * x_col (+ ... for Split)
    Index col2;     // second column for Split
  };
  std::vector<Map> map;

  Vector user_point(const Vector& x) const {
    Vector out(n_user);
    for (Index j = 0; j < n_user; ++j) {
      const auto& mp = map[static_cast<size_t>(j)];
      switch (mp.kind) {
        case Map::Direct: out(j) = x(mp.col); break;
        case Map::Negated: out(j) = mp.offset - x(mp.col); break;
        case Map::Split: out(j) = x(mp.col) - x(mp.col2); break;
      }
    }
    return out;
  }
  Vector user_direction(const Vector& d) const {
    Vector out(n_user);
    for (Index j = 0; j < n_user; ++j) {
      const auto& mp = map[static_cast<size_t>(j)];
      switch (mp.kind) {
        case Map::Direct: out(j) = d(mp.col); break;
        case Map::Negated: out(j) = -d(mp.col); break;
        case Map::Split: out(j) = d(mp.col) - d(mp.col2); break;
      }
    }
    return out;
  }
};

Standardized standardize(const LinearProgram& lp) {
  Standardized s;
  const Index m = lp.num_rows();
  const Index n = lp.num_vars();
  s.n_user = n;

  Vector c_int = (lp.sense == Sense::Max) ? Vector(-lp.c) : lp.c;

  // Variable substitutions so that every column has a finite lower bound.
  Index cols = 0;
  s.map.resize(static_cast<size_t>(n));
  for (Index j = 0; j < n; ++j) {
    auto& mp = s.map[static_cast<size_t>(j)];
    if (std::isfinite(lp.lb(j))) {
      mp = {cols++, Standardized::Map::Direct, 0.0, -1};
    } else if (std::isfinite(lp.ub(j))) {
      mp = {cols++, Standardized::Map::Negated, lp.ub(j), -1};  // x = ub - x'
    } else {
      mp = {cols, Standardized::Map::Split, 0.0, cols + 1};  // x = p - q
      cols += 2;
    }
  }
  s.n_struct = cols;
  Index n_slack = 0;
  for (auto rs : lp.row_sense)
    if (rs != RowSense::EQ) ++n_slack;
  const Index total = cols + n_slack;

  s.a = Matrix::Zero(m, total);
  s.b = Vector::Zero(m);
  s.c = Vector::Zero(total);
  s.l = Vector::Zero(total);
  s.u = Vector::Constant(total, kInf);
  s.row_scale = Vector::Ones(m);

  for (Index j = 0; j < n; ++j) {
    const auto& mp = s.map[static_cast<size_t>(j)];
    switch (mp.kind) {
      case Standardized::Map::Direct:
        s.l(mp.col) = lp.lb(j);
        s.u(mp.col) = lp.ub(j);
        s.c(mp.col) = c_int(j);
        break;
      case Standardized::Map::Negated:
        s.l(mp.col) = 0;
        s.c(mp.col) = -c_int(j);
        s.obj_shift += c_int(j) * mp.offset;
        break;
      case Standardized::Map::Split:
        s.c(mp.col) = c_int(j);
        s.c(mp.col2) = -c_int(j);
        break;
    }
  }
  Index slack = cols;
  for (Index i = 0; i < m; ++i) {
    Scalar rhs = lp.b(i);
    for (Index j = 0; j < n; ++j) {
      const Scalar aij = lp.a(i, j);
      if (aij == 0) continue;
      const auto& mp = s.map[static_cast<size_t>(j)];
      switch (mp.kind) {
        case Standardized::Map::Direct: s.a(i, mp.col) += aij; break;
        case Standardized::Map::Negated:
          s.a(i, mp.col) -= aij;
          rhs -= aij * mp.offset;
          break;
        case Standardized::Map::Split:
          s.a(i, mp.col) += aij;
          s.a(i, mp.col2) -= aij;
          break;
      }
    }
    s.b(i) = rhs;
    if (lp.row_sense[static_cast<size_t>(i)] == RowSense::LE) s.a(i, slack++) = 1;
    else if (lp.row_sense[static_cast<size_t>(i)] == RowSense::GE) s.a(i, slack++) = -1;
    // Partial scaling: equilibrate each row by its largest coefficient.
    const Scalar scale = s.a.row(i).lpNorm<Eigen::Infinity>();
    if (scale > 1.0) {
      s.a.row(i) /= scale;
      s.b(i) /= scale;
      s.row_scale(i) = scale;
    }
  }
  return s;
}

struct SimplexState {
  const Standardized& s;
  Matrix binv;                  // m x m
  std::vector<Index> basis;     // m entries, column indices (>= n_total are artificials)
  std::vector<VarState> state;  // per non-artificial column
  Vector xn;                    // nonbasic values per column (l or u)
  Vector beta;                  // basic values
  Index n_total;
  Index m;
  Vector art_sign;              // artificial column = art_sign(i) * e_i

  explicit SimplexState(const Standardized& st) : s(st) {
    m = s.a.rows();
    n_total = s.a.cols();
    binv = Matrix::Identity(m, m);
    basis.resize(static_cast<size_t>(m));
    state.assign(static_cast<size_t>(n_total), VarState::AtLb);
    xn = s.l;
    Vector resid = s.b - s.a * xn;
    art_sign = Vector::Ones(m);
    beta = Vector(m);
    for (Index i = 0; i < m; ++i) {
      basis[static_cast<size_t>(i)] = n_total + i;
      if (resid(i) < 0) art_sign(i) = -1;
      beta(i) = std::abs(resid(i));
      binv.row(i) *= art_sign(i);
    }
  }

  bool is_artificial(Index col) const { return col >= n_total; }

  // Recompute basic values from the basis inverse; incremental updates drift
  // when the ratio test takes a long step past rows with near-zero direction.
  void refresh_beta() {
    Vector r = s.b;
    for (Index j = 0; j < n_total; ++j)
      if (state[static_cast<size_t>(j)] != VarState::Basic && xn(j) != 0) r -= s.a.col(j) * xn(j);
    beta = binv * r;
  }

  Vector column(Index col) const {
    if (is_artificial(col)) {
      Vector e = Vector::Zero(m);
      e(col - n_total) = art_sign(col - n_total);
      return binv * e;
    }
    return binv * s.a.col(col);
  }

  Scalar cost_of(Index col, const Vector& cost, bool phase1) const {
    if (is_artificial(col)) return phase1 ? 1.0 : 0.0;
    return phase1 ? 0.0 : cost(col);
  }

  Vector duals(const Vector& cost, bool phase1) const {
    Vector cb(m);
    for (Index i = 0; i < m; ++i) cb(i) = cost_of(basis[static_cast<size_t>(i)], cost, phase1);
    return binv.transpose() * cb;
  }
};

enum class PhaseResult { Optimal, Unbounded, IterLimit };

// Runs Bland-rule bounded simplex for one phase. `art_ub` caps artificial
// values (0 in phase 2). On Unbounded, fills ray info via out-params.
PhaseResult run_phase(SimplexState& st, bool phase1, Scalar tol,
                      Index* ray_col = nullptr, int* ray_dir = nullptr) {
  const Index m = st.m;
  const Index n = st.n_total;
  const long max_iter = 4000 + 60 * static_cast<long>(m + n);
  for (long iter = 0; iter < max_iter; ++iter) {
    st.refresh_beta();
    const Vector y = st.duals(st.s.c, phase1);
    // Entering: smallest eligible column index first (Bland). A column whose
    // ratio test only offers near-zero pivots is skipped in favor of the next
    // candidate; aborting outright would stall on degenerate bases.
    bool any_eligible = false;
    bool progressed = false;
    for (Index j = 0; j < n && !progressed; ++j) {
      if (st.state[static_cast<size_t>(j)] == VarState::Basic) continue;
      if (st.s.u(j) - st.s.l(j) < tol) continue;  // fixed variable
      const Scalar r = st.cost_of(j, st.s.c, phase1) - y.dot(st.s.a.col(j));
      int dir = 0;
      if (st.state[static_cast<size_t>(j)] == VarState::AtLb && r < -tol) dir = +1;
      else if (st.state[static_cast<size_t>(j)] == VarState::AtUb && r > tol) dir = -1;
      if (dir == 0) continue;
      any_eligible = true;
      const Index enter = j;

      const Vector d = st.column(enter);
      // Ratio test: tightest step; among near-ties prefer the largest pivot.
      Scalar theta = kInf;
      Index leave_row = -1;
      bool leave_at_ub = false;
      const Scalar range = st.s.u(enter) - st.s.l(enter);
      for (Index i = 0; i < m; ++i) {
        const Index bi = st.basis[static_cast<size_t>(i)];
        const Scalar di = dir * d(i);
        Scalar li = 0, ui = kInf;
        if (!st.is_artificial(bi)) {
          li = st.s.l(bi);
          ui = st.s.u(bi);
        } else if (!phase1) {
          ui = 0;  // artificials are pinned at zero in phase 2
        }
        Scalar step = kInf;
        bool at_ub = false;
        if (di > tol) {
          step = (st.beta(i) - li) / di;
        } else if (di < -tol && std::isfinite(ui)) {
          step = (ui - st.beta(i)) / (-di);
          at_ub = true;
        } else {
          continue;
        }
        step = std::max(step, 0.0);
        if (step < theta - tol ||
            (step < theta + tol && leave_row >= 0 &&
             std::abs(d(i)) > std::abs(d(leave_row)))) {
          theta = step;
          leave_row = i;
          leave_at_ub = at_ub;
        }
      }
      const bool flip_possible = std::isfinite(range);
      if (leave_row < 0 && !flip_possible) {
        if (ray_col) *ray_col = enter;
        if (ray_dir) *ray_dir = dir;
        return PhaseResult::Unbounded;
      }
      if (flip_possible && range < theta) {
        // Bound flip: the entering variable moves to its other bound.
        st.beta -= dir * range * d;
        st.xn(enter) = (dir > 0) ? st.s.u(enter) : st.s.l(enter);
        st.state[static_cast<size_t>(enter)] =
            (dir > 0) ? VarState::AtUb : VarState::AtLb;
        progressed = true;
        break;
      }
      if (std::abs(d(leave_row)) < tol) continue;  // try the next entering column
      // Pivot: basis[leave_row] leaves at one of its bounds, `enter` becomes basic.
      const Index leaving = st.basis[static_cast<size_t>(leave_row)];
      const Scalar enter_val =
          (dir > 0) ? st.xn(enter) + theta : st.xn(enter) - theta;
      st.beta -= dir * theta * d;
      if (!st.is_artificial(leaving)) {
        st.state[static_cast<size_t>(leaving)] =
            leave_at_ub ? VarState::AtUb : VarState::AtLb;
        st.xn(leaving) = leave_at_ub ? st.s.u(leaving) : st.s.l(leaving);
      }
      st.basis[static_cast<size_t>(leave_row)] = enter;
      st.state[static_cast<size_t>(enter)] = VarState::Basic;
      const Scalar piv = d(leave_row);
      st.binv.row(leave_row) /= piv;
      for (Index i = 0; i < m; ++i) {
        if (i == leave_row) continue;
        st.binv.row(i) -= d(i) * st.binv.row(leave_row);
      }
      st.beta(leave_row) = enter_val;
      progressed = true;
    }
    if (!any_eligible) return PhaseResult::Optimal;
    if (!progressed) return PhaseResult::IterLimit;  // numeric breakdown
  }
  return PhaseResult::IterLimit;
}

Vector current_point(const SimplexState& st) {
  Vector x = st.xn;
  for (Index i = 0; i < st.m; ++i) {
    const Index bi = st.basis[static_cast<size_t>(i)];
    if (!st.is_artificial(bi)) x(bi) = st.beta(i);
  }
  return x;
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp, Scalar tol) {
  lp.validate();
  LpOutcome out;
  const Scalar ftol = std::max(tol, 1e-9) * 100;  // feasibility tolerance

  if (lp.num_vars() == 0) {
    bool ok = true;
    for (Index i = 0; i < lp.num_rows(); ++i) {
      const Scalar v = lp.b(i);
      switch (lp.row_sense[static_cast<size_t>(i)]) {
        case RowSense::LE: ok &= v >= -ftol; break;
        case RowSense::GE: ok &= v <= ftol; break;
        case RowSense::EQ: ok &= std::abs(v) <= ftol; break;
      }
    }
    out.status = ok ? LpStatus::Optimal : LpStatus::Infeasible;
    out.x = Vector(0);
    out.value = 0;
    out.dual = Vector::Zero(lp.num_rows());
    out.farkas = Vector::Zero(lp.num_rows());
    return out;
  }

  Standardized s = standardize(lp);
  SimplexState st(s);

  PhaseResult pr = run_phase(st, /*phase1=*/true, tol);
  if (pr == PhaseResult::IterLimit) {
    out.status = LpStatus::NumericFailure;
    return out;
  }
  Scalar phase1_obj = 0;
  for (Index i = 0; i < st.m; ++i)
    if (st.is_artificial(st.basis[static_cast<size_t>(i)])) phase1_obj += st.beta(i);
  if (phase1_obj > ftol * (1 + s.b.lpNorm<Eigen::Infinity>())) {
    Vector yf = st.duals(s.c, /*phase1=*/true);
    // Undo the row scaling so the multipliers refer to the user's rows.
    out.farkas = Vector(lp.num_rows());
    for (Index i = 0; i < lp.num_rows(); ++i) out.farkas(i) = yf(i) / s.row_scale(i);
    // Only report infeasibility that the certificate actually proves.
    out.status = lp_farkas_valid(lp, out.farkas) ? LpStatus::Infeasible : LpStatus::NumericFailure;
    return out;
  }

  Index ray_col = -1;
  int ray_dir = 0;
  pr = run_phase(st, /*phase1=*/false, tol, &ray_col, &ray_dir);
  if (pr == PhaseResult::IterLimit) {
    out.status = LpStatus::NumericFailure;
    return out;
  }
  if (pr == PhaseResult::Unbounded) {
    out.status = LpStatus::Unbounded;
    Vector d = st.column(ray_col);
    Vector dx = Vector::Zero(st.n_total);
    dx(ray_col) = ray_dir;
    for (Index i = 0; i < st.m; ++i) {
      const Index bi = st.basis[static_cast<size_t>(i)];
      if (!st.is_artificial(bi)) dx(bi) = -ray_dir * d(i);
    }
    out.ray = s.user_direction(dx);
    if (lp.sense == Sense::Max) {
      // direction already improves the internal min form; user sense matches
    }
    return out;
  }

  Vector x_int = current_point(st);
  out.x = s.user_point(x_int);
  // Degenerate bases can let ignored near-zero ratio-test rows drift; never
  // report an infeasible point as Optimal.
  const Scalar fscale = lp.b.size() > 0 ? 1 + lp.b.cwiseAbs().maxCoeff() : 1;
  Scalar viol = 0;
  for (Index i = 0; i < lp.num_rows(); ++i) {
    const Scalar lhs = lp.a.row(i).dot(out.x);
    switch (lp.row_sense[static_cast<size_t>(i)]) {
      case RowSense::LE: viol = std::max(viol, lhs - lp.b(i)); break;
      case RowSense::GE: viol = std::max(viol, lp.b(i) - lhs); break;
      case RowSense::EQ: viol = std::max(viol, std::abs(lhs - lp.b(i))); break;
    }
  }
  for (Index j = 0; j < lp.num_vars(); ++j)
    viol = std::max({viol, lp.lb(j) - out.x(j), out.x(j) - lp.ub(j)});
  if (viol > ftol * fscale * 10) {
    out.status = LpStatus::NumericFailure;
    return out;
  }
  out.status = LpStatus::Optimal;
  const Scalar internal_value = s.c.dot(x_int) + s.obj_shift;
  out.value = (lp.sense == Sense::Max) ? -internal_value : internal_value;
  Vector y = st.duals(s.c, /*phase1=*/false);
  out.dual = Vector(lp.num_rows());
  for (Index i = 0; i < lp.num_rows(); ++i) {
    Scalar yi = y(i) / s.row_scale(i);
    out.dual(i) = (lp.sense == Sense::Max) ? -yi : yi;
  }
  return out;
}

Scalar lp_dual_objective(const LinearProgram& lp, const Vector& dual) {
  // Lagrangian dual value in the reported convention; +-inf marks dual
  // infeasibility at the given multipliers.
  const int sgn = (lp.sense == Sense::Max) ? -1 : 1;
  Vector y = sgn * dual;
  Vector c_int = sgn * lp.c;
  Vector rho = c_int - lp.a.transpose() * y;
  Scalar val = y.dot(lp.b);
  for (Index j = 0; j < lp.num_vars(); ++j) {
    if (std::abs(rho(j)) <= 1e-7) continue;
    const Scalar at = rho(j) > 0 ? lp.lb(j) : lp.ub(j);
    if (!std::isfinite(at)) return -kInf;
    val += rho(j) * at;
  }
  return sgn * val;
}

bool lp_farkas_valid(const LinearProgram& lp, const Vector& farkas, Scalar tol) {
  // sup over the bound box of (sum_i f_i a_i).x must fall strictly below
  // sum_i f_i b_i, with the row-sense sign conditions making slacks harmless.
  if (farkas.size() != lp.num_rows()) return false;
  for (Index i = 0; i < lp.num_rows(); ++i) {
    if (lp.row_sense[static_cast<size_t>(i)] == RowSense::LE && farkas(i) > tol) return false;
    if (lp.row_sense[static_cast<size_t>(i)] == RowSense::GE && farkas(i) < -tol) return false;
  }
  Vector rho = lp.a.transpose() * farkas;
  Scalar sup = 0;
  for (Index j = 0; j < lp.num_vars(); ++j) {
    if (std::abs(rho(j)) <= tol) continue;
    const Scalar at = rho(j) > 0 ? lp.ub(j) : lp.lb(j);
    if (!std::isfinite(at)) return false;
    sup += rho(j) * at;
  }
  return sup < farkas.dot(lp.b) - tol;
}

}  // namespace cutplay
