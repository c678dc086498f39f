#include "cutplay/geometry.hpp"

#include "cutplay/solvers.hpp"

namespace cutplay {

std::string to_string(CutKind k) {
  switch (k) {
    case CutKind::ValueCut: return "value-cut";
    case CutKind::EsoCut: return "eso-cut";
    case CutKind::CoverCut: return "cover-cut";
    case CutKind::Disjunctive: return "disjunctive";
  }
  return "unknown";
}

Polyhedron::Polyhedron(Index num_vars, Matrix a, Vector b, bool nonneg,
                       std::optional<AuxRange> aux)
    : num_vars_(num_vars), a_(std::move(a)), b_(std::move(b)), nonneg_(nonneg), aux_(aux) {
  if (a_.size() == 0) a_.resize(0, num_vars_);
  if (a_.cols() != num_vars_ || a_.rows() != b_.size())
    throw std::invalid_argument("Polyhedron: inconsistent row dimensions");
  for (Index i = 0; i < a_.rows(); ++i) {
    if (a_.row(i).lpNorm<1>() == 0 && b_(i) < 0)
      throw std::invalid_argument("Polyhedron: contradictory row 0.x <= b, b < 0; use Polyhedron::empty");
  }
  if (aux_ && (aux_->begin < 0 || aux_->end > num_vars_ || aux_->begin > aux_->end))
    throw std::invalid_argument("Polyhedron: aux_range out of bounds");
}

Polyhedron Polyhedron::empty(Index num_vars, Vector farkas_witness) {
  Polyhedron p;
  p.num_vars_ = num_vars;
  p.a_.resize(0, num_vars);
  p.b_.resize(0);
  p.empty_ = true;
  p.farkas_witness_ = std::move(farkas_witness);
  return p;
}

Polyhedron Polyhedron::box(const Vector& lb, const Vector& ub) {
  const Index d = lb.size();
  std::vector<std::pair<Vector, Scalar>> rows;
  bool nonneg = true;
  for (Index j = 0; j < d; ++j)
    if (lb(j) < 0 || !std::isfinite(lb(j))) nonneg = false;
  for (Index j = 0; j < d; ++j) {
    if (std::isfinite(ub(j))) {
      Vector r = Vector::Zero(d);
      r(j) = 1;
      rows.emplace_back(r, ub(j));
    }
    // lb rows only needed where the nonneg convention does not already cover them
    if (std::isfinite(lb(j)) && (lb(j) != 0 || !nonneg)) {
      Vector r = Vector::Zero(d);
      r(j) = -1;
      rows.emplace_back(r, -lb(j));
    }
  }
  Matrix a(static_cast<Index>(rows.size()), d);
  Vector b(static_cast<Index>(rows.size()));
  for (Index i = 0; i < a.rows(); ++i) {
    a.row(i) = rows[static_cast<size_t>(i)].first;
    b(i) = rows[static_cast<size_t>(i)].second;
  }
  return Polyhedron(d, std::move(a), std::move(b), nonneg);
}

Polyhedron add_cut(const Polyhedron& p, const Cut& c) {
  if (p.is_empty_flagged()) throw std::invalid_argument("add_cut: polyhedron is empty");
  Vector pi = c.pi;
  if (pi.size() == p.original_dim() && pi.size() < p.num_vars()) {
    Vector padded = Vector::Zero(p.num_vars());
    padded.head(pi.size()) = pi;
    pi = padded;
  }
  if (pi.size() != p.num_vars()) throw std::invalid_argument("add_cut: dimension mismatch");
  Matrix a(p.num_rows() + 1, p.num_vars());
  a.topRows(p.num_rows()) = p.a();
  a.row(p.num_rows()) = pi.transpose();
  Vector b(p.num_rows() + 1);
  b.head(p.num_rows()) = p.b();
  b(p.num_rows()) = c.pi0;
  return Polyhedron(p.num_vars(), std::move(a), std::move(b), p.nonneg(), p.aux_range());
}

Polyhedron balas_union(const Polyhedron& y, const Polyhedron& z) {
  if (y.num_vars() != z.num_vars() || y.nonneg() != z.nonneg())
    throw std::invalid_argument("balas_union: operands must share num_vars and nonneg convention");
  if (y.is_empty_flagged() || z.is_empty_flagged())
    throw std::invalid_argument("balas_union: operands must be nonempty");
  if (!y.nonneg())
    throw std::invalid_argument("balas_union: requires the x >= 0 convention");

  const Index d = y.num_vars();
  const Index my = y.num_rows();
  const Index mz = z.num_rows();
  const Index n = 3 * d + 1;  // x, y1, y2, lambda
  const Index x0 = 0, y1 = d, y2 = 2 * d, lam = 3 * d;

  // Row layout: x - y1 - y2 = 0 (two rows per coordinate),
  // A_Y y1 - lambda b_Y <= 0, A_Z y2 + lambda b_Z <= b_Z, lambda <= 1.
  const Index rows = 2 * d + my + mz + 1;
  Matrix a = Matrix::Zero(rows, n);
  Vector b = Vector::Zero(rows);
  Index r = 0;
  for (Index j = 0; j < d; ++j) {
    a(r, x0 + j) = 1;
    a(r, y1 + j) = -1;
    a(r, y2 + j) = -1;
    b(r++) = 0;
    a(r, x0 + j) = -1;
    a(r, y1 + j) = 1;
    a(r, y2 + j) = 1;
    b(r++) = 0;
  }
  for (Index i = 0; i < my; ++i) {
    a.row(r).segment(y1, d) = y.a().row(i);
    a(r, lam) = -y.b()(i);
    b(r++) = 0;
  }
  for (Index i = 0; i < mz; ++i) {
    a.row(r).segment(y2, d) = z.a().row(i);
    a(r, lam) = z.b()(i);
    b(r++) = z.b()(i);
  }
  a(r, lam) = 1;
  b(r) = 1;
  return Polyhedron(n, std::move(a), std::move(b), true, AuxRange{d, n});
}

bool contains(const Polyhedron& p, const Vector& x, Scalar tol) {
  if (p.is_empty_flagged()) return false;
  if (x.size() == p.num_vars()) {
    if (p.nonneg() && x.minCoeff() < -tol) return false;
    if (p.num_rows() > 0 && ((p.a() * x - p.b()).maxCoeff() > tol)) return false;
    return true;
  }
  if (!p.aux_range() || x.size() != p.original_dim())
    throw std::invalid_argument("contains: point has wrong dimension");
  // Feasibility LP over the auxiliary block with the original coordinates fixed.
  const Index d = p.original_dim();
  const Index naux = p.num_vars() - d;
  LinearProgram lp = LinearProgram::minimize(Vector::Zero(naux));
  lp.lb = Vector::Zero(naux);
  if (!p.nonneg()) lp.lb.setConstant(-kInf);
  lp.ub = Vector::Constant(naux, kInf);
  for (Index i = 0; i < p.num_rows(); ++i) {
    const Scalar rhs = p.b()(i) - p.a().row(i).head(d).dot(x);
    lp.add_row(p.a().row(i).tail(naux), RowSense::LE, rhs + tol);
  }
  if (p.nonneg() && x.minCoeff() < -tol) return false;
  return solve_lp(lp).status == LpStatus::Optimal;
}

}  // namespace cutplay
