#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cutplay/baselines.hpp"

namespace cutplay {

std::vector<Vector> enumerate_pure(const Player& p, long cap) {
  const Index d = p.dim();
  if (static_cast<Index>(p.int_idx.size()) != d)
    throw std::invalid_argument("enumerate_pure: player must be all-integer");
  long count = 1;
  std::vector<long> lo(static_cast<size_t>(d)), hi(static_cast<size_t>(d));
  for (Index j = 0; j < d; ++j) {
    if (!std::isfinite(p.lb(j)) || !std::isfinite(p.ub(j)))
      throw std::invalid_argument("enumerate_pure: unbounded integer variable");
    lo[static_cast<size_t>(j)] = static_cast<long>(std::ceil(p.lb(j) - 1e-9));
    hi[static_cast<size_t>(j)] = static_cast<long>(std::floor(p.ub(j) + 1e-9));
    if (hi[static_cast<size_t>(j)] < lo[static_cast<size_t>(j)]) return {};
    count *= hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)] + 1;
    if (count > cap) throw std::runtime_error("enumerate_pure: lattice exceeds the cap");
  }

  std::vector<Vector> out;
  std::vector<long> cur = lo;
  for (;;) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) x(j) = static_cast<Scalar>(cur[static_cast<size_t>(j)]);
    bool ok = !(p.feas.nonneg() && x.minCoeff() < 0);
    for (Index i = 0; ok && i < p.feas.num_rows(); ++i)
      if (p.feas.a().row(i).dot(x) > p.feas.b()(i) + 1e-9) ok = false;
    if (ok) out.push_back(x);
    // lexicographic increment, last coordinate fastest
    Index j = d - 1;
    while (j >= 0) {
      if (++cur[static_cast<size_t>(j)] <= hi[static_cast<size_t>(j)]) break;
      cur[static_cast<size_t>(j)] = lo[static_cast<size_t>(j)];
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

Index NormalForm::joint(const std::vector<Index>& idx) const {
  Index at = 0;
  for (size_t i = 0; i < shape.size(); ++i) at = at * shape[i] + idx[i];
  return at;
}

NormalForm to_normal_form(const Game& g, long cap) {
  g.validate();
  NormalForm nf;
  nf.sense = g.sense;
  long cells = 1;
  for (const Player& p : g.players) {
    nf.catalogs.push_back(enumerate_pure(p, cap));
    nf.shape.push_back(static_cast<Index>(nf.catalogs.back().size()));
    if (nf.shape.back() == 0) throw std::runtime_error("to_normal_form: a player has no feasible strategy");
    cells *= nf.shape.back();
    if (cells > cap) throw std::runtime_error("to_normal_form: joint strategy space exceeds the cap");
  }
  const Index n = g.num_players();
  nf.payoff.assign(static_cast<size_t>(n), std::vector<Scalar>(static_cast<size_t>(cells)));
  std::vector<Index> idx(static_cast<size_t>(n), 0);
  for (long cell = 0; cell < cells; ++cell) {
    std::vector<Vector> pure;
    for (Index i = 0; i < n; ++i)
      pure.push_back(nf.catalogs[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])]);
    for (Index i = 0; i < n; ++i)
      nf.payoff[static_cast<size_t>(i)][static_cast<size_t>(cell)] =
          g.cost_sign() * pure_payoff(g, i, pure);
    for (Index i = n - 1; i >= 0; --i) {
      if (++idx[static_cast<size_t>(i)] < nf.shape[static_cast<size_t>(i)]) break;
      idx[static_cast<size_t>(i)] = 0;
    }
  }
  return nf;
}

namespace {

// Mixed strategy over S_other making the supported rows indifferent and no
// row outside the support better, with the support probability floor
// maximized so zero-probability supports are rejected.
std::optional<std::pair<Vector, Scalar>> indifference_lp(const Matrix& cost,
                                                         const std::vector<Index>& rows,
                                                         const std::vector<Index>& cols) {
  const Index k = static_cast<Index>(cols.size());
  // vars: y (k), v (free), t (>= 0); maximize t
  Vector obj = Vector::Zero(k + 2);
  obj(k + 1) = 1;
  LinearProgram lp = LinearProgram::minimize(obj);
  lp.sense = Sense::Max;
  lp.lb(k) = -kInf;
  {
    Vector row = Vector::Zero(k + 2);
    row.head(k).setOnes();
    lp.add_row(row, RowSense::EQ, 1);
  }
  for (Index j = 0; j < k; ++j) {
    Vector row = Vector::Zero(k + 2);
    row(j) = 1;
    row(k + 1) = -1;
    lp.add_row(row, RowSense::GE, 0);  // y_j >= t
  }
  std::vector<bool> in_support(static_cast<size_t>(cost.rows()), false);
  for (Index i : rows) in_support[static_cast<size_t>(i)] = true;
  for (Index i = 0; i < cost.rows(); ++i) {
    Vector row = Vector::Zero(k + 2);
    for (Index j = 0; j < k; ++j) row(j) = cost(i, cols[static_cast<size_t>(j)]);
    row(k) = -1;
    lp.add_row(row, in_support[static_cast<size_t>(i)] ? RowSense::EQ : RowSense::GE, 0);
  }
  const LpOutcome out = solve_lp(lp);
  if (out.status != LpStatus::Optimal || out.x(k + 1) <= 1e-9) return std::nullopt;
  Vector y = out.x.head(k);
  y /= y.sum();
  return std::make_pair(y, out.x(k));
}

bool next_combination(std::vector<Index>& c, Index m) {
  const Index k = static_cast<Index>(c.size());
  Index i = k - 1;
  while (i >= 0 && c[static_cast<size_t>(i)] == m - k + i) --i;
  if (i < 0) return false;
  ++c[static_cast<size_t>(i)];
  for (Index j = i + 1; j < k; ++j) c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

std::vector<NfEquilibrium> support_enumeration_2p(const NormalForm& nf, Scalar eps,
                                                  int max_count, long pair_budget) {
  if (nf.shape.size() != 2) throw std::invalid_argument("support_enumeration_2p: needs two players");
  const Index s1 = nf.shape[0], s2 = nf.shape[1];
  const Scalar sgn = nf.sense == Sense::Max ? -1.0 : 1.0;
  Matrix a(s1, s2), b(s1, s2);  // min-form costs
  for (Index i = 0; i < s1; ++i)
    for (Index j = 0; j < s2; ++j) {
      a(i, j) = sgn * nf.payoff[0][static_cast<size_t>(i * s2 + j)];
      b(i, j) = sgn * nf.payoff[1][static_cast<size_t>(i * s2 + j)];
    }

  std::vector<NfEquilibrium> found;
  auto record = [&](const Vector& x, const Vector& y) {
    for (const NfEquilibrium& e : found)
      if (approx_equal(e.probs[0], x, 1e-7) && approx_equal(e.probs[1], y, 1e-7)) return;
    found.push_back({{x, y}});
  };

  // Pure profiles by direct comparison.
  for (Index i = 0; i < s1 && static_cast<int>(found.size()) < max_count; ++i)
    for (Index j = 0; j < s2; ++j) {
      if (a(i, j) > a.col(j).minCoeff() + eps) continue;
      if (b(i, j) > b.row(i).minCoeff() + eps) continue;
      Vector x = Vector::Zero(s1), y = Vector::Zero(s2);
      x(i) = 1;
      y(j) = 1;
      record(x, y);
      if (static_cast<int>(found.size()) >= max_count) break;
    }

  long budget = pair_budget;
  for (Index k = 2; k <= std::min(s1, s2) && static_cast<int>(found.size()) < max_count; ++k) {
    std::vector<Index> c1(static_cast<size_t>(k));
    for (Index i = 0; i < k; ++i) c1[static_cast<size_t>(i)] = i;
    do {
      std::vector<Index> c2(static_cast<size_t>(k));
      for (Index i = 0; i < k; ++i) c2[static_cast<size_t>(i)] = i;
      do {
        if (--budget < 0) return found;
        const auto y = indifference_lp(a, c1, c2);
        if (!y) continue;
        const auto x = indifference_lp(b.transpose(), c2, c1);
        if (!x) continue;
        Vector px = Vector::Zero(s1), py = Vector::Zero(s2);
        for (Index i = 0; i < k; ++i) {
          px(c1[static_cast<size_t>(i)]) = x->first(i);
          py(c2[static_cast<size_t>(i)]) = y->first(i);
        }
        record(px, py);
        if (static_cast<int>(found.size()) >= max_count) return found;
      } while (next_combination(c2, s2));
    } while (next_combination(c1, s1));
  }
  return found;
}

RegretReport oracle_verify(const Game& g, const Profile& p, Scalar eps, long cap) {
  g.validate();
  if (static_cast<Index>(p.size()) != g.num_players())
    throw std::invalid_argument("oracle_verify: profile size mismatch");
  const Index n = g.num_players();
  RegretReport rep;
  rep.regrets = Vector::Zero(n);

  std::vector<std::vector<Vector>> catalogs;
  for (const Player& pl : g.players) catalogs.push_back(enumerate_pure(pl, cap));

  for (Index i = 0; i < n; ++i) {
    for (const Vector& x : p[static_cast<size_t>(i)].points()) {
      bool listed = false;
      for (const Vector& c : catalogs[static_cast<size_t>(i)])
        if (approx_equal(c, x, 1e-6)) listed = true;
      if (!listed) {
        rep.supports_valid = false;
        rep.equilibrium = false;
        rep.message = "player " + std::to_string(i) + ": support point is not a feasible pure strategy";
        return rep;
      }
    }
  }

  std::vector<Vector> means;
  for (const MixedStrategy& s : p) means.push_back(s.mean());
  rep.equilibrium = true;
  for (Index i = 0; i < n; ++i) {
    const Vector ci = parametrized_cost(g, i, stack_opponents(g, i, means));
    Scalar best = kInf;
    for (const Vector& c : catalogs[static_cast<size_t>(i)]) best = std::min(best, ci.dot(c));
    rep.regrets(i) = ci.dot(means[static_cast<size_t>(i)]) - best;
    if (rep.regrets(i) > eps) rep.equilibrium = false;
  }
  rep.max_regret = rep.regrets.maxCoeff();
  return rep;
}

}  // namespace cutplay
