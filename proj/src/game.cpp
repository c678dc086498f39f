#include <cmath>
#include <stdexcept>

#include "cutplay/game.hpp"

namespace cutplay {

Index Game::opp_dim(Index i) const {
  Index d = 0;
  for (Index j = 0; j < num_players(); ++j)
    if (j != i) d += players[static_cast<size_t>(j)].dim();
  return d;
}

void Game::validate() const {
  if (players.empty()) throw std::invalid_argument("game: needs at least one player");
  for (Index i = 0; i < num_players(); ++i) {
    const Player& p = players[static_cast<size_t>(i)];
    const Index d = p.dim();
    if (d == 0) throw std::invalid_argument("game: player with no variables");
    if (p.interaction.rows() != opp_dim(i) || p.interaction.cols() != d)
      throw std::invalid_argument("game: interaction matrix shape mismatch");
    if (p.feas.num_vars() != d) throw std::invalid_argument("game: feasible-set dimension mismatch");
    if (p.lb.size() != d || p.ub.size() != d)
      throw std::invalid_argument("game: bound vector size mismatch");
    for (Index j : p.int_idx) {
      if (j < 0 || j >= d) throw std::invalid_argument("game: integer index out of range");
      if (!std::isfinite(p.lb(j)) || !std::isfinite(p.ub(j)))
        throw std::invalid_argument("game: integer coordinates need finite bounds");
    }
  }
}

MixedStrategy::MixedStrategy(std::vector<Vector> points, Vector probs)
    : points_(std::move(points)), probs_(std::move(probs)) {
  if (static_cast<Index>(points_.size()) != probs_.size())
    throw std::invalid_argument("mixed strategy: point/probability count mismatch");
  if (probs_.size() == 0) throw std::invalid_argument("mixed strategy: empty support");
  for (Index k = 0; k < probs_.size(); ++k) {
    if (!(probs_(k) > 0)) throw std::invalid_argument("mixed strategy: probabilities must be positive");
    if (points_[static_cast<size_t>(k)].size() != points_[0].size())
      throw std::invalid_argument("mixed strategy: inconsistent point dimensions");
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("mixed strategy: probabilities must sum to one");
}

MixedStrategy MixedStrategy::pure(Vector x) {
  return MixedStrategy({std::move(x)}, Vector::Ones(1));
}

Vector MixedStrategy::mean() const {
  Vector m = Vector::Zero(points_[0].size());
  for (Index k = 0; k < probs_.size(); ++k) m += probs_(k) * points_[static_cast<size_t>(k)];
  return m;
}

StrategySet strategy_set(const Player& p) { return {p.feas, p.int_idx, p.lb, p.ub}; }

LpOutcome optimize_over(const StrategySet& xs, const Vector& obj, Sense sense,
                        const MilpOptions& opt) {
  const Index d = xs.poly.num_vars();
  if (obj.size() != d) throw std::invalid_argument("optimize_over: objective dimension mismatch");
  LinearProgram lp = LinearProgram::minimize(obj);
  lp.sense = sense;
  lp.lb = xs.lb;
  lp.ub = xs.ub;
  if (xs.poly.nonneg())
    for (Index j = 0; j < d; ++j) lp.lb(j) = std::max(lp.lb(j), 0.0);
  for (Index i = 0; i < xs.poly.num_rows(); ++i)
    lp.add_row(xs.poly.a().row(i), RowSense::LE, xs.poly.b()(i));
  return solve_milp(lp, xs.int_idx, opt);
}

Vector stack_opponents(const Game& g, Index i, const std::vector<Vector>& pts) {
  Vector opp(g.opp_dim(i));
  Index at = 0;
  for (Index j = 0; j < g.num_players(); ++j) {
    if (j == i) continue;
    const Vector& xj = pts[static_cast<size_t>(j)];
    opp.segment(at, xj.size()) = xj;
    at += xj.size();
  }
  return opp;
}

Vector parametrized_cost(const Game& g, Index i, const Vector& opp_means) {
  const Player& p = g.players[static_cast<size_t>(i)];
  if (opp_means.size() != g.opp_dim(i))
    throw std::invalid_argument("parametrized_cost: opponent vector size mismatch");
  return g.cost_sign() * (p.c + p.interaction.transpose() * opp_means);
}

Scalar pure_payoff(const Game& g, Index i, const std::vector<Vector>& pure) {
  return parametrized_cost(g, i, stack_opponents(g, i, pure))
      .dot(pure[static_cast<size_t>(i)]);
}

Scalar expected_payoff(const Game& g, Index i, const Profile& p) {
  std::vector<Vector> means;
  means.reserve(p.size());
  for (const MixedStrategy& s : p) means.push_back(s.mean());
  return parametrized_cost(g, i, stack_opponents(g, i, means)).dot(means[static_cast<size_t>(i)]);
}

BestResponse best_response(const Game& g, Index i, const Vector& opp_means, Scalar tol) {
  const Player& p = g.players[static_cast<size_t>(i)];
  MilpOptions opt;
  opt.tol = tol;
  LpOutcome out = optimize_over(strategy_set(p), parametrized_cost(g, i, opp_means), Sense::Min, opt);
  BestResponse br;
  br.status = out.status;
  br.x = out.x;
  br.value = out.status == LpStatus::Optimal ? out.value
             : out.status == LpStatus::Unbounded ? -kInf
                                                 : 0;
  return br;
}

namespace {

bool support_point_valid(const Player& p, const Vector& x, Scalar tol, std::string* why) {
  if (x.size() != p.dim()) {
    *why = "support point dimension mismatch";
    return false;
  }
  for (Index j = 0; j < p.dim(); ++j) {
    if (x(j) < p.lb(j) - tol || x(j) > p.ub(j) + tol) {
      *why = "support point violates variable bounds";
      return false;
    }
  }
  for (Index j : p.int_idx) {
    if (std::abs(x(j) - std::round(x(j))) > tol) {
      *why = "support point violates integrality";
      return false;
    }
  }
  if (!contains(p.feas, x, tol)) {
    *why = "support point outside the feasible polyhedron";
    return false;
  }
  return true;
}

}  // namespace

RegretReport verify_equilibrium(const Game& g, const Profile& p, Scalar eps) {
  g.validate();
  RegretReport rep;
  const Index n = g.num_players();
  if (static_cast<Index>(p.size()) != n)
    throw std::invalid_argument("verify_equilibrium: profile size mismatch");
  rep.regrets = Vector::Zero(n);

  const Scalar feas_tol = 1e-6;
  for (Index i = 0; i < n; ++i) {
    const Player& pl = g.players[static_cast<size_t>(i)];
    std::string why;
    for (const Vector& x : p[static_cast<size_t>(i)].points()) {
      if (!support_point_valid(pl, x, feas_tol, &why)) {
        rep.supports_valid = false;
        rep.equilibrium = false;
        rep.message = "player " + std::to_string(i) + ": " + why;
        return rep;
      }
    }
  }

  std::vector<Vector> means;
  means.reserve(p.size());
  for (const MixedStrategy& s : p) means.push_back(s.mean());
  rep.equilibrium = true;
  for (Index i = 0; i < n; ++i) {
    const BestResponse br = best_response(g, i, stack_opponents(g, i, means));
    if (br.status == LpStatus::Unbounded) {
      rep.regrets(i) = kInf;
      rep.equilibrium = false;
      continue;
    }
    if (br.status != LpStatus::Optimal) {
      rep.message = "player " + std::to_string(i) + ": best response did not solve";
      rep.equilibrium = false;
      rep.regrets(i) = kInf;
      continue;
    }
    rep.regrets(i) = expected_payoff(g, i, p) - br.value;
    if (rep.regrets(i) > eps) rep.equilibrium = false;
  }
  rep.max_regret = rep.regrets.size() ? rep.regrets.maxCoeff() : 0;
  return rep;
}

Scalar social_welfare(const Game& g, const std::vector<Vector>& means) {
  Scalar sw = 0;
  for (Index i = 0; i < g.num_players(); ++i)
    sw += g.cost_sign() * parametrized_cost(g, i, stack_opponents(g, i, means))
              .dot(means[static_cast<size_t>(i)]);
  return sw;
}

Scalar social_welfare(const Game& g, const Profile& p) {
  std::vector<Vector> means;
  means.reserve(p.size());
  for (const MixedStrategy& s : p) means.push_back(s.mean());
  return social_welfare(g, means);
}

}  // namespace cutplay
