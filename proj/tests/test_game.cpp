#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cutplay/baselines.hpp"
#include "cutplay/game.hpp"

using namespace cutplay;

namespace {

Vector vec(std::initializer_list<Scalar> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (Scalar s : v) out(i++) = s;
  return out;
}

// Two continuous players: p1 minimizes xi*x over x >= 1, p2 minimizes x*xi
// over xi in [1, 2]. The unique equilibrium is (1, 1).
Game duopoly_game() {
  Game g;
  Player p1;
  p1.c = vec({0});
  p1.interaction = Matrix::Constant(1, 1, 1);
  p1.feas = Polyhedron(1, Matrix::Constant(1, 1, -1), vec({-1}));
  p1.lb = vec({0});
  p1.ub = vec({kInf});
  Player p2 = p1;
  Matrix a2(2, 1);
  a2 << -1, 1;
  p2.feas = Polyhedron(1, a2, vec({-1, 2}));
  g.players = {p1, p2};
  return g;
}

// Binary knapsack pair with diagonal interactions.
Game knapsack_pair(const Vector& c1, const Vector& d1, const Vector& w1, Scalar cap1,
                   const Vector& c2, const Vector& d2, const Vector& w2, Scalar cap2) {
  Game g;
  g.sense = Sense::Max;
  auto mk = [&](const Vector& c, const Vector& d, const Vector& w, Scalar cap) {
    Player p;
    const Index m = c.size();
    p.c = c;
    p.interaction = Matrix::Zero(m, m);
    p.interaction.diagonal() = d;
    Matrix a(1, m);
    a.row(0) = w;
    p.feas = Polyhedron(m, a, Vector::Constant(1, cap));
    p.lb = Vector::Zero(m);
    p.ub = Vector::Ones(m);
    for (Index j = 0; j < m; ++j) p.int_idx.push_back(j);
    return p;
  };
  g.players = {mk(c1, d1, w1, cap1), mk(c2, d2, w2, cap2)};
  return g;
}

Game random_knapsack(std::mt19937_64& rng, Index m) {
  auto rv = [&](long lo, long hi) {
    Vector v(m);
    for (Index j = 0; j < m; ++j)
      v(j) = static_cast<Scalar>(lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)));
    return v;
  };
  const Vector w1 = rv(1, 9), w2 = rv(1, 9);
  return knapsack_pair(rv(1, 9), rv(-4, 4), w1, std::floor(w1.sum() / 2), rv(1, 9), rv(-4, 4), w2,
                       std::floor(w2.sum() / 2));
}

}  // namespace

TEST_CASE("pure_payoff matches the bilinear form") {
  Game g = duopoly_game();
  CHECK(pure_payoff(g, 0, {vec({1}), vec({1})}) == doctest::Approx(1.0));
  CHECK(pure_payoff(g, 0, {vec({2}), vec({1.5})}) == doctest::Approx(3.0));

  Game k = knapsack_pair(vec({3, 2}), vec({1, 1}), vec({1, 1}), 2, vec({1, 1}), vec({0, 0}),
                         vec({1, 1}), 2);
  // max-form payoff 3 + 1 = 4; canonical-min cost is its negation
  CHECK(pure_payoff(k, 0, {vec({1, 0}), vec({1, 1})}) == doctest::Approx(-4.0));
  CHECK(k.cost_sign() * pure_payoff(k, 0, {vec({1, 0}), vec({1, 1})}) == doctest::Approx(4.0));
  // empty interaction contribution when the opponent plays zero
  CHECK(pure_payoff(k, 0, {vec({1, 0}), vec({0, 0})}) == doctest::Approx(-3.0));
}

TEST_CASE("expected_payoff at a pure profile equals pure_payoff") {
  Game g = duopoly_game();
  Profile p = {MixedStrategy::pure(vec({1})), MixedStrategy::pure(vec({1.5}))};
  CHECK(expected_payoff(g, 0, p) == doctest::Approx(1.5));
  CHECK(expected_payoff(g, 1, p) == doctest::Approx(1.5));
}

TEST_CASE("property: expected_payoff equals the product-support sum") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    Game g = random_knapsack(rng, 2);
    Profile prof;
    for (Index i = 0; i < 2; ++i) {
      auto cat = enumerate_pure(g.players[static_cast<size_t>(i)]);
      const size_t k = 2 + rng() % std::min<size_t>(cat.size(), 3);
      std::vector<Vector> pts(cat.begin(), cat.begin() + static_cast<long>(std::min(k, cat.size())));
      Vector pr(static_cast<Index>(pts.size()));
      for (Index t = 0; t < pr.size(); ++t) pr(t) = 1 + static_cast<Scalar>(rng() % 5);
      pr /= pr.sum();
      prof.emplace_back(pts, pr);
    }
    for (Index i = 0; i < 2; ++i) {
      Scalar brute = 0;
      const auto& a = prof[0];
      const auto& b = prof[1];
      for (Index s = 0; s < a.support_size(); ++s)
        for (Index t = 0; t < b.support_size(); ++t)
          brute += a.probs()(s) * b.probs()(t) *
                   pure_payoff(g, i, {a.points()[static_cast<size_t>(s)],
                                      b.points()[static_cast<size_t>(t)]});
      CHECK(expected_payoff(g, i, prof) == doctest::Approx(brute).epsilon(1e-9));
    }
  }
}

TEST_CASE("parametrized_cost stacks opponents and applies the sense") {
  Game g = duopoly_game();
  CHECK(parametrized_cost(g, 0, vec({1.5}))(0) == doctest::Approx(1.5));
  Game k = knapsack_pair(vec({3, 2}), vec({1, -2}), vec({1, 1}), 2, vec({1, 1}), vec({0, 0}),
                         vec({1, 1}), 2);
  // max sense negates: c + C^T opp = (3 + 1, 2 - 2) -> canonical (-4, 0)
  const Vector pc = parametrized_cost(k, 0, vec({1, 1}));
  CHECK(pc(0) == doctest::Approx(-4.0));
  CHECK(pc(1) == doctest::Approx(0.0));
  CHECK_THROWS(parametrized_cost(g, 0, vec({1, 2})));
}

TEST_CASE("best_response solves the parametrized problem") {
  Game g = duopoly_game();
  BestResponse br = best_response(g, 0, vec({1}));
  REQUIRE(br.status == LpStatus::Optimal);
  CHECK(br.x(0) == doctest::Approx(1.0));
  CHECK(br.value == doctest::Approx(1.0));

  // negative parametrized cost on an unbounded set
  Game neg = duopoly_game();
  neg.players[0].interaction = Matrix::Constant(1, 1, -1);
  CHECK(best_response(neg, 0, vec({1})).status == LpStatus::Unbounded);
}

TEST_CASE("best_response agrees with pure enumeration on knapsack players") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    Game g = random_knapsack(rng, 3);
    Vector opp(3);
    for (Index j = 0; j < 3; ++j) opp(j) = static_cast<Scalar>(rng() % 100) / 100.0;
    BestResponse br = best_response(g, 0, opp);
    REQUIRE(br.status == LpStatus::Optimal);
    const Vector pc = parametrized_cost(g, 0, opp);
    Scalar best = kInf;
    for (const Vector& x : enumerate_pure(g.players[0])) best = std::min(best, pc.dot(x));
    CHECK(br.value == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("verify_equilibrium on the duopoly fixture") {
  Game g = duopoly_game();
  Profile eq = {MixedStrategy::pure(vec({1})), MixedStrategy::pure(vec({1}))};
  RegretReport r = verify_equilibrium(g, eq, 1e-7);
  CHECK(r.equilibrium);
  CHECK(r.max_regret == doctest::Approx(0.0));

  Profile off = {MixedStrategy::pure(vec({2})), MixedStrategy::pure(vec({1}))};
  RegretReport r2 = verify_equilibrium(g, off, 1e-7);
  CHECK(!r2.equilibrium);
  CHECK(r2.regrets(0) == doctest::Approx(1.0));
  CHECK(r2.regrets(1) == doctest::Approx(0.0));

  // infeasible support points are rejected with a message
  Profile bad = {MixedStrategy::pure(vec({0.5})), MixedStrategy::pure(vec({1}))};
  RegretReport r3 = verify_equilibrium(g, bad, 1e-7);
  CHECK(!r3.supports_valid);
  CHECK(!r3.message.empty());
}

TEST_CASE("verify_equilibrium accepts a single-player optimum") {
  Game g;
  Player p;
  p.c = vec({1});
  p.interaction = Matrix::Zero(0, 1);
  p.feas = Polyhedron(1, Matrix::Constant(1, 1, 1), vec({2}));
  p.lb = vec({0});
  p.ub = vec({2});
  g.players = {p};
  Profile prof = {MixedStrategy::pure(vec({0}))};
  CHECK(verify_equilibrium(g, prof, 1e-9).equilibrium);
  CHECK(!verify_equilibrium(g, {MixedStrategy::pure(vec({2}))}, 1e-9).equilibrium);
}

TEST_CASE("property: regrets are nonnegative up to tolerance") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Game g = random_knapsack(rng, 2);
    Profile prof;
    for (Index i = 0; i < 2; ++i) {
      auto cat = enumerate_pure(g.players[static_cast<size_t>(i)]);
      prof.push_back(MixedStrategy::pure(cat[rng() % cat.size()]));
    }
    RegretReport r = verify_equilibrium(g, prof, 1e-7);
    for (Index i = 0; i < 2; ++i) CHECK(r.regrets(i) >= -1e-9);
  }
}

TEST_CASE("mixed strategy validation") {
  CHECK_THROWS(MixedStrategy({vec({1})}, vec({0.5})));
  CHECK_THROWS(MixedStrategy({vec({1}), vec({2})}, vec({1.0, 0.0})));
  MixedStrategy s({vec({0}), vec({1})}, vec({0.25, 0.75}));
  CHECK(s.mean()(0) == doctest::Approx(0.75));
}

TEST_CASE("social welfare is reported in the native sense") {
  Game k = knapsack_pair(vec({3, 2}), vec({1, 1}), vec({1, 1}), 2, vec({1, 1}), vec({1, 1}),
                         vec({1, 1}), 2);
  Profile p = {MixedStrategy::pure(vec({1, 0})), MixedStrategy::pure(vec({1, 1}))};
  // p1: 3 + 1 = 4 (max form); p2: 1 + 1 + 1 = 3
  CHECK(social_welfare(k, p) == doctest::Approx(7.0));
}
