#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cutplay/baselines.hpp"

using namespace cutplay;

namespace {

Vector vec(std::initializer_list<Scalar> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (Scalar s : v) out(i++) = s;
  return out;
}

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

// 2x2 normal form from native-sense payoff matrices (player 0 picks the row).
NormalForm bimatrix(Sense sense, const Matrix& p0, const Matrix& p1) {
  NormalForm nf;
  nf.sense = sense;
  nf.shape = {p0.rows(), p0.cols()};
  for (Index i = 0; i < 2; ++i) {
    std::vector<Vector> cat;
    for (Index k = 0; k < nf.shape[static_cast<size_t>(i)]; ++k)
      cat.push_back(Vector::Constant(1, static_cast<Scalar>(k)));
    nf.catalogs.push_back(cat);
  }
  nf.payoff.resize(2);
  for (Index i = 0; i < p0.rows(); ++i)
    for (Index j = 0; j < p0.cols(); ++j) {
      nf.payoff[0].push_back(p0(i, j));
      nf.payoff[1].push_back(p1(i, j));
    }
  return nf;
}

}  // namespace

TEST_CASE("enumerate_pure lists the feasible lattice lexicographically") {
  Game g = knapsack_pair(vec({1, 1}), vec({0, 0}), vec({2, 3}), 3, vec({1, 1}), vec({0, 0}),
                         vec({2, 3}), 3);
  auto cat = enumerate_pure(g.players[0]);
  REQUIRE(cat.size() == 3);  // (1,1) weighs 5 > 3
  CHECK(cat[0] == vec({0, 0}));
  CHECK(cat[1] == vec({0, 1}));
  CHECK(cat[2] == vec({1, 0}));

  Player wide = g.players[0];
  wide.c = Vector::Zero(14);
  wide.interaction = Matrix::Zero(14, 14);
  wide.feas = Polyhedron(14, Matrix(0, 14), Vector(0));
  wide.lb = Vector::Zero(14);
  wide.ub = Vector::Ones(14);
  wide.int_idx.clear();
  for (Index j = 0; j < 14; ++j) wide.int_idx.push_back(j);
  CHECK_THROWS(enumerate_pure(wide, 4096));  // 2^14 exceeds the cap

  Player cont = g.players[0];
  cont.int_idx = {0};
  CHECK_THROWS(enumerate_pure(cont));  // partial integrality is not enumerable

  Player unbounded = g.players[0];
  unbounded.ub = vec({kInf, 1});
  CHECK_THROWS(enumerate_pure(unbounded));
}

TEST_CASE("to_normal_form tabulates native-sense payoffs") {
  Game g = knapsack_pair(vec({3, 2}), vec({1, -2}), vec({1, 1}), 2, vec({1, 4}), vec({2, 0}),
                         vec({1, 1}), 1);
  NormalForm nf = to_normal_form(g);
  REQUIRE(nf.shape.size() == 2);
  CHECK(nf.shape[0] == 4);  // both items fit
  CHECK(nf.shape[1] == 3);  // capacity 1 forbids (1,1)
  for (Index i = 0; i < nf.shape[0]; ++i)
    for (Index j = 0; j < nf.shape[1]; ++j) {
      const Index cell = nf.joint({i, j});
      CHECK(cell == i * nf.shape[1] + j);
      const std::vector<Vector> pure = {nf.catalogs[0][static_cast<size_t>(i)],
                                        nf.catalogs[1][static_cast<size_t>(j)]};
      for (Index pl = 0; pl < 2; ++pl)
        CHECK(nf.payoff[static_cast<size_t>(pl)][static_cast<size_t>(cell)] ==
              doctest::Approx(g.cost_sign() * pure_payoff(g, pl, pure)));
    }
}

TEST_CASE("support enumeration finds the matching-pennies mixture") {
  Matrix p0(2, 2), p1(2, 2);
  p0 << 1, -1, -1, 1;
  p1 = -p0;
  NormalForm nf = bimatrix(Sense::Max, p0, p1);
  auto eqs = support_enumeration_2p(nf, 1e-9, /*max_count=*/4);
  REQUIRE(eqs.size() == 1);
  for (Index i = 0; i < 2; ++i) {
    CHECK(eqs[0].probs[static_cast<size_t>(i)](0) == doctest::Approx(0.5));
    CHECK(eqs[0].probs[static_cast<size_t>(i)](1) == doctest::Approx(0.5));
  }
}

TEST_CASE("support enumeration finds the dominant-strategy equilibrium") {
  // prisoner's dilemma in cost form: defect (index 1) dominates
  Matrix p0(2, 2), p1(2, 2);
  p0 << 1, 3, 0, 2;
  p1 << 1, 0, 3, 2;
  NormalForm nf = bimatrix(Sense::Min, p0, p1);
  auto eqs = support_enumeration_2p(nf, 1e-9, 4);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].probs[0](1) == doctest::Approx(1.0));
  CHECK(eqs[0].probs[1](1) == doctest::Approx(1.0));
}

TEST_CASE("support enumeration lists all coordination equilibria") {
  Matrix p(2, 2);
  p << 2, 0, 0, 1;
  NormalForm nf = bimatrix(Sense::Max, p, p);
  auto eqs = support_enumeration_2p(nf, 1e-9, 8);
  REQUIRE(eqs.size() == 3);  // two pure and one mixed
  int pure = 0, mixed = 0;
  for (const auto& e : eqs) {
    CHECK(e.probs[0].sum() == doctest::Approx(1.0));
    CHECK(e.probs[1].sum() == doctest::Approx(1.0));
    if (e.probs[0].maxCoeff() > 1 - 1e-9) {
      ++pure;
      CHECK(approx_equal(e.probs[0], e.probs[1], 1e-9));
    } else {
      ++mixed;
      // indifference puts weight 1/3 on the action worth 2
      CHECK(e.probs[0](0) == doctest::Approx(1.0 / 3));
    }
  }
  CHECK(pure == 2);
  CHECK(mixed == 1);
}

TEST_CASE("max_count truncates the enumeration early") {
  Matrix p(2, 2);
  p << 2, 0, 0, 1;
  NormalForm nf = bimatrix(Sense::Max, p, p);
  CHECK(support_enumeration_2p(nf, 1e-9, 1).size() == 1);
}

TEST_CASE("oracle_verify rejects infeasible support points") {
  Game g = knapsack_pair(vec({1, 1}), vec({0, 0}), vec({2, 2}), 3, vec({1, 1}), vec({0, 0}),
                         vec({2, 2}), 3);
  Profile bad = {MixedStrategy::pure(vec({1, 1})), MixedStrategy::pure(vec({0, 0}))};
  RegretReport r = oracle_verify(g, bad, 1e-7);
  CHECK(!r.supports_valid);
  CHECK(!r.equilibrium);
  CHECK(!r.message.empty());
}

TEST_CASE("property: oracle_verify agrees with verify_equilibrium") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 2 + static_cast<Index>(rng() % 2);
    auto rv = [&](long lo, long hi) {
      Vector v(m);
      for (Index j = 0; j < m; ++j)
        v(j) = static_cast<Scalar>(lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)));
      return v;
    };
    const Vector w1 = rv(1, 9), w2 = rv(1, 9);
    Game g = knapsack_pair(rv(1, 9), rv(-4, 4), w1, std::floor(w1.sum() / 2), rv(1, 9), rv(-4, 4),
                           w2, std::floor(w2.sum() / 2));
    Profile prof;
    for (Index i = 0; i < 2; ++i) {
      auto cat = enumerate_pure(g.players[static_cast<size_t>(i)]);
      if (rng() % 2 == 0 || cat.size() < 2) {
        prof.push_back(MixedStrategy::pure(cat[rng() % cat.size()]));
      } else {
        const size_t a = rng() % cat.size();
        size_t b = rng() % cat.size();
        if (b == a) b = (a + 1) % cat.size();
        prof.emplace_back(std::vector<Vector>{cat[a], cat[b]}, vec({0.25, 0.75}));
      }
    }
    RegretReport lhs = oracle_verify(g, prof, 1e-7);
    RegretReport rhs = verify_equilibrium(g, prof, 1e-7);
    CHECK(lhs.equilibrium == rhs.equilibrium);
    CHECK(lhs.supports_valid == rhs.supports_valid);
    CHECK((lhs.regrets - rhs.regrets).lpNorm<Eigen::Infinity>() <= 1e-7);
  }
}
