#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cutplay/baselines.hpp"
#include "cutplay/cnp.hpp"

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

// Flipping player 1 to minimize -xi*x makes its cost unbounded below for any
// opponent play, so no equilibrium exists.
Game duopoly_no_equilibrium() {
  Game g = duopoly_game();
  g.players[0].interaction = Matrix::Constant(1, 1, -1);
  return g;
}

// Coordination game: both players maximize x*xi over binary singletons. The
// pure equilibria are (0, 0) and (1, 1); only the latter maximizes welfare.
Game coordination_game() {
  Game g;
  g.sense = Sense::Max;
  Player p;
  p.c = vec({0});
  p.interaction = Matrix::Constant(1, 1, 1);
  p.feas = Polyhedron(1, Matrix(0, 1), Vector(0));
  p.lb = vec({0});
  p.ub = vec({1});
  p.int_idx = {0};
  g.players = {p, p};
  return g;
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

TEST_CASE("initial_approximation folds finite bounds into rows") {
  Game g = knapsack_pair(vec({1, 1}), vec({0, 0}), vec({2, 2}), 3, vec({1, 1}), vec({0, 0}),
                         vec({2, 2}), 3);
  ApproxState s = initial_approximation(g);
  REQUIRE(s.approx.size() == 2);
  // one knapsack row plus one upper-bound row per coordinate
  CHECK(s.approx[0].num_rows() == 3);
  CHECK(s.approx[0].nonneg());
  CHECK(contains(s.approx[0], vec({0.75, 0.75})));
  CHECK(!contains(s.approx[0], vec({1.0, 1.0})));
  CHECK(s.branched[0].empty());

  // a strictly positive lower bound contributes a -x <= -lb row
  Game d = duopoly_game();
  d.players[1].lb = vec({1});
  ApproxState sd = initial_approximation(d);
  CHECK(sd.approx[1].num_rows() == 3);
  CHECK(!contains(sd.approx[1], vec({0.5})));
}

TEST_CASE("build_pag_lcp lays out stationarity and feasibility blocks") {
  Game g = duopoly_game();
  ApproxState s = initial_approximation(g);
  LcpProblem lcp = build_pag_lcp(g, s);
  // variables: sigma1 (1), sigma2 (1), mu1 (1 row), mu2 (2 rows)
  REQUIRE(lcp.dim() == 5);
  CHECK(lcp.m(0, 1) == doctest::Approx(1.0));   // C^1 coupling
  CHECK(lcp.m(1, 0) == doctest::Approx(1.0));   // C^2 coupling
  CHECK(lcp.m(0, 2) == doctest::Approx(-1.0));  // A^1 transpose
  CHECK(lcp.m(2, 0) == doctest::Approx(1.0));   // -A^1
  CHECK(lcp.q(2) == doctest::Approx(-1.0));
  CHECK(lcp.q(3) == doctest::Approx(-1.0));
  CHECK(lcp.q(4) == doctest::Approx(2.0));

  // the unique solution is z = (1, 1, 1, 1, 0)
  Vector z(5);
  z << 1, 1, 1, 1, 0;
  CHECK(lcp_residual(lcp, z) <= 1e-12);
  LcpEnumerateResult en = solve_lcp_enumerate(lcp);
  REQUIRE(en.complete);
  REQUIRE(en.solutions.size() == 1);
  CHECK((en.solutions[0].z - z).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("build_pag_lcp negates payoffs for max-sense games") {
  Game g = coordination_game();
  ApproxState s = initial_approximation(g);
  LcpProblem lcp = build_pag_lcp(g, s);
  REQUIRE(lcp.dim() == 4);  // two sigmas, one bound row each
  CHECK(lcp.m(0, 1) == doctest::Approx(-1.0));
  CHECK(lcp.m(1, 0) == doctest::Approx(-1.0));
  CHECK(lcp.q(2) == doctest::Approx(1.0));
  LcpEnumerateResult en = solve_lcp_enumerate(lcp);
  REQUIRE(en.complete);
  // exactly the two pure coordination outcomes
  REQUIRE(en.solutions.size() == 2);
  for (const auto& sol : en.solutions) {
    CHECK(sol.z(0) == doctest::Approx(sol.z(1)).epsilon(1e-8));
    CHECK((std::abs(sol.z(0)) <= 1e-8 || std::abs(sol.z(0) - 1) <= 1e-8));
  }
}

TEST_CASE("solve_pag honors the objective mode") {
  Game g = coordination_game();
  ApproxState s = initial_approximation(g);
  CnpConfig cfg;
  PagOutcome f = solve_pag(g, s, cfg);
  REQUIRE(f.status == PagStatus::Solved);

  cfg.objective = ObjectiveMode::Welfare;
  PagOutcome q = solve_pag(g, s, cfg);
  REQUIRE(q.status == PagStatus::Solved);
  CHECK(q.sigma[0](0) == doctest::Approx(1.0));
  CHECK(q.sigma[1](0) == doctest::Approx(1.0));

  // the flipped duopoly has an unsolvable complementarity system
  Game bad = duopoly_no_equilibrium();
  ApproxState sb = initial_approximation(bad);
  CnpConfig cb;
  PagOutcome nb = solve_pag(bad, sb, cb);
  CHECK(nb.status == PagStatus::NoSolution);
}

TEST_CASE("cover_cut separates fractional knapsack points") {
  Game g = knapsack_pair(vec({1, 1}), vec({0, 0}), vec({3, 3}), 4, vec({1, 1}), vec({0, 0}),
                         vec({3, 3}), 4);
  const Player& p = g.players[0];
  auto c = cover_cut(p, vec({0.7, 0.7}), 3e-5);
  REQUIRE(c.has_value());
  CHECK(c->pi(0) == doctest::Approx(1.0));
  CHECK(c->pi(1) == doctest::Approx(1.0));
  CHECK(c->pi0 == doctest::Approx(1.0));
  CHECK(c->provenance == CutKind::CoverCut);
  // valid on every feasible pure strategy
  for (const Vector& x : enumerate_pure(p)) CHECK(c->pi.dot(x) <= c->pi0 + 1e-12);

  // integral points are never separated
  CHECK(!cover_cut(p, vec({1, 0}), 3e-5).has_value());
  // no cover exists when every item combination fits
  Game loose = knapsack_pair(vec({1, 1}), vec({0, 0}), vec({2, 2}), 4, vec({1, 1}), vec({0, 0}),
                             vec({2, 2}), 4);
  CHECK(!cover_cut(loose.players[0], vec({0.9, 0.9}), 3e-5).has_value());
  // continuous players are not eligible
  CHECK(!cover_cut(duopoly_game().players[0], vec({1.5}), 3e-5).has_value());
}

TEST_CASE("disjunctive_cut separates a point outside the union hull") {
  // Y: x1 = 0, x2 <= 1; Z: x1 in [1, 1.5], x1 + x2 <= 1.5 (both with x >= 0)
  Matrix ay(2, 2);
  ay << 1, 0, 0, 1;
  Polyhedron y(2, ay, vec({0, 1}));
  Matrix az(2, 2);
  az << -1, 0, 2, 2;
  Polyhedron z(2, az, vec({-1, 3}));
  auto c = disjunctive_cut(y, z, vec({0.75, 0.75}), 3e-5);
  REQUIRE(c.has_value());
  CHECK(c->provenance == CutKind::Disjunctive);
  for (const Vector& v : {vec({0, 0}), vec({0, 1}), vec({1, 0}), vec({1, 0.5}), vec({1.5, 0})})
    CHECK(c->pi.dot(v) <= c->pi0 + 1e-7);
  CHECK(c->pi.dot(vec({0.75, 0.75})) > c->pi0 + 1.5e-5);

  // points inside the hull admit no cut
  CHECK(!disjunctive_cut(y, z, vec({0.5, 0.5}), 3e-5).has_value());
  // an infeasible side degenerates to no cut
  Polyhedron empty_side(2, Matrix::Identity(2, 2), vec({-1, -1}));
  CHECK(!disjunctive_cut(y, empty_side, vec({0.75, 0.75}), 3e-5).has_value());
}

TEST_CASE("branch_or_cut refines by a Balas disjunction with a cut") {
  Game g = knapsack_pair(vec({1, 1}), vec({0, 0}), vec({2, 2}), 3, vec({1, 1}), vec({0, 0}),
                         vec({2, 2}), 3);
  ApproxState s = initial_approximation(g);
  CHECK(contains(s.approx[0], vec({0.75, 0.75})));

  CnpResult res;
  int cut_calls = 0;
  auto on_cut = [&](Index, const Cut& c, const Vector&) {
    ++cut_calls;
    CHECK(c.provenance == CutKind::Disjunctive);
    for (const Vector& x : enumerate_pure(g.players[0]))
      CHECK(c.pi.head(x.size()).dot(x) <= c.pi0 + 1e-7);
  };
  REQUIRE(branch_or_cut(g, s, 0, vec({0.75, 0.75}), 3e-5, &res, on_cut));
  CHECK(res.branchings == 1);
  CHECK(cut_calls == 1);
  CHECK(s.branched[0].count(0) == 1);
  // the fractional candidate is separated, integer hull vertices survive
  CHECK(!contains(s.approx[0], vec({0.75, 0.75})));
  CHECK(contains(s.approx[0], vec({0, 1})));
  CHECK(contains(s.approx[0], vec({1, 0})));
  CHECK(contains(s.approx[0], vec({1, 0.5})));

  // the remaining coordinate can still be branched, then nothing is left
  REQUIRE(branch_or_cut(g, s, 0, std::nullopt, 3e-5, &res));
  CHECK(!branch_or_cut(g, s, 0, std::nullopt, 3e-5, &res));
  // continuous players have no disjunction to apply
  Game d = duopoly_game();
  ApproxState sd = initial_approximation(d);
  CHECK(!branch_or_cut(d, sd, 0, std::nullopt, 3e-5, &res));
}

TEST_CASE("cut_and_play solves the duopoly fixture") {
  std::vector<IterationRecord> recs;
  CnpConfig cfg;
  cfg.on_iteration = [&](const IterationRecord& r) { recs.push_back(r); };
  CnpResult res = cut_and_play(duopoly_game(), cfg);
  REQUIRE(res.outcome == CnpOutcome::Equilibrium);
  REQUIRE(res.profile.size() == 2);
  CHECK(res.profile[0].mean()(0) == doctest::Approx(1.0));
  CHECK(res.profile[1].mean()(0) == doctest::Approx(1.0));
  CHECK(res.regrets.lpNorm<Eigen::Infinity>() <= 1e-7);
  CHECK(res.welfare == doctest::Approx(2.0));
  for (const auto& cert : res.certificates) {
    CHECK(cert.r.empty());
    CHECK(cert.alpha.sum() == doctest::Approx(1.0));
  }
  REQUIRE(!recs.empty());
  CHECK(recs.back().answers == std::vector<std::string>{"yes", "yes"});
}

TEST_CASE("cut_and_play certifies non-existence on the flipped duopoly") {
  CnpResult res = cut_and_play(duopoly_no_equilibrium());
  CHECK(res.outcome == CnpOutcome::NoEquilibrium);
  CHECK(res.profile.empty());
  REQUIRE(!res.log.empty());
}

TEST_CASE("welfare mode picks the payoff-dominant coordination equilibrium") {
  CnpConfig cfg;
  cfg.backend = LcpBackend::Enumerate;
  CnpResult f = cut_and_play(coordination_game(), cfg);
  REQUIRE(f.outcome == CnpOutcome::Equilibrium);

  cfg.objective = ObjectiveMode::Welfare;
  CnpResult q = cut_and_play(coordination_game(), cfg);
  REQUIRE(q.outcome == CnpOutcome::Equilibrium);
  CHECK(q.profile[0].mean()(0) == doctest::Approx(1.0));
  CHECK(q.profile[1].mean()(0) == doctest::Approx(1.0));
  CHECK(q.welfare == doctest::Approx(2.0));
  CHECK(q.welfare >= f.welfare - 1e-9);
}

TEST_CASE("a zero time limit reports TimeLimit") {
  CnpConfig cfg;
  cfg.time_limit = 0;
  CnpResult res = cut_and_play(duopoly_game(), cfg);
  CHECK(res.outcome == CnpOutcome::TimeLimit);
}

TEST_CASE("property: knapsack equilibria verify and cuts stay valid") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 8; ++trial) {
    Game g = random_knapsack(rng, 2 + static_cast<Index>(trial % 2));
    std::vector<std::vector<Vector>> cats;
    for (const Player& p : g.players) cats.push_back(enumerate_pure(p));

    CnpConfig cfg;
    cfg.cut_aggressiveness = trial % 3 - 1;  // rotate through -1, 0, 1
    long checked = 0;
    cfg.on_cut = [&](Index i, const Cut& c, const Vector&) {
      const auto& cat = cats[static_cast<size_t>(i)];
      if (c.pi.size() != cat[0].size()) return;  // lifted-space disjunction
      for (const Vector& x : cat) CHECK(c.pi.dot(x) <= c.pi0 + 1e-7);
      ++checked;
    };
    CnpResult res = cut_and_play(g, cfg);
    REQUIRE(res.outcome == CnpOutcome::Equilibrium);
    CHECK(res.regrets.lpNorm<Eigen::Infinity>() <= cfg.eps);
    RegretReport rr = verify_equilibrium(g, res.profile, cfg.eps);
    CHECK(rr.equilibrium);
    CHECK(res.cuts.total >= checked);
  }
}
