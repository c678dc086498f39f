#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cutplay/game.hpp"
#include "cutplay/oracle.hpp"

namespace cutplay {

/// Per-player outer approximations of cl conv(X^i) plus the branching record.
struct ApproxState {
  std::vector<Polyhedron> approx;
  std::vector<std::set<Index>> branched;  // integer coordinates already split
};

/// LP relaxation of every player's set, with variable bounds folded into rows.
ApproxState initial_approximation(const Game& g);

enum class ObjectiveMode { Feasibility, Welfare };
enum class LcpBackend { Lemke, Enumerate };
enum class CnpOutcome { Equilibrium, NoEquilibrium, TimeLimit, NumericFailure };

struct IterationRecord {
  int t = 0;
  std::string lcp;                          // backend outcome
  std::vector<std::string> answers;         // per-player oracle answer
  std::vector<std::pair<Index, std::string>> cuts;  // (player, cut kind)
  Scalar welfare = 0;
};

struct CnpConfig {
  Scalar eps = 3e-5;
  Scalar time_limit = 300.0;  // seconds
  ObjectiveMode objective = ObjectiveMode::Feasibility;
  int cut_aggressiveness = -1;  // -1 never, 0 replace unstable value cuts, 1 always
  LcpBackend backend = LcpBackend::Lemke;
  long lcp_node_budget = 200000;
  int max_iterations = 1000;
  std::function<void(const IterationRecord&)> on_iteration;
  std::function<void(Index, const Cut&, const Vector&)> on_cut;  // (player, cut, trigger)
};

struct CutStats {
  long total = 0, eso = 0, value = 0, cover = 0, disjunctive = 0;
};

struct CnpResult {
  CnpOutcome outcome = CnpOutcome::NumericFailure;
  Profile profile;                             // populated on Equilibrium
  std::vector<InclusionCertificate> certificates;  // ray-free, one per player
  Vector regrets;
  Scalar welfare = 0;
  int iterations = 0;
  int branchings = 0;
  int max_oracle_iterations = 0;
  CutStats cuts;
  std::vector<std::string> log;
};

/// Complementarity system of the polyhedral approximation game: variables
/// (sigma^1..sigma^n, mu^1..mu^n) with stationarity and primal feasibility
/// blocks per player; lifted auxiliary coordinates carry zero payoff.
LcpProblem build_pag_lcp(const Game& g, const ApproxState& s);

enum class PagStatus { Solved, NoSolution, Incomplete, Failure };

struct PagOutcome {
  PagStatus status = PagStatus::Failure;
  std::vector<Vector> sigma;  // per-player, approximation space (with aux)
  std::string note;
};

/// Equilibrium of the approximated game; in welfare mode the enumerated
/// solution with maximum social welfare is returned.
PagOutcome solve_pag(const Game& g, const ApproxState& s, const CnpConfig& cfg);

/// Refines player i's approximation by a Balas disjunction on an integer
/// coordinate (strengthened by a disjunctive cut when one separates sigma).
/// Returns false when every integer coordinate is already branched.
bool branch_or_cut(const Game& g, ApproxState& s, Index i,
                   const std::optional<Vector>& sigma, Scalar eps, CnpResult* res,
                   const std::function<void(Index, const Cut&, const Vector&)>& on_cut = {});

/// Minimal-cover inequality for a single-row binary knapsack, greedy by
/// descending fractional value; absent when no cover separates xbar.
std::optional<Cut> cover_cut(const Player& p, const Vector& xbar, Scalar eps);

/// Most-violated inequality valid for conv(Y union Z) at xbar (via the
/// standard cut-generating LP with an L1 normalization).
std::optional<Cut> disjunctive_cut(const Polyhedron& y, const Polyhedron& z,
                                   const Vector& xbar, Scalar eps);

/// Outer-approximation loop: solve the approximation game, separate each
/// component of the candidate, cut or branch, and stop at a verified
/// equilibrium or a non-existence certificate.
CnpResult cut_and_play(const Game& g, const CnpConfig& cfg = {});

}  // namespace cutplay
