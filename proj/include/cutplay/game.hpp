#pragma once

#include <string>
#include <vector>

#include "cutplay/geometry.hpp"
#include "cutplay/solvers.hpp"

namespace cutplay {

/// One player's data: linear payoff term c, bilinear interaction matrix
/// mapping the stacked opponent variables to an own-cost contribution, and a
/// polyhedrally-represented feasible set with optional integrality.
struct Player {
  Vector c;             // linear term, native sense
  Matrix interaction;   // opp_dim x own_dim, native sense
  Polyhedron feas;      // base constraints A x <= b (x >= 0 implied by nonneg)
  IndexSet int_idx;     // integer-constrained coordinates
  Vector lb, ub;        // variable bounds (integer coordinates must be finite)

  Index dim() const { return c.size(); }
};

struct Game {
  std::vector<Player> players;
  Sense sense = Sense::Min;  // canonical internal computations are min

  Index num_players() const { return static_cast<Index>(players.size()); }
  Index opp_dim(Index i) const;
  /// Throws on inconsistent dimensions.
  void validate() const;
  /// +1 for min-sense games, -1 for max-sense (canonical-min conversion).
  Scalar cost_sign() const { return sense == Sense::Max ? -1.0 : 1.0; }
};

/// Finite-support probability distribution over pure strategies.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  MixedStrategy(std::vector<Vector> points, Vector probs);
  static MixedStrategy pure(Vector x);

  const std::vector<Vector>& points() const { return points_; }
  const Vector& probs() const { return probs_; }
  Index support_size() const { return probs_.size(); }
  Vector mean() const;

 private:
  std::vector<Vector> points_;
  Vector probs_;
};

using Profile = std::vector<MixedStrategy>;

/// Handle for optimizing linear functions over one player's (possibly
/// nonconvex) strategy set.
struct StrategySet {
  Polyhedron poly;
  IndexSet int_idx;
  Vector lb, ub;
};

StrategySet strategy_set(const Player& p);

/// Linear (mixed-integer) optimization over a strategy set.
LpOutcome optimize_over(const StrategySet& xs, const Vector& obj, Sense sense,
                        const MilpOptions& opt = {});

/// Opponent variables of player i stacked in player order (i excluded).
Vector stack_opponents(const Game& g, Index i, const std::vector<Vector>& pts);

/// Canonical-min cost of player i at a pure profile.
Scalar pure_payoff(const Game& g, Index i, const std::vector<Vector>& pure);

/// Canonical-min expected cost of player i; bilinearity reduces the
/// product-support sum to an evaluation at the support means.
Scalar expected_payoff(const Game& g, Index i, const Profile& p);

/// c^i + (C^i)^T opp, in canonical min sense.
Vector parametrized_cost(const Game& g, Index i, const Vector& opp_means);

struct BestResponse {
  LpStatus status = LpStatus::NumericFailure;
  Vector x;
  Scalar value = 0;
};

BestResponse best_response(const Game& g, Index i, const Vector& opp_means,
                           Scalar tol = 1e-9);

struct RegretReport {
  bool equilibrium = false;
  bool supports_valid = true;
  Vector regrets;        // per player, canonical min sense
  Scalar max_regret = 0;
  std::string message;   // populated on support rejection
};

/// Per-player regret against the exact best response; equilibrium iff the
/// maximum regret is within eps (absolute).
RegretReport verify_equilibrium(const Game& g, const Profile& p, Scalar eps);

/// Sum of the players' expected payoffs in the game's native sense.
Scalar social_welfare(const Game& g, const Profile& p);
Scalar social_welfare(const Game& g, const std::vector<Vector>& means);

}  // namespace cutplay
