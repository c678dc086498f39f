#pragma once

#include <vector>

#include "cutplay/game.hpp"

namespace cutplay {

/// All feasible pure strategies of an all-integer bounded player, in
/// lexicographic order. Throws when the lattice exceeds `cap`.
std::vector<Vector> enumerate_pure(const Player& p, long cap = 4096);

/// Finite normal form induced by the pure-strategy catalogs. Payoffs are in
/// the game's native sense, indexed by the mixed-radix joint strategy index
/// (player 0 varies slowest).
struct NormalForm {
  Sense sense = Sense::Min;
  std::vector<std::vector<Vector>> catalogs;
  std::vector<Index> shape;
  std::vector<std::vector<Scalar>> payoff;  // per player

  Index joint(const std::vector<Index>& idx) const;
};

NormalForm to_normal_form(const Game& g, long cap = 4096);

struct NfEquilibrium {
  std::vector<Vector> probs;  // per player, over the catalog
};

/// Two-player support enumeration over equal-size supports: pure profiles by
/// direct comparison, mixed supports by the equality-of-payoffs system.
/// Complete for nondegenerate games within the pair budget.
std::vector<NfEquilibrium> support_enumeration_2p(const NormalForm& nf, Scalar eps = 1e-9,
                                                  int max_count = 1, long pair_budget = 50000);

/// Enumeration-based regret check, independent of the LP/MILP kernels.
RegretReport oracle_verify(const Game& g, const Profile& p, Scalar eps, long cap = 4096);

}  // namespace cutplay
