#pragma once

#include <stdexcept>
#include <string>

#include "cutplay/cnp.hpp"
#include "cutplay/game.hpp"

namespace cutplay {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstanceMeta {
  std::string family = "custom";
  std::string name;
  long seed = 0;
};

struct Instance {
  Game game;
  InstanceMeta meta;
};

/// Canonical JSON: keys sorted, integral values emitted as integers, other
/// floats with 17 significant digits, so serialization is byte-stable.
std::string serialize_instance(const Instance& inst);
Instance parse_instance(const std::string& text);  // throws ParseError

/// FNV-1a over the canonical bytes, "fnv1a:" + 16 hex digits.
std::string content_hash(const std::string& text);

/// Random binary knapsack game: unit profits/weights in [1,100], capacity
/// half the total weight, diagonal interactions in [-50,50]. Deterministic in
/// the seed.
Instance generate_knapsack(Index n, Index m, unsigned long seed);

struct ResultData {
  std::string instance_hash;
  std::string outcome;  // equilibrium | no-equilibrium | time-limit | numeric-failure
  Scalar eps = 3e-5;
  Scalar time_limit = 300;
  std::string objective = "F";  // F | Q
  int cuts = -1;
  std::string backend = "lemke";
  Profile profile;   // empty unless outcome == equilibrium
  Vector regrets;
  Scalar welfare = 0;
  int iterations = 0;
  int branchings = 0;
  CutStats cut_stats;
  double wall_time = 0;
};

std::string outcome_name(CnpOutcome o);

std::string serialize_result(const ResultData& r);
ResultData parse_result(const std::string& text);  // throws ParseError

/// One JSON line per solver iteration, for the run log.
std::string iteration_json(const IterationRecord& rec);

}  // namespace cutplay
