#pragma once

#include <optional>
#include <vector>

#include "cutplay/game.hpp"
#include "cutplay/geometry.hpp"

namespace cutplay {

/// Growing inner description of cl conv(X): vertices V and extreme rays R.
struct PointRayStore {
  std::vector<Vector> v;
  std::vector<Vector> r;

  /// Deduplicated insertion; returns true when the element is new.
  bool add_vertex(const Vector& x, Scalar tol = 1e-8);
  bool add_ray(const Vector& x, Scalar tol = 1e-8);
};

/// x_bar = sum alpha_k v_k + sum beta_k r_k with alpha on the simplex.
struct InclusionCertificate {
  std::vector<Vector> v;
  std::vector<Vector> r;
  Vector alpha;
  Vector beta;

  Vector reconstruct() const;
};

struct PrlpResult {
  Vector pi;
  Scalar pi0 = 0;
  Scalar violation = 0;  // pi.x_bar - pi0 at the optimum
  Vector alpha;          // duals of the point rows (clamped, renormalized)
  Vector beta;           // duals of the ray rows (clamped)
};

/// Most-violated normalized inequality for conv(V) + cone(R) at x_bar;
/// violation <= tol certifies membership and the duals give the certificate.
PrlpResult solve_prlp(const Vector& xbar, const std::vector<Vector>& v,
                      const std::vector<Vector>& r, Scalar tol = 1e-9);

/// -c.x <= -zbar, valid for cl conv(X) when zbar = min{c.x : x in X}.
Cut value_cut(const Vector& c, Scalar zbar);

enum class SepAnswer { Yes, No };

struct SeparationResult {
  SepAnswer answer = SepAnswer::No;
  InclusionCertificate cert;  // populated on Yes
  std::optional<Cut> cut;     // populated on No
  int iterations = 0;         // membership-loop iterations
};

struct OracleOptions {
  int harvest = 5;           // extra pool points kept per optimization call
  int max_iterations = 100000;
  Scalar tol = 1e-9;
};

/// Decides x_bar in cl conv(X); Yes yields an inclusion certificate, No a
/// valid inequality separating x_bar. When the parametrized cost is supplied
/// the value-cut pretest runs first.
SeparationResult enhanced_separation(const Vector& xbar, const StrategySet& xs, Scalar eps,
                                     const std::optional<Vector>& cost, PointRayStore& store,
                                     const OracleOptions& opt = {});

struct RepairResult {
  bool ok = false;
  std::vector<Vector> v;
  Vector alpha;
};

/// Rewrites a certificate that uses rays into a convex combination of points
/// of X by bounding each ray direction at increasing levels.
RepairResult repair(const Vector& xbar, const StrategySet& xs, Scalar eps,
                    const InclusionCertificate& cert, Scalar b0 = 4.0);

}  // namespace cutplay
