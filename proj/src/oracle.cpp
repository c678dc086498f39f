#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cutplay/oracle.hpp"

namespace cutplay {

bool PointRayStore::add_vertex(const Vector& x, Scalar tol) {
  for (const Vector& p : v)
    if (approx_equal(p, x, tol)) return false;
  v.push_back(x);
  return true;
}

bool PointRayStore::add_ray(const Vector& x, Scalar tol) {
  for (const Vector& p : r)
    if (approx_equal(p, x, tol)) return false;
  r.push_back(x);
  return true;
}

Vector InclusionCertificate::reconstruct() const {
  if (v.empty()) throw std::logic_error("certificate: empty point set");
  Vector x = Vector::Zero(v[0].size());
  for (size_t k = 0; k < v.size(); ++k) x += alpha(static_cast<Index>(k)) * v[k];
  for (size_t k = 0; k < r.size(); ++k) x += beta(static_cast<Index>(k)) * r[k];
  return x;
}

PrlpResult solve_prlp(const Vector& xbar, const std::vector<Vector>& v,
                      const std::vector<Vector>& r, Scalar tol) {
  if (v.empty()) throw std::invalid_argument("solve_prlp: point set must be nonempty");
  const Index d = xbar.size();
  const Index nv = static_cast<Index>(v.size());
  const Index nr = static_cast<Index>(r.size());

  // Variables: [pi (d, free) | pi0 (free) | tau1 (d, >=0) | tau2 (d, >=0)];
  // the split pi = tau2 - tau1 with sum(tau1 + tau2) = 1 normalizes ||pi||_1.
  const Index nvar = 3 * d + 1;
  Vector obj = Vector::Zero(nvar);
  obj.head(d) = xbar;
  obj(d) = -1;
  LinearProgram lp = LinearProgram::minimize(obj);
  lp.sense = Sense::Max;
  lp.lb.head(d + 1).setConstant(-kInf);

  for (Index k = 0; k < nv; ++k) {
    if (v[static_cast<size_t>(k)].size() != d)
      throw std::invalid_argument("solve_prlp: point dimension mismatch");
    Vector row = Vector::Zero(nvar);
    row.head(d) = v[static_cast<size_t>(k)];
    row(d) = -1;
    lp.add_row(row, RowSense::LE, 0);
  }
  for (Index k = 0; k < nr; ++k) {
    if (r[static_cast<size_t>(k)].size() != d)
      throw std::invalid_argument("solve_prlp: ray dimension mismatch");
    Vector row = Vector::Zero(nvar);
    row.head(d) = r[static_cast<size_t>(k)];
    lp.add_row(row, RowSense::LE, 0);
  }
  for (Index j = 0; j < d; ++j) {
    Vector row = Vector::Zero(nvar);
    row(j) = 1;
    row(d + 1 + j) = 1;
    row(2 * d + 1 + j) = -1;
    lp.add_row(row, RowSense::EQ, 0);
  }
  Vector norm = Vector::Zero(nvar);
  norm.tail(2 * d).setOnes();
  lp.add_row(norm, RowSense::EQ, 1);

  LpOutcome out = solve_lp(lp, tol);
  if (out.status != LpStatus::Optimal)
    throw std::runtime_error("solve_prlp: normalized separation LP must be solvable");

  PrlpResult res;
  res.pi = out.x.head(d);
  res.pi0 = out.x(d);
  res.violation = out.value;
  res.alpha = Vector::Zero(nv);
  res.beta = Vector::Zero(nr);
  for (Index k = 0; k < nv; ++k) res.alpha(k) = std::max(out.dual(k), 0.0);
  for (Index k = 0; k < nr; ++k) res.beta(k) = std::max(out.dual(nv + k), 0.0);
  const Scalar asum = res.alpha.sum();
  if (asum > 0) res.alpha /= asum;
  return res;
}

Cut value_cut(const Vector& c, Scalar zbar) {
  if (!std::isfinite(zbar)) throw std::invalid_argument("value_cut: needs a finite optimum");
  return Cut(-c, -zbar, CutKind::ValueCut);
}

namespace {

InclusionCertificate certificate_from_duals(const PointRayStore& store, const PrlpResult& p) {
  InclusionCertificate cert;
  std::vector<Scalar> a, b;
  for (size_t k = 0; k < store.v.size(); ++k) {
    if (p.alpha(static_cast<Index>(k)) > 1e-12) {
      cert.v.push_back(store.v[k]);
      a.push_back(p.alpha(static_cast<Index>(k)));
    }
  }
  for (size_t k = 0; k < store.r.size(); ++k) {
    if (p.beta(static_cast<Index>(k)) > 1e-12) {
      cert.r.push_back(store.r[k]);
      b.push_back(p.beta(static_cast<Index>(k)));
    }
  }
  cert.alpha = Eigen::Map<Vector>(a.data(), static_cast<Index>(a.size()));
  cert.beta = Eigen::Map<Vector>(b.data(), static_cast<Index>(b.size()));
  cert.alpha /= cert.alpha.sum();
  return cert;
}

Vector normalized_ray(const Vector& ray) {
  const Scalar n = ray.lpNorm<Eigen::Infinity>();
  if (!(n > 0)) throw std::runtime_error("separation: degenerate ray");
  return ray / n;
}

}  // namespace

SeparationResult enhanced_separation(const Vector& xbar, const StrategySet& xs, Scalar eps,
                                     const std::optional<Vector>& cost, PointRayStore& store,
                                     const OracleOptions& opt) {
  SeparationResult res;
  const Scalar mtol = std::min(eps, 1e-8);  // membership decided tightly

  // Pretest: the parametrized best response both screens with a value cut and
  // can certify membership outright when x_bar is the unique minimizer.
  if (cost) {
    LpOutcome pre = optimize_over(xs, *cost, Sense::Min);
    if (pre.status == LpStatus::Unbounded) {
      store.add_ray(normalized_ray(pre.ray));
    } else if (pre.status == LpStatus::Optimal) {
      store.add_vertex(pre.x);
      if (cost->lpNorm<Eigen::Infinity>() > 0 && cost->dot(xbar) < pre.value - eps) {
        res.answer = SepAnswer::No;
        res.cut = value_cut(*cost, pre.value);
        return res;
      }
      if ((xbar - pre.x).lpNorm<Eigen::Infinity>() < mtol) {
        res.answer = SepAnswer::Yes;
        res.cert.v = {pre.x};
        res.cert.alpha = Vector::Ones(1);
        res.cert.beta = Vector(0);
        return res;
      }
    } else if (pre.status == LpStatus::Infeasible) {
      throw std::invalid_argument("enhanced_separation: empty strategy set");
    }
  }
  if (store.v.empty()) {
    LpOutcome seed = optimize_over(xs, Vector::Zero(xbar.size()), Sense::Min);
    if (seed.status != LpStatus::Optimal)
      throw std::invalid_argument("enhanced_separation: empty strategy set");
    store.add_vertex(seed.x);
  }

  for (res.iterations = 1; res.iterations <= opt.max_iterations; ++res.iterations) {
    PrlpResult p = solve_prlp(xbar, store.v, store.r, opt.tol);
    if (p.violation <= mtol) {
      res.answer = SepAnswer::Yes;
      res.cert = certificate_from_duals(store, p);
      return res;
    }
    MilpOptions mopt;
    std::vector<Vector> pool;
    mopt.pool = &pool;
    mopt.pool_cap = 4 * opt.harvest;
    LpOutcome best = optimize_over(xs, p.pi, Sense::Max, mopt);
    if (best.status == LpStatus::Unbounded) {
      store.add_ray(normalized_ray(best.ray));
      continue;
    }
    if (best.status != LpStatus::Optimal)
      throw std::runtime_error("enhanced_separation: inner optimization failed");
    if (p.pi.dot(best.x) < p.pi.dot(xbar) - eps / 2) {
      res.answer = SepAnswer::No;
      res.cut = Cut(p.pi, p.pi.dot(best.x), CutKind::EsoCut);
      return res;
    }
    bool progressed = store.add_vertex(best.x);
    int kept = 0;
    for (const Vector& q : pool) {
      if (kept >= opt.harvest) break;
      if (p.pi.dot(q) > p.pi0 + opt.tol && store.add_vertex(q)) {
        ++kept;
        progressed = true;
      }
    }
    if (!progressed) {
      // The store already supports x_bar up to the separation value; accept
      // membership only while the certificate stays tight.
      if (p.violation <= 1e-6) {
        res.answer = SepAnswer::Yes;
        res.cert = certificate_from_duals(store, p);
        return res;
      }
      throw std::runtime_error("enhanced_separation: stalled in the tolerance band");
    }
  }
  throw std::runtime_error("enhanced_separation: iteration limit exceeded");
}

RepairResult repair(const Vector& xbar, const StrategySet& xs, Scalar eps,
                    const InclusionCertificate& cert, Scalar b0) {
  RepairResult res;
  const Scalar mtol = std::min(eps, 1e-8);
  if (cert.r.empty()) {
    res.ok = true;
    res.v = cert.v;
    res.alpha = cert.alpha;
    return res;
  }

  std::vector<Vector> points = cert.v;
  Scalar bound = b0;
  for (int round = 0; round < 60; ++round) {
    for (const Vector& ray : cert.r) {
      StrategySet capped = xs;
      capped.poly = add_cut(capped.poly, Cut(ray, bound, CutKind::EsoCut));
      // With x >= 0 the ray is nonnegative, so r.x <= bound boxes every
      // coordinate the ray touches; integer variables need that to solve.
      for (Index j = 0; j < capped.ub.size(); ++j)
        if (ray(j) > 1e-12 && !std::isfinite(capped.ub(j)))
          capped.ub(j) = bound / ray(j);
      LpOutcome far = optimize_over(capped, ray, Sense::Max);
      if (far.status != LpStatus::Optimal) continue;
      bool fresh = true;
      for (const Vector& p : points)
        if (approx_equal(p, far.x)) fresh = false;
      if (fresh) points.push_back(far.x);
    }
    PrlpResult p = solve_prlp(xbar, points, {}, 1e-9);
    if (p.violation <= mtol) {
      std::vector<Scalar> a;
      for (size_t k = 0; k < points.size(); ++k) {
        if (p.alpha(static_cast<Index>(k)) > 1e-12) {
          res.v.push_back(points[k]);
          a.push_back(p.alpha(static_cast<Index>(k)));
        }
      }
      res.alpha = Eigen::Map<Vector>(a.data(), static_cast<Index>(a.size()));
      res.alpha /= res.alpha.sum();
      res.ok = true;
      return res;
    }
    bound *= 2;
  }
  res.v = cert.v;
  res.alpha = cert.alpha;
  return res;
}

}  // namespace cutplay
