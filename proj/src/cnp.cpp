#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cutplay/cnp.hpp"

namespace cutplay {

namespace {

Cut pad_cut(const Cut& c, Index n) {
  if (c.pi.size() == n) return c;
  Vector pi = Vector::Zero(n);
  pi.head(c.pi.size()) = c.pi;
  return Cut(pi, c.pi0, c.provenance);
}

bool feasible(const Polyhedron& p) {
  if (p.is_empty_flagged()) return false;
  LinearProgram lp = LinearProgram::minimize(Vector::Zero(p.num_vars()));
  if (!p.nonneg()) lp.lb.setConstant(-kInf);
  for (Index i = 0; i < p.num_rows(); ++i) lp.add_row(p.a().row(i), RowSense::LE, p.b()(i));
  return solve_lp(lp).status != LpStatus::Infeasible;
}

// Adds a cut after removing existing rows nearly parallel to it. Every row is
// a valid inequality for the player's hull, so removals keep the outer
// approximation sound, and the newcomer separates the current candidate while
// the removed rows did not.
Polyhedron add_cut_replacing(const Polyhedron& p, const Cut& c, Scalar cos_gap = 1e-4) {
  const Scalar pn = c.pi.norm();
  std::vector<Index> keep;
  for (Index r = 0; r < p.num_rows(); ++r) {
    const Scalar rn = p.a().row(r).norm();
    if (pn > 0 && rn > 0 && c.pi.dot(p.a().row(r)) > (1 - cos_gap) * pn * rn) continue;
    keep.push_back(r);
  }
  Matrix a(static_cast<Index>(keep.size()) + 1, p.num_vars());
  Vector b(a.rows());
  for (Index k = 0; k + 1 < a.rows(); ++k) {
    a.row(k) = p.a().row(keep[static_cast<size_t>(k)]);
    b(k) = p.b()(keep[static_cast<size_t>(k)]);
  }
  a.row(a.rows() - 1) = c.pi;
  b(a.rows() - 1) = c.pi0;
  return Polyhedron(p.num_vars(), std::move(a), std::move(b), p.nonneg(), p.aux_range());
}

// Drops rows that the remaining system already implies; branching lifts can
// leave many, and they bloat and degenerate the complementarity systems.
Polyhedron drop_redundant_rows(const Polyhedron& p) {
  Matrix a = p.a();
  Vector b = p.b();
  std::vector<Index> keep;
  std::vector<bool> active(static_cast<size_t>(p.num_rows()), true);
  for (Index r = 0; r < p.num_rows(); ++r) {
    LinearProgram lp = LinearProgram::minimize(-a.row(r).transpose());
    if (!p.nonneg()) lp.lb.setConstant(-kInf);
    for (Index k = 0; k < p.num_rows(); ++k)
      if (k != r && active[static_cast<size_t>(k)]) lp.add_row(a.row(k), RowSense::LE, b(k));
    const LpOutcome o = solve_lp(lp);
    if (o.status == LpStatus::Optimal && -o.value <= b(r) + 1e-9 * (1 + std::abs(b(r))))
      active[static_cast<size_t>(r)] = false;
    else
      keep.push_back(r);
  }
  if (static_cast<Index>(keep.size()) == p.num_rows()) return p;
  Matrix a2(static_cast<Index>(keep.size()), p.num_vars());
  Vector b2(a2.rows());
  for (Index k = 0; k < a2.rows(); ++k) {
    a2.row(k) = a.row(keep[static_cast<size_t>(k)]);
    b2(k) = b(keep[static_cast<size_t>(k)]);
  }
  return Polyhedron(p.num_vars(), std::move(a2), std::move(b2), p.nonneg(), p.aux_range());
}

bool unstable_coefficients(const Cut& c) {
  const Scalar hi = c.pi.lpNorm<Eigen::Infinity>();
  Scalar lo = hi;
  for (Index j = 0; j < c.pi.size(); ++j) {
    const Scalar a = std::abs(c.pi(j));
    if (a > 0) lo = std::min(lo, a);
  }
  return hi / lo > 1e6 || lo < 1e-9 * hi;
}

}  // namespace

ApproxState initial_approximation(const Game& g) {
  ApproxState s;
  for (const Player& p : g.players) {
    Matrix a = p.feas.a();
    Vector b = p.feas.b();
    std::vector<std::pair<Vector, Scalar>> extra;
    for (Index j = 0; j < p.dim(); ++j) {
      if (std::isfinite(p.ub(j))) {
        Vector e = Vector::Zero(p.dim());
        e(j) = 1;
        extra.emplace_back(e, p.ub(j));
      }
      if (std::isfinite(p.lb(j)) && p.lb(j) > 0) {
        Vector e = Vector::Zero(p.dim());
        e(j) = -1;
        extra.emplace_back(e, -p.lb(j));
      }
    }
    Matrix a2(a.rows() + static_cast<Index>(extra.size()), p.dim());
    Vector b2(a2.rows());
    a2.topRows(a.rows()) = a;
    b2.head(a.rows()) = b;
    for (Index k = 0; k < static_cast<Index>(extra.size()); ++k) {
      a2.row(a.rows() + k) = extra[static_cast<size_t>(k)].first;
      b2(a.rows() + k) = extra[static_cast<size_t>(k)].second;
    }
    s.approx.emplace_back(p.dim(), std::move(a2), std::move(b2), p.feas.nonneg());
    s.branched.emplace_back();
  }
  return s;
}

LcpProblem build_pag_lcp(const Game& g, const ApproxState& s) {
  const Index n = g.num_players();
  std::vector<Index> sig_off(static_cast<size_t>(n)), mu_off(static_cast<size_t>(n));
  Index nvars = 0, nrows = 0;
  for (Index i = 0; i < n; ++i) {
    const Polyhedron& p = s.approx[static_cast<size_t>(i)];
    if (p.is_empty_flagged()) throw std::invalid_argument("build_pag_lcp: empty approximation");
    if (!p.nonneg()) throw std::invalid_argument("build_pag_lcp: approximations must satisfy x >= 0");
    sig_off[static_cast<size_t>(i)] = nvars;
    nvars += p.num_vars();
    nrows += p.num_rows();
  }
  Index at = nvars;
  for (Index i = 0; i < n; ++i) {
    mu_off[static_cast<size_t>(i)] = at;
    at += s.approx[static_cast<size_t>(i)].num_rows();
  }

  LcpProblem lcp;
  lcp.m = Matrix::Zero(nvars + nrows, nvars + nrows);
  lcp.q = Vector::Zero(nvars + nrows);
  const Scalar sgn = g.cost_sign();

  for (Index i = 0; i < n; ++i) {
    const Player& pl = g.players[static_cast<size_t>(i)];
    const Polyhedron& ap = s.approx[static_cast<size_t>(i)];
    const Index so = sig_off[static_cast<size_t>(i)];
    const Index mo = mu_off[static_cast<size_t>(i)];

    lcp.q.segment(so, pl.dim()) = sgn * pl.c;
    const Matrix ct = sgn * pl.interaction.transpose();  // dim x opp_dim
    Index opp_at = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const Index dj = g.players[static_cast<size_t>(j)].dim();
      lcp.m.block(so, sig_off[static_cast<size_t>(j)], pl.dim(), dj) =
          ct.middleCols(opp_at, dj);
      opp_at += dj;
    }
    lcp.m.block(so, mo, ap.num_vars(), ap.num_rows()) = ap.a().transpose();
    lcp.m.block(mo, so, ap.num_rows(), ap.num_vars()) = -ap.a();
    lcp.q.segment(mo, ap.num_rows()) = ap.b();
  }
  return lcp;
}

namespace {

std::vector<Vector> extract_sigma(const Game& g, const ApproxState& s, const Vector& z) {
  std::vector<Vector> sigma;
  Index at = 0;
  for (Index i = 0; i < g.num_players(); ++i) {
    const Index ni = s.approx[static_cast<size_t>(i)].num_vars();
    sigma.push_back(z.segment(at, ni));
    at += ni;
  }
  return sigma;
}

std::vector<Vector> original_means(const Game& g, const std::vector<Vector>& sigma) {
  std::vector<Vector> means;
  for (Index i = 0; i < g.num_players(); ++i)
    means.push_back(sigma[static_cast<size_t>(i)].head(g.players[static_cast<size_t>(i)].dim()));
  return means;
}

}  // namespace

PagOutcome solve_pag(const Game& g, const ApproxState& s, const CnpConfig& cfg) {
  const LcpProblem lcp = build_pag_lcp(g, s);
  PagOutcome out;

  const bool lemke_first =
      cfg.objective == ObjectiveMode::Feasibility && cfg.backend == LcpBackend::Lemke;
  if (lemke_first) {
    const LcpOutcome o = solve_lcp_lemke(lcp);
    if (o.status == LcpStatus::Solved) {
      out.status = PagStatus::Solved;
      out.sigma = extract_sigma(g, s, o.z);
      out.note = "lemke";
      return out;
    }
    out.note = o.status == LcpStatus::RayTermination ? "lemke: ray termination; " : "lemke: failed; ";
  }

  // Feasibility mode needs any one solution; only welfare selection (and the
  // NoSolution proof, which finds none) must sweep the whole pattern tree.
  const long cap = cfg.objective == ObjectiveMode::Feasibility ? 1 : 0;
  // When the perturbed-Lemke rescue is available the dive gets a small node
  // allowance: on the large degenerate systems where it grinds, the rescue
  // typically answers in milliseconds. The cap is deterministic so repeated
  // runs follow identical trajectories.
  const long dive_nodes = lemke_first ? std::min<long>(cfg.lcp_node_budget, 500) : cfg.lcp_node_budget;
  const LcpEnumerateResult en = solve_lcp_enumerate(lcp, std::nullopt, 1e-9, dive_nodes, cap);
  if (en.solutions.empty() && lemke_first) {
    const LcpOutcome pert = solve_lcp_lemke_perturbed(lcp);
    if (pert.status == LcpStatus::Solved) {
      out.status = PagStatus::Solved;
      out.sigma = extract_sigma(g, s, pert.z);
      out.note += "lemke (perturbed)";
      return out;
    }
  }
  if (!en.solutions.empty()) {
    size_t pick = 0;
    if (cfg.objective == ObjectiveMode::Welfare) {
      Scalar best = -kInf;
      for (size_t k = 0; k < en.solutions.size(); ++k) {
        const Scalar sw = social_welfare(g, original_means(g, extract_sigma(g, s, en.solutions[k].z)));
        if (sw > best + 1e-12) {
          best = sw;
          pick = k;
        }
      }
    }
    out.status = PagStatus::Solved;
    out.sigma = extract_sigma(g, s, en.solutions[pick].z);
    out.note += en.complete ? "enumerate (complete)" : "enumerate (partial)";
    return out;
  }
  out.status = en.complete ? PagStatus::NoSolution : PagStatus::Incomplete;
  out.note += en.complete ? "enumerate: no solution" : "enumerate: budget exhausted";
  return out;
}

std::optional<Cut> cover_cut(const Player& p, const Vector& xbar, Scalar eps) {
  const Index d = p.dim();
  if (static_cast<Index>(p.int_idx.size()) != d || p.feas.num_rows() < 1) return std::nullopt;
  for (Index j = 0; j < d; ++j)
    if (p.lb(j) != 0 || p.ub(j) != 1) return std::nullopt;
  // Locate a knapsack row: nonnegative weights, positive capacity.
  Index row = -1;
  for (Index i = 0; i < p.feas.num_rows() && row < 0; ++i)
    if (p.feas.a().row(i).minCoeff() >= 0 && p.feas.a().row(i).maxCoeff() > 0 && p.feas.b()(i) > 0)
      row = i;
  if (row < 0) return std::nullopt;
  const Vector w = p.feas.a().row(row);
  const Scalar cap = p.feas.b()(row);

  std::vector<Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return xbar(a) > xbar(b); });
  std::vector<Index> cover;
  Scalar weight = 0;
  for (Index j : order) {
    if (w(j) <= 0) continue;
    cover.push_back(j);
    weight += w(j);
    if (weight > cap) break;
  }
  if (weight <= cap) return std::nullopt;
  // Minimalize: drop items while the rest still exceeds the capacity.
  for (auto it = cover.begin(); it != cover.end();) {
    if (weight - w(*it) > cap) {
      weight -= w(*it);
      it = cover.erase(it);
    } else {
      ++it;
    }
  }
  Scalar lhs = 0;
  Vector pi = Vector::Zero(d);
  for (Index j : cover) {
    pi(j) = 1;
    lhs += xbar(j);
  }
  const Scalar rhs = static_cast<Scalar>(cover.size()) - 1;
  if (lhs <= rhs + eps / 2) return std::nullopt;
  return Cut(pi, rhs, CutKind::CoverCut);
}

std::optional<Cut> disjunctive_cut(const Polyhedron& y, const Polyhedron& z,
                                   const Vector& xbar, Scalar eps) {
  if (!y.nonneg() || !z.nonneg() || y.num_vars() != z.num_vars())
    throw std::invalid_argument("disjunctive_cut: operands must share the x >= 0 form");
  if (!feasible(y) || !feasible(z)) return std::nullopt;
  const Index d = y.num_vars();
  const Index my = y.num_rows();
  const Index mz = z.num_rows();

  // Variables: [pi (free) | pi0 (free) | u >= 0 | w >= 0 | tau1 | tau2];
  // pi <= A_Y^T u, pi0 >= b_Y^T u guarantee validity on Y (same for Z), and
  // the tau split normalizes ||pi||_1.
  const Index nvar = d + 1 + my + mz + 2 * d;
  Vector obj = Vector::Zero(nvar);
  obj.head(d) = xbar;
  obj(d) = -1;
  LinearProgram lp = LinearProgram::minimize(obj);
  lp.sense = Sense::Max;
  lp.lb.head(d + 1).setConstant(-kInf);
  for (Index j = 0; j < d; ++j) {
    Vector row = Vector::Zero(nvar);
    row(j) = 1;
    row.segment(d + 1, my) = -y.a().col(j);
    lp.add_row(row, RowSense::LE, 0);
  }
  for (Index j = 0; j < d; ++j) {
    Vector row = Vector::Zero(nvar);
    row(j) = 1;
    row.segment(d + 1 + my, mz) = -z.a().col(j);
    lp.add_row(row, RowSense::LE, 0);
  }
  {
    Vector row = Vector::Zero(nvar);
    row(d) = -1;
    row.segment(d + 1, my) = y.b();
    lp.add_row(row, RowSense::LE, 0);
    row.setZero();
    row(d) = -1;
    row.segment(d + 1 + my, mz) = z.b();
    lp.add_row(row, RowSense::LE, 0);
  }
  for (Index j = 0; j < d; ++j) {
    Vector row = Vector::Zero(nvar);
    row(j) = 1;
    row(d + 1 + my + mz + j) = 1;
    row(d + 1 + my + mz + d + j) = -1;
    lp.add_row(row, RowSense::EQ, 0);
  }
  Vector norm = Vector::Zero(nvar);
  norm.tail(2 * d).setOnes();
  lp.add_row(norm, RowSense::EQ, 1);

  const LpOutcome out = solve_lp(lp);
  if (out.status != LpStatus::Optimal || out.value <= eps / 2) return std::nullopt;
  return Cut(out.x.head(d), out.x(d), CutKind::Disjunctive);
}

bool branch_or_cut(const Game& g, ApproxState& s, Index i,
                   const std::optional<Vector>& sigma, Scalar eps, CnpResult* res,
                   const std::function<void(Index, const Cut&, const Vector&)>& on_cut) {
  const Player& pl = g.players[static_cast<size_t>(i)];
  auto& branched = s.branched[static_cast<size_t>(i)];
  const Polyhedron& p = s.approx[static_cast<size_t>(i)];

  Index pick = -1;
  Scalar pick_frac = 1e-6;
  Index lowest = -1;
  for (Index j : pl.int_idx) {
    if (branched.count(j)) continue;
    if (lowest < 0 || j < lowest) lowest = j;
    if (sigma) {
      const Scalar f = std::abs((*sigma)(j) - std::round((*sigma)(j)));
      if (f > pick_frac) {
        pick_frac = f;
        pick = j;
      }
    }
  }
  if (pick < 0) pick = lowest;
  if (pick < 0) return false;

  const Scalar v = sigma && pick_frac > 1e-6 ? (*sigma)(pick) : (pl.lb(pick) + pl.ub(pick)) / 2;
  Scalar lo = std::floor(v);
  Scalar hi = std::ceil(v);
  if (lo == hi) hi = lo + 1;

  Vector e = Vector::Zero(p.num_vars());
  e(pick) = 1;
  const Polyhedron down = add_cut(p, Cut(e, lo, CutKind::Disjunctive));
  const Polyhedron up = add_cut(p, Cut(-e, -hi, CutKind::Disjunctive));
  const bool down_ok = feasible(down);
  const bool up_ok = feasible(up);
  if (!down_ok && !up_ok)
    throw std::runtime_error("branch_or_cut: both branches infeasible");

  auto note_cut = [&](const Cut& c, const Vector& trigger) {
    if (res) {
      ++res->cuts.total;
      ++res->cuts.disjunctive;
    }
    if (on_cut) on_cut(i, c, trigger);
  };

  if (!down_ok || !up_ok) {
    // One side is void, so the disjunction fixes the coordinate.
    const Cut fix = down_ok ? Cut(e, lo, CutKind::Disjunctive) : Cut(-e, -hi, CutKind::Disjunctive);
    s.approx[static_cast<size_t>(i)] = down_ok ? down : up;
    if (sigma) note_cut(fix, *sigma);
  } else {
    Polyhedron lifted = balas_union(down, up);
    if (sigma) {
      const auto dc = disjunctive_cut(down, up, *sigma, eps);
      if (dc) {
        lifted = add_cut_replacing(lifted, pad_cut(*dc, lifted.num_vars()));
        note_cut(*dc, *sigma);
      }
    }
    s.approx[static_cast<size_t>(i)] = drop_redundant_rows(lifted);
  }
  branched.insert(pick);
  if (res) ++res->branchings;
  return true;
}

CnpResult cut_and_play(const Game& g, const CnpConfig& cfg) {
  g.validate();
  for (const Player& p : g.players) {
    if (!p.feas.nonneg() || p.feas.is_empty_flagged())
      throw std::invalid_argument("cut_and_play: players need nonempty sets in the x >= 0 form");
    if (p.lb.minCoeff() < 0)
      throw std::invalid_argument("cut_and_play: variable lower bounds must be nonnegative");
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const Index n = g.num_players();
  ApproxState s = initial_approximation(g);
  std::vector<PointRayStore> stores(static_cast<size_t>(n));
  std::vector<int> consec(static_cast<size_t>(n), 0);
  std::vector<Vector> last_sigma(static_cast<size_t>(n));

  CnpResult res;
  auto fail = [&](const std::string& why) {
    res.outcome = CnpOutcome::NumericFailure;
    res.log.push_back(why);
    return res;
  };

  for (int t = 0; t < cfg.max_iterations; ++t) {
    res.iterations = t + 1;
    if (elapsed() > cfg.time_limit) {
      res.outcome = CnpOutcome::TimeLimit;
      res.log.push_back("time limit reached at iteration " + std::to_string(t));
      return res;
    }

    PagOutcome pag;
    try {
      pag = solve_pag(g, s, cfg);
    } catch (const std::exception& e) {
      return fail(std::string("approximation game failed: ") + e.what());
    }
    IterationRecord rec;
    rec.t = t;
    rec.lcp = pag.note;

    if (pag.status == PagStatus::Failure)
      return fail("complementarity backend inconclusive: " + pag.note);

    if (pag.status == PagStatus::Incomplete) {
      // The backends could not decide this approximation game; branching
      // rewrites the player sets and usually yields a tractable system.
      bool refined = false;
      for (Index i = 0; i < n && !refined; ++i) {
        try {
          refined = branch_or_cut(g, s, i, std::nullopt, cfg.eps, &res, cfg.on_cut);
        } catch (const std::exception& e) {
          return fail(std::string("branching failed: ") + e.what());
        }
      }
      if (!refined) return fail("complementarity backend inconclusive: " + pag.note);
      rec.lcp += "; refined";
      if (cfg.on_iteration) cfg.on_iteration(rec);
      continue;
    }

    if (pag.status == PagStatus::NoSolution) {
      bool refined = false;
      for (Index i = 0; i < n && !refined; ++i) {
        try {
          refined = branch_or_cut(g, s, i, std::nullopt, cfg.eps, &res, cfg.on_cut);
        } catch (const std::exception& e) {
          return fail(std::string("branching failed: ") + e.what());
        }
      }
      if (!refined) {
        res.outcome = CnpOutcome::NoEquilibrium;
        res.log.push_back("approximation game has no solution (" + pag.note +
                          ") and no integer disjunction remains: the game admits no equilibrium");
        if (cfg.on_iteration) cfg.on_iteration(rec);
        return res;
      }
      rec.lcp += "; refined";
      if (cfg.on_iteration) cfg.on_iteration(rec);
      continue;
    }

    const std::vector<Vector> means = original_means(g, pag.sigma);
    rec.welfare = social_welfare(g, means);

    bool all_yes = true;
    std::vector<InclusionCertificate> certs(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const Player& pl = g.players[static_cast<size_t>(i)];
      const Vector& xbar = means[static_cast<size_t>(i)];
      const Vector ci = parametrized_cost(g, i, stack_opponents(g, i, means));
      SeparationResult sep;
      try {
        sep = enhanced_separation(xbar, strategy_set(pl), cfg.eps, ci,
                                  stores[static_cast<size_t>(i)]);
      } catch (const std::exception& e) {
        return fail("separation failed for player " + std::to_string(i) + ": " + e.what());
      }
      res.max_oracle_iterations = std::max(res.max_oracle_iterations, sep.iterations);

      if (sep.answer == SepAnswer::Yes) {
        certs[static_cast<size_t>(i)] = sep.cert;
        rec.answers.emplace_back("yes");
        consec[static_cast<size_t>(i)] = 0;
      } else {
        all_yes = false;
        rec.answers.emplace_back("no");
        const Cut main = *sep.cut;
        std::optional<Cut> cc;
        if (cfg.cut_aggressiveness == 1 ||
            (cfg.cut_aggressiveness == 0 && main.provenance == CutKind::ValueCut &&
             unstable_coefficients(main)))
          cc = cover_cut(pl, xbar, cfg.eps);
        const bool replace_main = cfg.cut_aggressiveness == 0 && cc.has_value();
        auto apply = [&](const Cut& c) {
          const Polyhedron& ap = s.approx[static_cast<size_t>(i)];
          const Cut padded = pad_cut(c, ap.num_vars());
          // Keeping a cut nearly parallel to an existing row would carve a
          // thin wedge that wrecks the complementarity solves; the new cut
          // replaces such rows instead.
          s.approx[static_cast<size_t>(i)] = add_cut_replacing(ap, padded);
          ++res.cuts.total;
          switch (c.provenance) {
            case CutKind::ValueCut: ++res.cuts.value; break;
            case CutKind::EsoCut: ++res.cuts.eso; break;
            case CutKind::CoverCut: ++res.cuts.cover; break;
            case CutKind::Disjunctive: ++res.cuts.disjunctive; break;
          }
          rec.cuts.emplace_back(i, to_string(c.provenance));
          if (cfg.on_cut) cfg.on_cut(i, c, xbar);
        };
        if (!replace_main) apply(main);
        if (cc) apply(*cc);

        // Branch once the same player stalls: three consecutive cuts without
        // the candidate moving.
        const Vector& prev = last_sigma[static_cast<size_t>(i)];
        const bool unchanged = prev.size() == xbar.size() && approx_equal(prev, xbar, cfg.eps);
        consec[static_cast<size_t>(i)] = unchanged ? consec[static_cast<size_t>(i)] + 1 : 1;
        if (consec[static_cast<size_t>(i)] >= 3) {
          try {
            branch_or_cut(g, s, i, pag.sigma[static_cast<size_t>(i)], cfg.eps, &res, cfg.on_cut);
          } catch (const std::exception& e) {
            return fail(std::string("branching failed: ") + e.what());
          }
          consec[static_cast<size_t>(i)] = 0;
        }
      }
      last_sigma[static_cast<size_t>(i)] = xbar;
    }

    if (all_yes) {
      Profile profile;
      res.certificates.clear();
      for (Index i = 0; i < n; ++i) {
        InclusionCertificate& cert = certs[static_cast<size_t>(i)];
        std::vector<Vector> pts = cert.v;
        Vector alpha = cert.alpha;
        if (!cert.r.empty()) {
          const RepairResult rr = repair(means[static_cast<size_t>(i)],
                                         strategy_set(g.players[static_cast<size_t>(i)]),
                                         cfg.eps, cert);
          if (!rr.ok)
            return fail("certificate repair failed for player " + std::to_string(i));
          pts = rr.v;
          alpha = rr.alpha;
        }
        std::vector<Vector> sup;
        std::vector<Scalar> pr;
        for (Index k = 0; k < alpha.size(); ++k) {
          if (alpha(k) > 1e-9) {
            sup.push_back(pts[static_cast<size_t>(k)]);
            pr.push_back(alpha(k));
          }
        }
        Vector prv = Eigen::Map<Vector>(pr.data(), static_cast<Index>(pr.size()));
        prv /= prv.sum();
        profile.emplace_back(sup, prv);
        InclusionCertificate clean;
        clean.v = sup;
        clean.alpha = prv;
        clean.beta = Vector(0);
        res.certificates.push_back(std::move(clean));
      }
      const RegretReport rr = verify_equilibrium(g, profile, cfg.eps);
      if (!rr.equilibrium) {
        return fail("candidate failed verification: " +
                    (rr.message.empty() ? "regret " + std::to_string(rr.max_regret) : rr.message));
      }
      res.outcome = CnpOutcome::Equilibrium;
      res.profile = std::move(profile);
      res.regrets = rr.regrets;
      res.welfare = social_welfare(g, res.profile);
      res.log.push_back("equilibrium verified, max regret " + std::to_string(rr.max_regret));
      if (cfg.on_iteration) cfg.on_iteration(rec);
      return res;
    }
    if (cfg.on_iteration) cfg.on_iteration(rec);
  }
  res.outcome = CnpOutcome::TimeLimit;
  res.log.push_back("iteration budget exhausted");
  return res;
}

}  // namespace cutplay
