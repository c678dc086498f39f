#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "cutplay/io.hpp"

namespace cutplay {

namespace {

using nlohmann::json;

// Canonical emission: objects iterate in key order (std::map), integral
// doubles print as integers, everything else with 17 significant digits.
void dump_canonical(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) {
        out += std::to_string(static_cast<long long>(v));
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      break;
    }
    case json::value_t::string:
      out += json(j.get<std::string>()).dump();
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        dump_canonical(e, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_canonical(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      throw ParseError("unsupported JSON value");
  }
}

std::string canonical(const json& j) {
  std::string out;
  dump_canonical(j, out);
  out += '\n';
  return out;
}

json num(Scalar v) {
  if (std::isinf(v)) return nullptr;
  return json(v);
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i)));
  return rows;
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

Scalar as_scalar(const json& j, const std::string& where, Scalar when_null = kInf) {
  if (j.is_null()) return when_null;
  if (!j.is_number()) throw ParseError("expected a number at " + where);
  return j.get<Scalar>();
}

Vector as_vector(const json& j, const std::string& where, Scalar when_null = kInf) {
  if (!j.is_array()) throw ParseError("expected an array at " + where);
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v(i) = as_scalar(j[static_cast<size_t>(i)], where, when_null);
  return v;
}

Matrix as_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("expected an array of rows at " + where);
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    Vector r = as_vector(j[static_cast<size_t>(i)], where);
    if (cols < 0) {
      cols = r.size();
      m.resize(rows, cols);
    }
    if (r.size() != cols) throw ParseError("ragged matrix at " + where);
    m.row(i) = r;
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

bool integral(Scalar v) { return std::floor(v) == v && std::abs(v) < 9e15; }

json interaction_json(const Matrix& c, const std::vector<Index>& opp_dims, Index own_dim) {
  // Emit the compressed {diag: [...]} form when every opponent block is a
  // square diagonal matrix.
  bool diagonal = true;
  Index at = 0;
  json diags = json::array();
  for (Index dj : opp_dims) {
    if (dj != own_dim) {
      diagonal = false;
      break;
    }
    json d = json::array();
    for (Index r = 0; r < dj && diagonal; ++r)
      for (Index col = 0; col < own_dim; ++col) {
        const Scalar v = c(at + r, col);
        if (r == col)
          d.push_back(num(v));
        else if (v != 0)
          diagonal = false;
      }
    diags.push_back(d);
    at += dj;
  }
  if (diagonal && at == c.rows()) return json{{"diag", diags}};
  return mat_json(c);
}

}  // namespace

std::string outcome_name(CnpOutcome o) {
  switch (o) {
    case CnpOutcome::Equilibrium: return "equilibrium";
    case CnpOutcome::NoEquilibrium: return "no-equilibrium";
    case CnpOutcome::TimeLimit: return "time-limit";
    case CnpOutcome::NumericFailure: return "numeric-failure";
  }
  return "unknown";
}

std::string serialize_instance(const Instance& inst) {
  const Game& g = inst.game;
  json players = json::array();
  for (Index i = 0; i < g.num_players(); ++i) {
    const Player& p = g.players[static_cast<size_t>(i)];
    std::vector<Index> opp_dims;
    for (Index j = 0; j < g.num_players(); ++j)
      if (j != i) opp_dims.push_back(g.players[static_cast<size_t>(j)].dim());
    json jp;
    jp["A"] = mat_json(p.feas.a());
    jp["b"] = vec_json(p.feas.b());
    jp["c"] = vec_json(p.c);
    jp["C"] = interaction_json(p.interaction, opp_dims, p.dim());
    jp["bounds"] = json{{"lb", vec_json(p.lb)}, {"ub", vec_json(p.ub)}};
    json ii = json::array();
    for (Index j : p.int_idx) ii.push_back(j);
    jp["int_idx"] = ii;
    players.push_back(jp);
  }
  json j;
  j["version"] = 1;
  j["sense"] = g.sense == Sense::Max ? "max" : "min";
  j["players"] = players;
  j["meta"] = json{{"family", inst.meta.family}, {"name", inst.meta.name}, {"seed", inst.meta.seed}};
  return canonical(j);
}

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance: top level must be an object");
  if (field(j, "version", "instance") != 1) throw ParseError("instance: unsupported version");
  const std::string sense = field(j, "sense", "instance").get<std::string>();
  if (sense != "min" && sense != "max") throw ParseError("instance: sense must be 'min' or 'max'");
  const json& jp = field(j, "players", "instance");
  if (!jp.is_array() || jp.empty()) throw ParseError("instance: players must be a nonempty array");

  Instance inst;
  inst.game.sense = sense == "max" ? Sense::Max : Sense::Min;
  const Index n = static_cast<Index>(jp.size());
  std::vector<Index> dims;
  for (Index i = 0; i < n; ++i) {
    const std::string where = "players[" + std::to_string(i) + "]";
    dims.push_back(static_cast<Index>(field(jp[static_cast<size_t>(i)], "c", where).size()));
    if (dims.back() == 0) throw ParseError(where + ": empty payoff vector");
  }

  for (Index i = 0; i < n; ++i) {
    const json& pj = jp[static_cast<size_t>(i)];
    const std::string where = "players[" + std::to_string(i) + "]";
    Player p;
    p.c = as_vector(field(pj, "c", where), where + ".c");
    const Index d = p.c.size();
    Index opp = 0;
    for (Index k = 0; k < n; ++k)
      if (k != i) opp += dims[static_cast<size_t>(k)];

    const json& cj = field(pj, "C", where);
    if (cj.is_object()) {
      const json& diags = field(cj, "diag", where + ".C");
      if (static_cast<Index>(diags.size()) != n - 1)
        throw ParseError(where + ".C.diag: needs one block per opponent");
      p.interaction = Matrix::Zero(opp, d);
      Index at = 0, block = 0;
      for (Index k = 0; k < n; ++k) {
        if (k == i) continue;
        const Index dk = dims[static_cast<size_t>(k)];
        if (dk != d) throw ParseError(where + ".C.diag: diagonal blocks need equal dimensions");
        const Vector diag = as_vector(diags[static_cast<size_t>(block)], where + ".C.diag");
        if (diag.size() != d) throw ParseError(where + ".C.diag: block size mismatch");
        p.interaction.block(at, 0, dk, d).diagonal() = diag;
        at += dk;
        ++block;
      }
    } else {
      p.interaction = as_matrix(cj, where + ".C");
      if (p.interaction.rows() != opp || p.interaction.cols() != d)
        throw ParseError(where + ".C: expected " + std::to_string(opp) + "x" + std::to_string(d));
    }

    Matrix a = as_matrix(field(pj, "A", where), where + ".A");
    Vector b = as_vector(field(pj, "b", where), where + ".b");
    if (a.rows() != b.size()) throw ParseError(where + ": A and b row counts differ");
    if (a.rows() > 0 && a.cols() != d) throw ParseError(where + ".A: column count mismatch");
    if (a.rows() == 0) a.resize(0, d);
    p.feas = Polyhedron(d, std::move(a), std::move(b));

    const json& bounds = field(pj, "bounds", where);
    p.lb = as_vector(field(bounds, "lb", where + ".bounds"), where + ".bounds.lb", 0.0);
    p.ub = as_vector(field(bounds, "ub", where + ".bounds"), where + ".bounds.ub", kInf);
    if (p.lb.size() != d || p.ub.size() != d) throw ParseError(where + ".bounds: size mismatch");

    for (const auto& e : field(pj, "int_idx", where)) {
      if (!e.is_number_integer()) throw ParseError(where + ".int_idx: expected integers");
      p.int_idx.push_back(e.get<Index>());
    }
    inst.game.players.push_back(std::move(p));
  }

  if (auto it = j.find("meta"); it != j.end() && it->is_object()) {
    if (auto f = it->find("family"); f != it->end()) inst.meta.family = f->get<std::string>();
    if (auto f = it->find("name"); f != it->end()) inst.meta.name = f->get<std::string>();
    if (auto f = it->find("seed"); f != it->end()) inst.meta.seed = f->get<long>();
  }
  try {
    inst.game.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  return inst;
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016" PRIx64, h);
  return buf;
}

Instance generate_knapsack(Index n, Index m, unsigned long seed) {
  if (n < 2 || m < 1) throw std::invalid_argument("generate_knapsack: need n >= 2, m >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&](long lo, long hi) {
    return static_cast<Scalar>(lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)));
  };

  Instance inst;
  inst.game.sense = Sense::Max;
  inst.meta.family = "knapsack";
  inst.meta.name = "kp-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" + std::to_string(seed);
  inst.meta.seed = static_cast<long>(seed);

  for (Index i = 0; i < n; ++i) {
    Player p;
    p.c = Vector(m);
    for (Index j = 0; j < m; ++j) p.c(j) = draw(1, 100);
    Vector w(m);
    for (Index j = 0; j < m; ++j) w(j) = draw(1, 100);
    const Scalar cap = std::floor(0.5 * w.sum());
    Matrix a(1, m);
    a.row(0) = w;
    p.feas = Polyhedron(m, std::move(a), Vector::Constant(1, cap));
    p.interaction = Matrix::Zero((n - 1) * m, m);
    for (Index k = 0; k < n - 1; ++k)
      for (Index j = 0; j < m; ++j) p.interaction(k * m + j, j) = draw(-50, 50);
    p.lb = Vector::Zero(m);
    p.ub = Vector::Ones(m);
    for (Index j = 0; j < m; ++j) p.int_idx.push_back(j);
    inst.game.players.push_back(std::move(p));
  }
  return inst;
}

std::string serialize_result(const ResultData& r) {
  json j;
  j["version"] = 1;
  j["instance_hash"] = r.instance_hash;
  j["outcome"] = r.outcome;
  j["config"] = json{{"backend", r.backend}, {"cuts", r.cuts},     {"eps", r.eps},
                     {"objective", r.objective}, {"time_limit", r.time_limit}};
  json profile = json::array();
  for (size_t i = 0; i < r.profile.size(); ++i) {
    const MixedStrategy& s = r.profile[i];
    json support = json::array();
    for (Index k = 0; k < s.support_size(); ++k)
      support.push_back(json{{"prob", s.probs()(k)}, {"x", vec_json(s.points()[static_cast<size_t>(k)])}});
    json entry{{"support", support}};
    if (r.regrets.size() > static_cast<Index>(i)) entry["regret"] = r.regrets(static_cast<Index>(i));
    profile.push_back(entry);
  }
  j["profile"] = profile;
  j["stats"] = json{{"branchings", r.branchings},
                    {"cuts", json{{"cover", r.cut_stats.cover},
                                  {"disjunctive", r.cut_stats.disjunctive},
                                  {"eso", r.cut_stats.eso},
                                  {"total", r.cut_stats.total},
                                  {"value", r.cut_stats.value}}},
                    {"iterations", r.iterations},
                    {"wall_time", r.wall_time}};
  j["welfare"] = r.welfare;
  return canonical(j);
}

ResultData parse_result(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || field(j, "version", "result") != 1)
    throw ParseError("result: unsupported file");
  ResultData r;
  r.instance_hash = field(j, "instance_hash", "result").get<std::string>();
  r.outcome = field(j, "outcome", "result").get<std::string>();
  const json& cfg = field(j, "config", "result");
  r.backend = field(cfg, "backend", "config").get<std::string>();
  r.cuts = field(cfg, "cuts", "config").get<int>();
  r.eps = field(cfg, "eps", "config").get<Scalar>();
  r.objective = field(cfg, "objective", "config").get<std::string>();
  r.time_limit = field(cfg, "time_limit", "config").get<Scalar>();
  const json& prof = field(j, "profile", "result");
  std::vector<Scalar> regrets;
  for (const auto& pe : prof) {
    std::vector<Vector> pts;
    std::vector<Scalar> probs;
    for (const auto& se : field(pe, "support", "profile")) {
      pts.push_back(as_vector(field(se, "x", "support"), "support.x"));
      probs.push_back(field(se, "prob", "support").get<Scalar>());
    }
    try {
      r.profile.emplace_back(pts, Eigen::Map<Vector>(probs.data(), static_cast<Index>(probs.size())));
    } catch (const std::exception& e) {
      throw ParseError(std::string("result profile: ") + e.what());
    }
    regrets.push_back(pe.contains("regret") ? pe["regret"].get<Scalar>() : 0.0);
  }
  r.regrets = Eigen::Map<Vector>(regrets.data(), static_cast<Index>(regrets.size()));
  const json& stats = field(j, "stats", "result");
  r.iterations = field(stats, "iterations", "stats").get<int>();
  r.branchings = field(stats, "branchings", "stats").get<int>();
  r.wall_time = field(stats, "wall_time", "stats").get<double>();
  const json& cuts = field(stats, "cuts", "stats");
  r.cut_stats.total = field(cuts, "total", "cuts").get<long>();
  r.cut_stats.eso = field(cuts, "eso", "cuts").get<long>();
  r.cut_stats.value = field(cuts, "value", "cuts").get<long>();
  r.cut_stats.cover = field(cuts, "cover", "cuts").get<long>();
  r.cut_stats.disjunctive = field(cuts, "disjunctive", "cuts").get<long>();
  r.welfare = field(j, "welfare", "result").get<Scalar>();
  return r;
}

std::string iteration_json(const IterationRecord& rec) {
  json cuts = json::array();
  for (const auto& [player, kind] : rec.cuts) cuts.push_back(json{{"kind", kind}, {"player", player}});
  json j{{"answers", rec.answers}, {"cuts", cuts}, {"lcp", rec.lcp}, {"t", rec.t},
         {"welfare", rec.welfare}};
  std::string out;
  dump_canonical(j, out);
  return out;
}

}  // namespace cutplay
