#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cutplay/baselines.hpp"
#include "cutplay/cnp.hpp"
#include "cutplay/io.hpp"

namespace fs = std::filesystem;
using namespace cutplay;

namespace {

enum class LogLevel { Quiet, Info, Trace };

LogLevel log_level() {
  const char* env = std::getenv("CUTPLAY_LOG");
  if (!env) return LogLevel::Info;
  const std::string v = env;
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "trace") return LogLevel::Trace;
  return LogLevel::Info;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct SolveFlags {
  std::string objective = "F";
  int cuts = -1;
  std::string backend = "lemke";
  Scalar eps = 3e-5;
  Scalar time_limit = 300;
  long seed = 0;  // accepted for interface stability; the solver is deterministic
};

CnpConfig to_config(const SolveFlags& f, LogLevel lvl) {
  CnpConfig cfg;
  cfg.eps = f.eps;
  cfg.time_limit = f.time_limit;
  cfg.objective = f.objective == "Q" ? ObjectiveMode::Welfare : ObjectiveMode::Feasibility;
  cfg.cut_aggressiveness = f.cuts;
  cfg.backend = f.backend == "enum" ? LcpBackend::Enumerate : LcpBackend::Lemke;
  if (lvl == LogLevel::Trace)
    cfg.on_iteration = [](const IterationRecord& rec) { std::cerr << iteration_json(rec) << "\n"; };
  return cfg;
}

int exit_code(CnpOutcome o) {
  switch (o) {
    case CnpOutcome::Equilibrium: return 0;
    case CnpOutcome::NoEquilibrium: return 2;
    case CnpOutcome::TimeLimit: return 3;
    case CnpOutcome::NumericFailure: return 4;
  }
  return 4;
}

ResultData run_solve(const Instance& inst, const std::string& canonical_text,
                     const SolveFlags& flags, LogLevel lvl) {
  CnpConfig cfg = to_config(flags, lvl);
  const auto start = std::chrono::steady_clock::now();
  CnpResult res = cut_and_play(inst.game, cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ResultData out;
  out.instance_hash = content_hash(canonical_text);
  out.outcome = outcome_name(res.outcome);
  out.eps = flags.eps;
  out.time_limit = flags.time_limit;
  out.objective = flags.objective;
  out.cuts = flags.cuts;
  out.backend = flags.backend;
  out.profile = res.profile;
  out.regrets = res.regrets;
  out.welfare = res.welfare;
  out.iterations = res.iterations;
  out.branchings = res.branchings;
  out.cut_stats = res.cuts;
  out.wall_time = wall;
  if (lvl != LogLevel::Quiet) {
    std::cerr << "outcome: " << out.outcome << " (" << out.iterations << " iterations, "
              << out.cut_stats.total << " cuts, " << wall << " s)\n";
    for (const std::string& line : res.log) std::cerr << "  " << line << "\n";
  }
  return out;
}

int cmd_generate(Index n, Index m, unsigned long seed, const std::string& family,
                 const std::string& out_path) {
  if (family != "knapsack") {
    std::cerr << "error: unknown family '" << family << "'\n";
    return 1;
  }
  const Instance inst = generate_knapsack(n, m, seed);
  const std::string text = serialize_instance(inst);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

int cmd_solve(const std::string& instance_path, const SolveFlags& flags,
              const std::string& out_path) {
  Instance inst;
  std::string canonical_text;
  try {
    inst = parse_instance(read_file(instance_path));
    canonical_text = serialize_instance(inst);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const LogLevel lvl = log_level();
  ResultData res = run_solve(inst, canonical_text, flags, lvl);
  const std::string text = serialize_result(res);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  if (res.outcome == "equilibrium") return 0;
  if (res.outcome == "no-equilibrium") return 2;
  if (res.outcome == "time-limit") return 3;
  return 4;
}

int cmd_verify(const std::string& instance_path, const std::string& result_path, bool oracle) {
  Instance inst;
  ResultData res;
  std::string canonical_text;
  try {
    inst = parse_instance(read_file(instance_path));
    canonical_text = serialize_instance(inst);
    res = parse_result(read_file(result_path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (res.instance_hash != content_hash(canonical_text)) {
    std::cerr << "error: result hash " << res.instance_hash << " does not match instance hash "
              << content_hash(canonical_text) << "\n";
    return 1;
  }
  if (res.outcome != "equilibrium") {
    std::cout << "outcome '" << res.outcome << "' carries no equilibrium claim; nothing to check\n";
    return 0;
  }
  RegretReport rep;
  try {
    rep = oracle ? oracle_verify(inst.game, res.profile, res.eps)
                 : verify_equilibrium(inst.game, res.profile, res.eps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!rep.supports_valid) {
    std::cerr << "rejected: " << rep.message << "\n";
    return 1;
  }
  std::cout << "max regret " << rep.max_regret << " (eps " << res.eps << ", "
            << (oracle ? "enumeration" : "best-response") << " check)\n";
  return rep.equilibrium ? 0 : 1;
}

struct BenchConfig {
  SolveFlags flags;
  std::string label;
};

BenchConfig parse_bench_config(const std::string& spec) {
  // "OBJ:CUTS" or "OBJ:CUTS:BACKEND", e.g. "F:-1" or "Q:1:enum"
  BenchConfig bc;
  bc.label = spec;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.empty() || parts.size() > 3) throw std::runtime_error("bad config '" + spec + "'");
  if (parts[0] != "F" && parts[0] != "Q") throw std::runtime_error("bad objective in '" + spec + "'");
  bc.flags.objective = parts[0];
  if (parts.size() > 1) {
    bc.flags.cuts = std::stoi(parts[1]);
    if (bc.flags.cuts < -1 || bc.flags.cuts > 1)
      throw std::runtime_error("bad cut aggressiveness in '" + spec + "'");
  }
  if (parts.size() > 2) {
    if (parts[2] != "lemke" && parts[2] != "enum")
      throw std::runtime_error("bad backend in '" + spec + "'");
    bc.flags.backend = parts[2];
  }
  return bc;
}

int cmd_bench(const std::string& dir, const std::vector<std::string>& config_specs, Scalar eps,
              Scalar time_limit, const std::string& out_csv) {
  std::vector<BenchConfig> configs;
  try {
    for (const std::string& s : config_specs) configs.push_back(parse_bench_config(s));
    if (configs.empty()) configs.push_back(parse_bench_config("F:-1"));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (BenchConfig& bc : configs) {
    bc.flags.eps = eps;
    bc.flags.time_limit = time_limit;
  }

  std::vector<std::string> paths;
  try {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        paths.push_back(entry.path().string());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::sort(paths.begin(), paths.end());

  std::ostringstream csv;
  csv << "instance,config,outcome,time,iterations,branchings,cuts_total,cuts_value,cuts_eso,"
         "cuts_cover,cuts_disjunctive,welfare\n";
  for (const BenchConfig& bc : configs) {
    std::vector<double> times;
    for (const std::string& path : paths) {
      const std::string name = fs::path(path).filename().string();
      try {
        const Instance inst = parse_instance(read_file(path));
        const ResultData r =
            run_solve(inst, serialize_instance(inst), bc.flags, LogLevel::Quiet);
        csv << name << "," << bc.label << "," << r.outcome << "," << r.wall_time << ","
            << r.iterations << "," << r.branchings << "," << r.cut_stats.total << ","
            << r.cut_stats.value << "," << r.cut_stats.eso << "," << r.cut_stats.cover << ","
            << r.cut_stats.disjunctive << "," << r.welfare << "\n";
        times.push_back(r.wall_time);
      } catch (const std::exception& e) {
        csv << name << "," << bc.label << ",error,,,,,,,,,\n";
        std::cerr << "bench: " << name << " failed: " << e.what() << "\n";
      }
    }
    if (!times.empty()) {
      // shifted geometric mean of the wall times, shift 10 s
      double acc = 0;
      for (double t : times) acc += std::log(t + 10.0);
      const double sgm = std::exp(acc / static_cast<double>(times.size())) - 10.0;
      csv << "summary," << bc.label << ",sgm," << sgm << ",,,,,,,,\n";
    }
  }
  if (out_csv.empty())
    std::cout << csv.str();
  else
    write_file(out_csv, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of reciprocally-bilinear games over nonconvex strategy sets"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a random instance");
  Index gen_n = 2, gen_m = 3;
  unsigned long gen_seed = 0;
  std::string gen_family = "knapsack", gen_out;
  gen->add_option("-n,--players", gen_n, "Number of players (>= 2)");
  gen->add_option("-m,--items", gen_m, "Items per player (>= 1)");
  gen->add_option("-s,--seed", gen_seed, "Random seed");
  gen->add_option("--family", gen_family, "Instance family");
  gen->add_option("-o,--out", gen_out, "Output path (stdout when omitted)");

  auto* solve = app.add_subcommand("solve", "Solve an instance");
  std::string solve_instance, solve_out;
  SolveFlags flags;
  solve->add_option("instance", solve_instance, "Instance JSON path")->required();
  solve->add_option("--objective", flags.objective, "Objective mode: F or Q")
      ->check(CLI::IsMember({"F", "Q"}));
  solve->add_option("--cuts", flags.cuts, "Cut aggressiveness: -1, 0, or 1")
      ->check(CLI::Range(-1, 1));
  solve->add_option("--backend", flags.backend, "Complementarity backend: lemke or enum")
      ->check(CLI::IsMember({"lemke", "enum"}));
  solve->add_option("--eps", flags.eps, "Equilibrium tolerance");
  solve->add_option("--time-limit", flags.time_limit, "Wall-clock limit in seconds");
  solve->add_option("--seed", flags.seed, "Accepted for compatibility (solver is deterministic)");
  solve->add_option("-o,--out", solve_out, "Result path (stdout when omitted)");

  auto* verify = app.add_subcommand("verify", "Re-check a result against its instance");
  std::string ver_instance, ver_result;
  bool ver_oracle = false;
  verify->add_option("instance", ver_instance, "Instance JSON path")->required();
  verify->add_option("result", ver_result, "Result JSON path")->required();
  verify->add_flag("--oracle", ver_oracle, "Use the enumeration oracle instead of LP/MILP");

  auto* bench = app.add_subcommand("bench", "Run a directory of instances over a config matrix");
  std::string bench_dir, bench_out;
  std::vector<std::string> bench_configs;
  Scalar bench_eps = 3e-5, bench_tl = 300;
  bench->add_option("dir", bench_dir, "Directory of instance JSON files")->required();
  bench->add_option("-c,--config", bench_configs,
                    "Config OBJ:CUTS[:BACKEND], e.g. F:-1 or Q:1:enum (repeatable)");
  bench->add_option("--eps", bench_eps, "Equilibrium tolerance");
  bench->add_option("--time-limit", bench_tl, "Per-instance wall-clock limit in seconds");
  bench->add_option("-o,--out", bench_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_n, gen_m, gen_seed, gen_family, gen_out);
    if (solve->parsed()) return cmd_solve(solve_instance, flags, solve_out);
    if (verify->parsed()) return cmd_verify(ver_instance, ver_result, ver_oracle);
    if (bench->parsed()) return cmd_bench(bench_dir, bench_configs, bench_eps, bench_tl, bench_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
