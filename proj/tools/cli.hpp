#pragma once

// ippmm command line: solve / generate / check. run_cli is kept separate from
// main so the test suite can drive it with captured streams.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "ippmm/ippmm.hpp"

namespace ippmm::cli {

using nlohmann::ordered_json;

enum ExitCode : int { Ok = 0, InputError = 1, NotConverged = 2, PathologicalExit = 3 };

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline int upper_nnz(const SymMatrix& a) {
  int count = 0;
  for (int j = 0; j < a.dim(); ++j)
    for (int i = 0; i <= j; ++i) count += a(i, j) != 0.0;
  return count;
}

inline ordered_json problem_digest(const SdpProblem& p) {
  int nnz_a = 0;
  for (const auto& a : p.constraint_mats()) nnz_a += upper_nnz(a);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(write_sdpa(p))));
  return {{"n", p.n()}, {"m", p.m()}, {"nnz_cost", upper_nnz(p.cost())}, {"nnz_constraints", nnz_a},
          {"hash_fnv1a", hash}};
}

inline ordered_json config_echo(const SolverConfig& c, std::uint64_t seed) {
  ordered_json j;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_outer_iters;
  j["mode"] = c.mode == NewtonMode::Exact ? "exact" : "inexact";
  j["rho"] = c.rho;
  j["sigma_min"] = c.sigma_min;
  j["sigma_max"] = c.sigma_max;
  j["kn"] = c.K_N ? ordered_json(*c.K_N) : ordered_json("auto");
  j["gamma_s"] = c.gamma_S;
  j["gamma_mu"] = c.gamma_mu;
  j["k_dagger"] = c.k_dagger;
  j["big_k_dagger"] = c.K_dagger;
  j["dense_cap"] = c.dense_cap;
  j["seed"] = seed;
  return j;
}

inline ordered_json matrix_json(const SymMatrix& a) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < a.dim(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < a.dim(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline ordered_json report_json(const SdpProblem& p, const SolveReport& r, const SolverConfig& cfg,
                                std::uint64_t seed) {
  ordered_json j;
  j["status"] = std::string(status_name(r.status));
  j["pathology"] = r.pathology ? ordered_json(std::string(pathology_name(*r.pathology))) : ordered_json();
  j["iterations"] = r.iterations();
  j["objective_primal"] = primal_objective(p, r.iterate.X);
  j["objective_dual"] = dual_objective(p, r.iterate.y);
  j["final_residuals"] = {{"primal", r.final_residuals.primal_res},
                          {"dual", r.final_residuals.dual_res},
                          {"gap", r.final_residuals.gap}};
  ordered_json trace = ordered_json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"k", t.k},
                     {"mu", t.mu},
                     {"alpha", t.alpha},
                     {"sigma", t.sigma},
                     {"two_norm", t.two_norm},
                     {"semi_norm", t.semi_norm},
                     {"compl_dev", t.compl_dev},
                     {"prox_updated", t.prox_updated},
                     {"krylov_iters", t.krylov_iters}});
  j["trace"] = std::move(trace);
  j["config"] = config_echo(cfg, seed);
  j["problem"] = problem_digest(p);
  return j;
}

inline ordered_json solution_json(const SymMatrix& x, const Vector& y, const SymMatrix& z) {
  return {{"X", matrix_json(x)}, {"y", vector_json(y)}, {"Z", matrix_json(z)}};
}

struct Solution {
  SymMatrix X;
  Vector y;
  SymMatrix Z;
};

inline SymMatrix matrix_from_json(const ordered_json& j, int n, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw Error(Errc::DimensionMismatch, std::string(name) + " must have " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw Error(Errc::DimensionMismatch, std::string(name) + " row " + std::to_string(i) + " has wrong length");
    for (int k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return SymMatrix(m);
}

inline Solution read_solution(const std::string& path, int n, int m) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SyntaxError, "solution file: " + std::string(e.what()));
  }
  if (!j.contains("X") || !j.contains("y") || !j.contains("Z"))
    throw Error(Errc::InvalidArgument, "solution file needs fields X, y, Z");
  const auto& jy = j["y"];
  if (!jy.is_array() || static_cast<int>(jy.size()) != m)
    throw Error(Errc::DimensionMismatch, "y must have " + std::to_string(m) + " entries");
  Vector y(m);
  for (int i = 0; i < m; ++i) y(i) = jy[static_cast<std::size_t>(i)].get<double>();
  return {matrix_from_json(j["X"], n, "X"), std::move(y), matrix_from_json(j["Z"], n, "Z")};
}

inline void write_json_file(const ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximal interior point solver for linear semidefinite programs"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SolverConfig cfg;
  std::string mode = "exact";
  std::optional<double> kn;
  std::uint64_t seed = 0;
  std::string json_out;
  bool quiet = false;

  auto* solve_cmd = app.add_subcommand("solve", "solve an SDPA instance");
  std::string solve_path;
  solve_cmd->add_option("file", solve_path, "SDPA sparse file")->required();
  solve_cmd->add_option("--tol", cfg.tol, "termination tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iter", cfg.max_outer_iters, "outer iteration cap")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--mode", mode, "Newton backend")->check(CLI::IsMember({"exact", "inexact"}));
  solve_cmd->add_option("--rho", cfg.rho, "starting point scale");
  solve_cmd->add_option("--sigma-min", cfg.sigma_min, "lower centering bound");
  solve_cmd->add_option("--sigma-max", cfg.sigma_max, "upper centering bound");
  solve_cmd->add_option("--kn", kn, "two-norm neighbourhood constant (default: from starting residuals)");
  solve_cmd->add_option("--gamma-s", cfg.gamma_S, "semi-norm neighbourhood constant");
  solve_cmd->add_option("--gamma-mu", cfg.gamma_mu, "centrality neighbourhood constant");
  solve_cmd->add_option("--k-dagger", cfg.k_dagger, "iterations without a proximal update before divergence counts");
  solve_cmd->add_option("--big-k-dagger", cfg.K_dagger, "divergence threshold on the proximal drift");
  solve_cmd->add_option("--dense-cap", cfg.dense_cap, "largest n for dense factorizations");
  solve_cmd->add_option("--json-out", json_out, "write the report as JSON");
  solve_cmd->add_option("--seed", seed, "echoed into the report; the solver is deterministic");
  solve_cmd->add_flag("--quiet", quiet, "suppress the summary");

  auto* gen_cmd = app.add_subcommand("generate", "write a test instance");
  std::string kind, gen_out;
  int gen_n = 4, gen_m = 3, gen_r = 2;
  gen_cmd->add_option("kind", kind, "feasible or infeasible")->required()->check(CLI::IsMember({"feasible", "infeasible"}));
  gen_cmd->add_option("--n", gen_n, "matrix dimension");
  gen_cmd->add_option("--m", gen_m, "number of constraints (feasible only)");
  gen_cmd->add_option("--rank", gen_r, "rank of the primal solution (feasible only)");
  gen_cmd->add_option("--seed", seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "output SDPA path")->required();

  auto* check_cmd = app.add_subcommand("check", "KKT residuals of a solution file");
  std::string check_path, sol_path;
  check_cmd->add_option("file", check_path, "SDPA sparse file")->required();
  check_cmd->add_option("solution", sol_path, "JSON with X, y, Z")->required();
  check_cmd->add_option("--tol", cfg.tol, "acceptance tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : InputError;
  }

  try {
    if (*solve_cmd) {
      cfg.mode = mode == "exact" ? NewtonMode::Exact : NewtonMode::Inexact;
      cfg.K_N = kn;
      cfg.validate();
      const SdpProblem p = read_sdpa_file(solve_path);
      const RankReport rank = validate_rank(p);
      if (!rank.full_row_rank && !quiet)
        err << "warning: constraint matrices have rank " << rank.rank << " < m = " << p.m() << "\n";
      const SolveReport r = solve(p, cfg);
      if (!json_out.empty()) write_json_file(report_json(p, r, cfg, seed), json_out);
      if (!quiet) {
        out << std::setprecision(10);
        out << "status: " << status_name(r.status);
        if (r.pathology) out << " (" << pathology_name(*r.pathology) << ")";
        out << "\niterations: " << r.iterations() << "\n";
        out << "objective primal: " << primal_objective(p, r.iterate.X) << "\n";
        out << "objective dual: " << dual_objective(p, r.iterate.y) << "\n";
        out << "residuals: primal " << r.final_residuals.primal_res << ", dual " << r.final_residuals.dual_res
            << ", gap " << r.final_residuals.gap << "\n";
      }
      switch (r.status) {
        case SolveStatus::Optimal: return Ok;
        case SolveStatus::MaxIterations: return NotConverged;
        case SolveStatus::Pathological: return PathologicalExit;
      }
    }
    if (*gen_cmd) {
      if (kind == "infeasible") {
        if (gen_n < 1) throw Error(Errc::InvalidArgument, "n must be >= 1");
        write_sdpa_file(gen_infeasible_trace(gen_n), gen_out);
        return Ok;
      }
      const FeasibleInstance inst = gen_feasible(gen_n, gen_m, gen_r, seed);
      write_sdpa_file(inst.problem, gen_out);
      ordered_json sol = solution_json(inst.X, inst.y, inst.Z);
      sol["value"] = primal_objective(inst.problem, inst.X);
      write_json_file(sol, gen_out + ".solution.json");
      return Ok;
    }
    if (*check_cmd) {
      const SdpProblem p = read_sdpa_file(check_path);
      const Solution s = read_solution(sol_path, p.n(), p.m());
      const KktResiduals r = kkt_residuals(p, s.X, s.y, s.Z);
      out << std::setprecision(10) << "primal_res: " << r.primal_res << "\ndual_res: " << r.dual_res
          << "\ngap: " << r.gap << "\n";
      return r.primal_res < cfg.tol && r.dual_res < cfg.tol && r.gap < cfg.tol ? Ok : NotConverged;
    }
  } catch (const SyntaxError& e) {
    err << "error: line " << e.line() << ": " << e.reason() << "\n";
    return InputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return InputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return InputError;
  }
  return InputError;
}

}  // namespace ippmm::cli
