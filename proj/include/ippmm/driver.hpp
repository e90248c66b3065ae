#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ippmm/newton.hpp"

namespace ippmm {

enum class NewtonMode { Exact, Inexact };
enum class SigmaPolicy { Midpoint, Fixed, Adaptive };

struct SolverConfig {
  double tol = 1e-6;
  double sigma_min = 0.05;
  double sigma_max = 0.45;
  SigmaPolicy sigma_policy = SigmaPolicy::Midpoint;
  double sigma_fixed = 0.25;  // used by SigmaPolicy::Fixed
  double rho = 1.0;
  int max_outer_iters = 300;
  double backtrack_factor = 0.7;
  double alpha_min = 1e-10;
  NewtonMode mode = NewtonMode::Exact;
  int k_dagger = 40;
  double K_dagger = 10.0;
  int dense_cap = 64;
  std::optional<double> K_N;  // unset: 10 * max(1, ||(b_bar, C_bar)||_2)
  double gamma_S = 0.9;
  double gamma_mu = 0.3;
  double tol_scale = 1.0;    // inexact mode: scales both accuracy bounds
  int diagnostics_cap = 10;  // scaled direction norms are traced only for n <= cap

  void validate() const {
    if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
    if (!(sigma_min > 0.0 && sigma_min <= sigma_max && sigma_max <= 0.5))
      throw Error(Errc::InvalidArgument, "need 0 < sigma_min <= sigma_max <= 0.5");
    if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be positive");
    if (max_outer_iters < 0) throw Error(Errc::InvalidArgument, "max_outer_iters must be >= 0");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw Error(Errc::InvalidArgument, "backtrack_factor must lie in (0,1)");
    if (!(alpha_min > 0.0 && alpha_min <= 1.0))
      throw Error(Errc::InvalidArgument, "alpha_min must lie in (0,1]");
    if (k_dagger < 1) throw Error(Errc::InvalidArgument, "k_dagger must be >= 1");
    if (!(K_dagger > 0.0)) throw Error(Errc::InvalidArgument, "K_dagger must be positive");
    if (K_N && !(*K_N > 0.0)) throw Error(Errc::InvalidArgument, "K_N must be positive");
    if (!(gamma_S > 0.0 && gamma_S < 1.0)) throw Error(Errc::InvalidArgument, "gamma_S must lie in (0,1)");
    if (!(gamma_mu > 0.0 && gamma_mu < 1.0)) throw Error(Errc::InvalidArgument, "gamma_mu must lie in (0,1)");
    if (!(tol_scale > 0.0)) throw Error(Errc::InvalidArgument, "tol_scale must be positive");
  }
};

enum class SolveStatus { Optimal, MaxIterations, Pathological };
enum class PathologyReason { Divergence, Stall };

inline constexpr std::string_view status_name(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Pathological: return "Pathological";
  }
  return "Unknown";
}

inline constexpr std::string_view pathology_name(PathologyReason r) noexcept {
  return r == PathologyReason::Divergence ? "Divergence" : "Stall";
}

struct TraceRecord {
  int k;
  double mu;       // mu_k
  double mu_next;  // mu_{k+1}; equals mu on a stalled iteration
  double alpha;    // 0 on a stalled iteration
  double sigma;
  double two_norm;   // regularized residuals of the accepted point
  double semi_norm;  //   against the proximal estimates used in the
  double compl_dev;  //   line search
  bool prox_updated;
  int krylov_iters;
  int line_search_trials;
  bool stalled;
  std::optional<ScaledNorms> scaled;  // n <= diagnostics_cap only
};

struct SolveReport {
  SolveStatus status;
  std::optional<PathologyReason> pathology;
  Iterate iterate;
  std::vector<TraceRecord> trace;
  KktResiduals final_residuals;
  RankReport rank;
  int prox_updates = 0;
  double wall_time = 0.0;  // seconds

  int iterations() const noexcept { return static_cast<int>(trace.size()); }
};

/// Everything one outer iteration saw; handed to SolveHooks::on_iteration.
/// direction is null and accepted is empty when the iteration stalled.
struct IterationEvent {
  int k;
  const Iterate& current;
  const ProxState& prox_before;
  double sigma;
  const NewtonDirection* direction;
  const Iterate* accepted;
  double alpha;
  const ProxState& prox_after;
  bool prox_updated;
};

struct SolveHooks {
  std::function<void(const IterationEvent&)> on_iteration;
};

/// X0 = Z0 = rho I, y0 = 0, mu0 = rho^2, Xi0 = X0, lambda0 = y0. The
/// residual offsets are b_bar = A X0 - b and C_bar = A^* y0 + Z0 - C, so the
/// starting point sits in the neighbourhood with zero scaled infeasibility.
inline std::pair<Iterate, ProxState> starting_point(const SdpProblem& p, const SolverConfig& cfg) {
  const int n = p.n();
  SymMatrix x0 = cfg.rho * SymMatrix::identity(n);
  SymMatrix z0 = cfg.rho * SymMatrix::identity(n);
  Vector y0 = Vector::Zero(p.m());
  Iterate start = Iterate::make(x0, y0, z0);

  Vector b_bar = apply_A(p, x0) - p.rhs();
  SymMatrix c_bar = apply_Astar(p, y0) + z0 - p.cost();
  const double k_n = cfg.K_N.value_or(10.0 * std::max(1.0, joint_norm(b_bar, c_bar)));
  NeighbourhoodParams params{k_n, cfg.gamma_S, cfg.gamma_mu, cfg.rho, start.mu,
                             std::move(b_bar), std::move(c_bar)};
  params.validate();
  ProxState prox{x0, y0, std::move(params)};
  return {std::move(start), std::move(prox)};
}

/// mu_ratio is mu_k / mu_{k-1}; only the adaptive policy reads it.
inline double choose_sigma(int k, const SolverConfig& cfg, std::optional<double> mu_ratio = {}) {
  const double mid = 0.5 * (cfg.sigma_min + cfg.sigma_max);
  switch (cfg.sigma_policy) {
    case SigmaPolicy::Midpoint: return mid;
    case SigmaPolicy::Fixed: return std::clamp(cfg.sigma_fixed, cfg.sigma_min, cfg.sigma_max);
    case SigmaPolicy::Adaptive:
      if (k == 0 || !mu_ratio) return mid;
      return std::max(cfg.sigma_min, std::min(cfg.sigma_max, *mu_ratio));
  }
  return mid;
}

struct LineSearchResult {
  double alpha;
  Iterate next;
  RegResiduals residuals;
  int trials;
};

/// Backtracks from alpha = 1 by cfg.backtrack_factor until
///   mu(alpha) <= (1 - 0.01 alpha) mu  and  the trial point lies in
///   N_{mu(alpha)}(Xi, lambda).
/// Throws StepTooSmall once alpha drops below cfg.alpha_min.
inline LineSearchResult line_search(const SdpProblem& p, const SeminormEvaluator& ev,
                                    const Iterate& s, const ProxState& prox,
                                    const NewtonDirection& dir, const SolverConfig& cfg) {
  const int n = p.n();
  int trials = 0;
  for (double alpha = 1.0; alpha >= cfg.alpha_min; alpha *= cfg.backtrack_factor) {
    ++trials;
    SymMatrix x = s.X + alpha * dir.dX;
    SymMatrix z = s.Z + alpha * dir.dZ;
    const double mu = frob_inner(x, z) / n;
    if (!(mu <= (1.0 - 0.01 * alpha) * s.mu)) continue;
    Vector y = s.y + alpha * dir.dy;
    std::optional<RegResiduals> res;
    if (!check_neighbourhood(p, prox.params, ev, x, y, z, prox.Xi, prox.lambda, mu, &res)) continue;
    return {alpha, Iterate{std::move(x), std::move(y), std::move(z), mu}, std::move(*res), trials};
  }
  throw Error(Errc::StepTooSmall, "no step above alpha_min = " + std::to_string(cfg.alpha_min) +
                                      " after " + std::to_string(trials) + " trials");
}

/// Replaces (Xi, lambda) by (X, y) when the unregularized scaled residuals
///   r_p = A X - (b + (mu/mu0) b_bar),  R_d = (C + (mu/mu0) C_bar) - A^* y - Z
/// satisfy both neighbourhood bounds.
inline std::pair<ProxState, bool> maybe_update_prox(const SdpProblem& p, const SeminormEvaluator& ev,
                                                    const Iterate& next, const ProxState& prox) {
  const auto& par = prox.params;
  const double scale = next.mu / par.mu0;
  const Vector r_p = apply_A(p, next.X) - (p.rhs() + scale * par.b_bar);
  const SymMatrix r_d = (p.cost() + scale * par.C_bar) - apply_Astar(p, next.y) - next.Z;
  const bool update = joint_norm(r_p, r_d) <= par.two_norm_bound(next.mu) &&
                      ev.eval(r_p, r_d) <= par.semi_norm_bound(next.mu);
  if (!update) return {prox, false};
  return {ProxState{next.X, next.y, par}, true};
}

/// Drift of the iterate from its proximal estimates, ||(vec(X - Xi), y - lambda)||_2.
inline double prox_drift(const SymMatrix& x, const SymMatrix& xi, const Vector& y,
                         const Vector& lambda) {
  return joint_norm(y - lambda, x - xi);
}

/// True once the current sub-problem has run for k_dagger iterations without
/// a proximal update and the iterate has drifted beyond K_dagger.
inline bool pathology_check(int prox_age, const SymMatrix& x, const SymMatrix& xi, const Vector& y,
                            const Vector& lambda, const SolverConfig& cfg) {
  return prox_age >= cfg.k_dagger && prox_drift(x, xi, y, lambda) > cfg.K_dagger;
}

inline NewtonDirection compute_direction(const SdpProblem& p, const SeminormEvaluator& ev,
                                         const Iterate& s, const ProxState& prox, double sigma,
                                         const SolverConfig& cfg) {
  const NewtonRhs rhs = assemble_rhs(p, s, prox, sigma);
  if (cfg.mode == NewtonMode::Exact) return solve_exact(p, s, rhs, cfg.dense_cap);
  return solve_inexact(p, ev, s, prox.params, rhs, {cfg.sigma_min, cfg.tol_scale});
}

inline SolveReport solve(const SdpProblem& p, const SolverConfig& cfg, const SolveHooks& hooks = {}) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SeminormEvaluator ev = SeminormEvaluator::build(p);
  auto [state, prox] = starting_point(p, cfg);

  SolveReport report{SolveStatus::MaxIterations, std::nullopt, state, {}, {}, {ev.rank(), ev.full_row_rank()}};
  int prox_age = 0;
  int stalls = 0;
  std::optional<double> mu_ratio;

  auto finish = [&](SolveStatus status) {
    report.status = status;
    report.iterate = state;
    report.final_residuals = kkt_residuals(p, state.X, state.y, state.Z);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
  };

  for (int k = 0;; ++k) {
    const KktResiduals kkt = kkt_residuals(p, state.X, state.y, state.Z);
    if (kkt.primal_res < cfg.tol && kkt.dual_res < cfg.tol && state.mu < cfg.tol)
      return finish(SolveStatus::Optimal);
    if (k >= cfg.max_outer_iters) return finish(SolveStatus::MaxIterations);

    // After a stall, retry with the most conservative centering.
    const double sigma = stalls > 0 ? cfg.sigma_max : choose_sigma(k, cfg, mu_ratio);

    std::optional<NewtonDirection> dir;
    std::optional<LineSearchResult> step;
    try {
      dir = compute_direction(p, ev, state, prox, sigma, cfg);
      step = line_search(p, ev, state, prox, *dir, cfg);
    } catch (const Error&) {
      // Newton or line-search failure: the iterate is kept and the stall counted.
    }

    if (!step) {
      ++stalls;
      report.trace.push_back({k, state.mu, state.mu, 0.0, sigma, 0.0, 0.0, 0.0, false,
                              dir ? dir->krylov_iters : 0, 0, true, std::nullopt});
      if (hooks.on_iteration)
        hooks.on_iteration({k, state, prox, sigma, dir ? &*dir : nullptr, nullptr, 0.0, prox, false});
      if (stalls >= cfg.k_dagger) {
        report.pathology = PathologyReason::Stall;
        return finish(SolveStatus::Pathological);
      }
      continue;
    }
    stalls = 0;

    std::optional<ScaledNorms> scaled;
    if (p.n() <= cfg.diagnostics_cap) {
      try {
        scaled = scaled_direction_norms(ScalingContext(state.Z), state.X, dir->dX, dir->dZ,
                                        cfg.diagnostics_cap);
      } catch (const Error&) {
      }
    }

    auto [next_prox, updated] = maybe_update_prox(p, ev, step->next, prox);
    if (updated) ++report.prox_updates;
    prox_age = updated ? 0 : prox_age + 1;
    report.trace.push_back({k, state.mu, step->next.mu, step->alpha, sigma, step->residuals.two_norm,
                            step->residuals.semi_norm, step->residuals.compl_dev, updated,
                            dir->krylov_iters, step->trials, false, scaled});
    if (hooks.on_iteration)
      hooks.on_iteration({k, state, prox, sigma, &*dir, &step->next, step->alpha, next_prox, updated});

    mu_ratio = step->next.mu / state.mu;
    state = std::move(step->next);
    prox = std::move(next_prox);

    if (pathology_check(prox_age, state.X, prox.Xi, state.y, prox.lambda, cfg)) {
      report.pathology = PathologyReason::Divergence;
      return finish(SolveStatus::Pathological);
    }
  }
}

}  // namespace ippmm
