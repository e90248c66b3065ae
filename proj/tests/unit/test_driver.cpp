#include <gtest/gtest.h>

#include "ippmm/driver.hpp"
#include "ippmm/generators.hpp"
#include "ippmm/oracle.hpp"
#include "support/reference.hpp"

using namespace ippmm;

namespace {

SdpProblem scalar_instance() {
  return SdpProblem({SymMatrix(Matrix{{2.0}})}, Vector::Constant(1, 4.0), SymMatrix(Matrix{{3.0}}));
}

SdpProblem trace_problem(const SymMatrix& c) {
  return SdpProblem({SymMatrix::identity(c.dim())}, Vector::Constant(1, 1.0), c);
}

}  // namespace

TEST(StartingPoint, WorkedExamples) {
  SolverConfig cfg;
  cfg.rho = 2.0;
  ref::Rng rng(1);
  const SdpProblem p = rng.problem(3, 2);
  EXPECT_DOUBLE_EQ(starting_point(p, cfg).first.mu, 4.0);

  cfg.rho = 1.0;
  const auto [s, prox] = starting_point(scalar_instance(), cfg);
  EXPECT_DOUBLE_EQ(prox.params.b_bar(0), -2.0);
  EXPECT_DOUBLE_EQ(prox.params.C_bar(0, 0), -2.0);
  EXPECT_DOUBLE_EQ(prox.params.mu0, 1.0);
  EXPECT_EQ(prox.Xi, s.X);
  EXPECT_EQ(prox.lambda, s.y);
}

TEST(StartingPoint, InsideNeighbourhoodWithZeroResiduals) {
  ref::Rng rng(2);
  for (double rho : {0.5, 1.0, 3.0, 10.0}) {
    SolverConfig cfg;
    cfg.rho = rho;
    const SdpProblem p = rng.problem(4, 3);
    const auto [s, prox] = starting_point(p, cfg);
    const auto ev = SeminormEvaluator::build(p);
    std::optional<RegResiduals> r;
    EXPECT_TRUE(check_neighbourhood(p, prox.params, ev, s.X, s.y, s.Z, prox.Xi, prox.lambda, s.mu, &r).inside);
    EXPECT_LE(r->two_norm, 1e-12 * rho * rho);
    EXPECT_NEAR(prox.params.K_N,
                10.0 * std::max(1.0, joint_norm(prox.params.b_bar, prox.params.C_bar)), 1e-12);
  }
}

TEST(ChooseSigma, Policies) {
  SolverConfig cfg;
  for (int k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(choose_sigma(k, cfg), 0.25);
  cfg.sigma_policy = SigmaPolicy::Adaptive;
  EXPECT_DOUBLE_EQ(choose_sigma(3, cfg, 0.9), 0.45);
  EXPECT_DOUBLE_EQ(choose_sigma(3, cfg, 0.01), 0.05);
  EXPECT_DOUBLE_EQ(choose_sigma(3, cfg, 0.3), 0.3);
  cfg.sigma_policy = SigmaPolicy::Fixed;
  cfg.sigma_fixed = 0.9;
  EXPECT_DOUBLE_EQ(choose_sigma(0, cfg), 0.45);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.sigma_max = 0.6;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.sigma_min = 0.3;
  cfg.sigma_max = 0.2;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.rho = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.K_N = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(LineSearch, ZeroDirectionIsTooSmall) {
  const SdpProblem p = scalar_instance();
  const SolverConfig cfg;
  const auto [s, prox] = starting_point(p, cfg);
  const auto ev = SeminormEvaluator::build(p);
  NewtonDirection d{SymMatrix::zero(1), Vector::Zero(1), SymMatrix::zero(1), Vector::Zero(1), SymMatrix::zero(1), 0.0, 0};
  try {
    (void)line_search(p, ev, s, prox, d, cfg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StepTooSmall);
  }
}

TEST(LineSearch, AgreesWithBruteForceGrid) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const FeasibleInstance f = gen_feasible(4, 3, 2, seed);
    SolverConfig cfg;
    int checked = 0;
    solve(f.problem, cfg, {[&](const IterationEvent& e) {
            if (!e.direction || e.k > 5) return;
            const double want = ref::grid_alpha(f.problem, e.current, e.prox_before, *e.direction,
                                                cfg.backtrack_factor, cfg.alpha_min);
            EXPECT_NEAR(e.alpha, want, 1e-15 * (1 + want)) << "k=" << e.k;
            ++checked;
          }});
    EXPECT_GT(checked, 0);
  }
}

TEST(MaybeUpdateProx, CenteredFeasibleUpdates) {
  ref::Rng rng(3);
  const SdpProblem p = rng.problem(3, 2);
  const auto ev = SeminormEvaluator::build(p);
  const SymMatrix z = rng.spd(3);
  const double mu = 0.5, mu0 = 1.0;
  const SymMatrix x(Matrix(mu * z.dense().inverse()));
  const Vector y = rng.vector(2);
  NeighbourhoodParams par{10.0, 0.9, 0.3, 1.0, mu0, (mu0 / mu) * (apply_A(p, x) - p.rhs()),
                          (mu0 / mu) * (p.cost() - apply_Astar(p, y) - z) * -1.0};
  const ProxState prox{SymMatrix::identity(3), Vector::Zero(2), par};
  auto [next, updated] = maybe_update_prox(p, ev, Iterate{x, y, z, mu}, prox);
  EXPECT_TRUE(updated);
  EXPECT_EQ(next.Xi, x);
  EXPECT_EQ(next.lambda, y);
}

TEST(MaybeUpdateProx, ResidualAboveBoundKeepsEstimates) {
  ref::Rng rng(4);
  const SdpProblem p = rng.problem(3, 2);
  const auto ev = SeminormEvaluator::build(p);
  const SymMatrix z = rng.spd(3);
  const double mu = 0.5, mu0 = 1.0, k_n = 10.0;
  const SymMatrix x(Matrix(mu * z.dense().inverse()));
  const Vector y = rng.vector(2);
  // Shift b_bar so that r_p has norm exactly 2 K_N mu / mu0 and R_d = 0.
  const Vector dir = rng.vector(2).normalized();
  const Vector b_bar = (mu0 / mu) * (apply_A(p, x) - p.rhs() - 2.0 * k_n * mu / mu0 * dir);
  NeighbourhoodParams par{k_n, 0.9, 0.3, 1.0, mu0, b_bar, (mu0 / mu) * (apply_Astar(p, y) + z - p.cost())};
  const ProxState prox{SymMatrix::identity(3), Vector::Zero(2), par};
  auto [next, updated] = maybe_update_prox(p, ev, Iterate{x, y, z, mu}, prox);
  EXPECT_FALSE(updated);
  EXPECT_EQ(next.Xi, prox.Xi);
}

TEST(PathologyCheck, Thresholds) {
  SolverConfig cfg;
  const SymMatrix xi = SymMatrix::zero(2);
  const Vector lambda = Vector::Zero(1);
  const SymMatrix far = SymMatrix::diagonal(Vector::Constant(2, 2.0 * cfg.K_dagger));
  EXPECT_FALSE(pathology_check(0, far, xi, lambda, lambda, cfg));
  EXPECT_TRUE(pathology_check(cfg.k_dagger, far, xi, lambda, lambda, cfg));
  EXPECT_FALSE(pathology_check(cfg.k_dagger, xi, xi, lambda, lambda, cfg));
  EXPECT_FALSE(pathology_check(cfg.k_dagger - 1, far, xi, lambda, lambda, cfg));
}

TEST(Solve, TraceDiagonalAnalytic) {
  const SdpProblem p = trace_problem(SymMatrix::diagonal(Vector{{1.0, 3.0}}));
  const SolveReport r = solve(p, SolverConfig{});
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(primal_objective(p, r.iterate.X), 1.0, 1e-5);
  EXPECT_LE(ref::rel_err(r.iterate.X.dense(), Matrix{{1.0, 0.0}, {0.0, 0.0}}), 1e-5);
  EXPECT_TRUE(is_pd(r.iterate.X));
  EXPECT_TRUE(is_pd(r.iterate.Z));
  EXPECT_GE(frob_inner(r.iterate.X, r.iterate.Z), 0.0);
}

TEST(Solve, ScalarInstanceMatchesOracle) {
  const SdpProblem p = scalar_instance();
  const SolveReport r = solve(p, SolverConfig{});
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  const OracleSolution o = solve_diagonal_sdp(p);
  EXPECT_NEAR(primal_objective(p, r.iterate.X), o.value, 1e-5);
  EXPECT_NEAR(r.iterate.y(0), o.y_star(0), 1e-5);
}

TEST(Solve, GeneratedInstanceConverges) {
  const FeasibleInstance f = gen_feasible(5, 6, 2, 11);
  const SolveReport r = solve(f.problem, SolverConfig{});
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_LT(r.final_residuals.primal_res, 1e-6);
  EXPECT_LT(r.final_residuals.dual_res, 1e-6);
  EXPECT_LT(r.final_residuals.gap, 1e-6);
  EXPECT_EQ(r.iterations(), static_cast<int>(r.trace.size()));
}

TEST(Solve, ProxUpdatesHappenOnAReferenceInstance) {
  const FeasibleInstance f = gen_feasible(4, 6, 2, 5001);
  const SolveReport r = solve(f.problem, SolverConfig{});
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_GE(r.prox_updates, 1);
}

TEST(Solve, InvariantsAlongTheRun) {
  const FeasibleInstance f = gen_feasible(4, 5, 2, 12);
  const auto ev = SeminormEvaluator::build(f.problem);
  int steps = 0;
  const SolveReport r = solve(f.problem, SolverConfig{}, {[&](const IterationEvent& e) {
                                if (!e.accepted) return;
                                ++steps;
                                const Iterate& nx = *e.accepted;
                                EXPECT_LE(nx.mu, (1.0 - 0.01 * e.alpha) * e.current.mu);
                                EXPECT_NEAR(nx.mu, frob_inner(nx.X, nx.Z) / nx.X.dim(), 1e-12 * nx.mu);
                                std::optional<RegResiduals> res;
                                const auto& pb = e.prox_before;
                                EXPECT_TRUE(check_neighbourhood(f.problem, pb.params, ev, nx.X, nx.y, nx.Z,
                                                                pb.Xi, pb.lambda, nx.mu, &res)
                                                .inside);
                                EXPECT_LE(res->r_p.norm(), pb.params.two_norm_bound(nx.mu));
                                EXPECT_LE(res->R_d.frobenius_norm(), pb.params.two_norm_bound(nx.mu));
                              }});
  EXPECT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_EQ(steps, r.iterations());
}

TEST(Solve, InfeasibleTraceIsPathological) {
  for (int n : {1, 3}) {
    const SolveReport r = solve(gen_infeasible_trace(n), SolverConfig{});
    EXPECT_EQ(r.status, SolveStatus::Pathological) << "n=" << n;
    EXPECT_EQ(r.pathology, PathologyReason::Divergence);
  }
}

TEST(Solve, MaxIterations) {
  SolverConfig cfg;
  cfg.max_outer_iters = 2;
  const SolveReport r = solve(gen_feasible(4, 3, 2, 1).problem, cfg);
  EXPECT_EQ(r.status, SolveStatus::MaxIterations);
  EXPECT_EQ(r.iterations(), 2);
}

TEST(Solve, Deterministic) {
  const FeasibleInstance f = gen_feasible(5, 4, 3, 13);
  for (NewtonMode mode : {NewtonMode::Exact, NewtonMode::Inexact}) {
    SolverConfig cfg;
    cfg.mode = mode;
    const SolveReport a = solve(f.problem, cfg), b = solve(f.problem, cfg);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      EXPECT_EQ(a.trace[i].mu, b.trace[i].mu);
      EXPECT_EQ(a.trace[i].alpha, b.trace[i].alpha);
      EXPECT_EQ(a.trace[i].semi_norm, b.trace[i].semi_norm);
      EXPECT_EQ(a.trace[i].krylov_iters, b.trace[i].krylov_iters);
    }
  }
}

TEST(Solve, TraceCarriesScaledNormsForSmallN) {
  const SolveReport r = solve(gen_feasible(3, 2, 1, 3).problem, SolverConfig{});
  ASSERT_FALSE(r.trace.empty());
  for (const auto& t : r.trace)
    if (!t.stalled) {
      EXPECT_TRUE(t.scaled.has_value());
    }
}
