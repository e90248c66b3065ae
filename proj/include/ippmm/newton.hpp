#pragma once

// Regularized Newton system of the proximal interior point iteration:
//
//   [ -mu I   A^T   I ] [dX]   [ dual_rhs   ]   [ E_d   ]
//   [  A      mu I  0 ] [dy] = [ primal_rhs ] + [ eps_p ]
//   [  E      0     F ] [dZ]   [ compl_rhs  ]   [ E_mu  ]
//
// with E = Z^{1/2} (x) Z^{1/2} and F the Z-derivative of H_P(XZ), P = Z^{1/2}.

#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include <Eigen/LU>

#include "ippmm/iterate.hpp"
#include "ippmm/minres.hpp"

namespace ippmm {

struct NewtonRhs {
  SymMatrix dual_rhs;
  Vector primal_rhs;
  SymMatrix compl_rhs;
};

struct NewtonDirection {
  SymMatrix dX;
  Vector dy;
  SymMatrix dZ;
  Vector err_p;        // A dX + mu dy - primal_rhs
  SymMatrix err_D;     // -mu dX + A^* dy + dZ - dual_rhs
  double err_mu_norm;  // ||E dX + F dZ - compl_rhs||_F
  int krylov_iters = 0;
};

/// Thrown when the Krylov budget runs out; carries both achieved residual
/// measures next to their bounds.
class KrylovFailure : public Error {
 public:
  KrylovFailure(int applications, double two_norm, double two_bound, double semi_norm,
                double semi_bound)
      : Error(Errc::MaxKrylovIterations,
              "after " + std::to_string(applications) + " applications: ||(eps_p,E_d)||_2 = " +
                  std::to_string(two_norm) + " (bound " + std::to_string(two_bound) +
                  "), semi-norm = " + std::to_string(semi_norm) + " (bound " +
                  std::to_string(semi_bound) + ")"),
        applications(applications),
        two_norm(two_norm),
        two_norm_bound(two_bound),
        semi_norm(semi_norm),
        semi_norm_bound(semi_bound) {}

  int applications;
  double two_norm, two_norm_bound, semi_norm, semi_norm_bound;
};

inline NewtonRhs assemble_rhs(const SdpProblem& p, const Iterate& s, const ProxState& prox,
                              double sigma) {
  if (!(s.mu > 0.0)) throw Error(Errc::InvalidArgument, "mu must be positive");
  const auto& par = prox.params;
  const double smu = sigma * s.mu;
  const double scale = smu / par.mu0;
  SymMatrix dual = p.cost() + scale * par.C_bar - apply_Astar(p, s.y) - s.Z + smu * (s.X - prox.Xi);
  Vector primal = -apply_A(p, s.X) - smu * (s.y - prox.lambda) + p.rhs() + scale * par.b_bar;
  const ScalingContext ctx(s.Z);
  SymMatrix compl_rhs = complementarity_residual(ctx, s.X, smu);
  return {std::move(dual), std::move(primal), std::move(compl_rhs)};
}

struct BlockResiduals {
  Vector err_p;
  SymMatrix err_D;
  SymMatrix err_mu;
};

/// E dX + F dZ - R accumulated in extended precision. The products with
/// Z^{-1/2} lose accuracy in double once Z is ill-conditioned.
inline SymMatrix third_block_residual(const ScalingContext& ctx, const SymMatrix& x, const SymMatrix& dx,
                                      const SymMatrix& dz, const SymMatrix& r) {
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixL h = ctx.z_half().dense().cast<long double>();
  const MatrixL hi = ctx.z_halfinv().dense().cast<long double>();
  const MatrixL t = h * x.dense().cast<long double>() * dz.dense().cast<long double>() * hi;
  const MatrixL e = h * dx.dense().cast<long double>() * h;
  const MatrixL out = e + 0.5L * (t + t.transpose()) - r.dense().cast<long double>();
  return SymMatrix(Matrix(out.cast<double>()));
}

/// Residuals of (dX, dy, dZ) against the full system, evaluated matrix-free.
inline BlockResiduals newton_residuals(const SdpProblem& p, const ScalingContext& ctx,
                                       const Iterate& s, const NewtonRhs& rhs, const SymMatrix& dx,
                                       const Vector& dy, const SymMatrix& dz) {
  SymMatrix err_d = -s.mu * dx + apply_Astar(p, dy) + dz - rhs.dual_rhs;
  Vector err_p = apply_A(p, dx) + s.mu * dy - rhs.primal_rhs;
  SymMatrix err_mu = third_block_residual(ctx, s.X, dx, dz, rhs.compl_rhs);
  return {std::move(err_p), std::move(err_d), std::move(err_mu)};
}

/// Dense LU of F at (X, Z); solves F vec(M) = vec(W).
class FSolver {
 public:
  FSolver(const ScalingContext& ctx, const SymMatrix& x) : n_(ctx.dim()), lu_(dense_F(ctx, x)) {
    if (!std::isfinite(lu_.rcond()) || lu_.rcond() < 1e-300)
      throw Error(Errc::SingularOperator, "F is singular; X or Z not positive definite");
  }

  Matrix solve_dense(const Matrix& rhs) const { return lu_.solve(rhs); }

  Vector solve_vec(const Vector& w) const { return lu_.solve(w); }

  SymMatrix solve(const SymMatrix& w) const {
    const Vector m = lu_.solve(vec(w));
    if (!m.allFinite()) throw Error(Errc::SingularOperator, "F solve produced non-finite values");
    return SymMatrix(unvec(m));
  }

 private:
  int n_;
  Eigen::PartialPivLU<Matrix> lu_;
};

inline SymMatrix f_solve(const ScalingContext& ctx, const SymMatrix& x, const SymMatrix& w) {
  return FSolver(ctx, x).solve(w);
}

namespace detail {

inline NewtonDirection finish_direction(const SdpProblem& p, const ScalingContext& ctx,
                                        const Iterate& s, const NewtonRhs& rhs, SymMatrix dx,
                                        Vector dy, SymMatrix dz, int krylov_iters) {
  BlockResiduals r = newton_residuals(p, ctx, s, rhs, dx, dy, dz);
  const double err_mu = r.err_mu.frobenius_norm();
  return {std::move(dx), std::move(dy),       std::move(dz), std::move(r.err_p),
          std::move(r.err_D), err_mu, krylov_iters};
}

}  // namespace detail

/// Dense factorization of the full (2n^2 + m) system with partial pivoting,
/// followed by two steps of iterative refinement.
inline NewtonDirection solve_exact(const SdpProblem& p, const Iterate& s, const NewtonRhs& rhs,
                                   int dense_cap = 64) {
  const int n = p.n(), m = p.m();
  if (n > dense_cap)
    throw Error(Errc::DimensionTooLarge,
                "n = " + std::to_string(n) + " exceeds dense cap " + std::to_string(dense_cap));
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index dim = 2 * nn + m;
  const ScalingContext ctx(s.Z);
  const Matrix a = p.vectorized_constraints();

  Matrix k = Matrix::Zero(dim, dim);
  k.block(0, 0, nn, nn).diagonal().setConstant(-s.mu);
  k.block(0, nn, nn, m) = a.transpose();
  k.block(0, nn + m, nn, nn).diagonal().setOnes();
  k.block(nn, 0, m, nn) = a;
  k.block(nn, nn, m, m).diagonal().setConstant(s.mu);
  k.block(nn + m, 0, nn, nn) = dense_E(ctx);
  k.block(nn + m, nn + m, nn, nn) = dense_F(ctx, s.X);

  Vector b(dim);
  b << vec(rhs.dual_rhs), rhs.primal_rhs, vec(rhs.compl_rhs);

  Eigen::PartialPivLU<Matrix> lu(k);
  Vector sol = lu.solve(b);
  for (int refine = 0; refine < 2; ++refine) sol += lu.solve(b - k * sol);
  if (!sol.allFinite()) throw Error(Errc::SingularSystem, "dense Newton solve produced non-finite values");

  SymMatrix dx(unvec(sol.head(nn)));
  Vector dy = sol.segment(nn, m);
  SymMatrix dz(unvec(sol.tail(nn)));
  return detail::finish_direction(p, ctx, s, rhs, std::move(dx), std::move(dy), std::move(dz), 0);
}

struct InexactOptions {
  double sigma_min = 0.05;
  double tol_scale = 1.0;  // multiplies both accuracy bounds
};

struct InexactBounds {
  double two_norm;
  double semi_norm;
};

/// sigma_min/(4 mu0) * K_N * mu and sigma_min/(4 mu0) * gamma_S * rho * mu.
inline InexactBounds inexact_bounds(const NeighbourhoodParams& par, double mu, double sigma_min,
                                    double tol_scale = 1.0) {
  const double f = tol_scale * sigma_min / (4.0 * par.mu0) * mu;
  return {f * par.K_N, f * par.gamma_S * par.rho};
}

/// Eliminates dZ through the third block, so E_mu vanishes up to round-off,
/// then solves the symmetric indefinite system
///
///   [ -(mu I + F^{-1} E)   A^T  ] [dX]   [ dual_rhs - F^{-1} compl_rhs ]
///   [  A                   mu I ] [dy] = [ primal_rhs                  ]
///
/// by MINRES. F^{-1} E = ((X (x) Z^{-1} + Z^{-1} (x) X)/2)^{-1} is symmetric
/// positive definite, so the reduced operator is symmetric. The iteration
/// stops once the recovered full-system residuals meet both accuracy bounds.
inline NewtonDirection solve_inexact(const SdpProblem& p, const SeminormEvaluator& ev,
                                     const Iterate& s, const NeighbourhoodParams& par,
                                     const NewtonRhs& rhs, const InexactOptions& opt = {}) {
  const int n = p.n(), m = p.m();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const ScalingContext ctx(s.Z);
  const FSolver fsolve(ctx, s.X);
  const Matrix a = p.vectorized_constraints();

  Matrix h = fsolve.solve_dense(dense_E(ctx));
  h = (0.5 * (h + h.transpose())).eval();
  h.diagonal().array() += s.mu;

  const double mu = s.mu;
  auto apply = [&](const Vector& v) {
    Vector out(nn + m);
    out.head(nn) = -(h * v.head(nn)) + a.transpose() * v.tail(m);
    out.tail(m) = a * v.head(nn) + mu * v.tail(m);
    return out;
  };

  const Vector finv_r = fsolve.solve_vec(vec(rhs.compl_rhs));
  Vector b(nn + m);
  b << vec(rhs.dual_rhs) - finv_r, rhs.primal_rhs;

  const InexactBounds bound = inexact_bounds(par, mu, opt.sigma_min, opt.tol_scale);
  const int budget = 10 * static_cast<int>(nn + m);
  int used = 0;
  double last_two = std::numeric_limits<double>::infinity();
  double last_semi = std::numeric_limits<double>::infinity();

  // Recover dZ from the third block and measure the first two blocks.
  auto recover = [&](const Vector& sol) {
    SymMatrix dx(unvec(sol.head(nn)));
    Vector dy = sol.tail(m);
    SymMatrix dz = fsolve.solve(rhs.compl_rhs - apply_E(ctx, dx));
    for (int refine = 0; refine < 2; ++refine)
      dz -= fsolve.solve(third_block_residual(ctx, s.X, dx, dz, rhs.compl_rhs));
    return std::tuple{std::move(dx), std::move(dy), std::move(dz)};
  };
  auto accepted = [&](const SymMatrix& dx, const Vector& dy, const SymMatrix& dz) {
    const BlockResiduals r = newton_residuals(p, ctx, s, rhs, dx, dy, dz);
    last_two = joint_norm(r.err_p, r.err_D);
    if (!(last_two <= bound.two_norm)) return false;
    last_semi = ev.eval(r.err_p, r.err_D);
    return last_semi <= bound.semi_norm;
  };

  Vector x = Vector::Zero(nn + m);
  while (used < budget) {
    bool verified = false;
    auto monitor = [&](const Vector& xk, double estimate, int) {
      if (estimate > bound.two_norm) return MinresControl::Continue;
      ++used;  // explicit residual costs one more application
      auto [dx, dy, dz] = recover(xk);
      if (accepted(dx, dy, dz)) {
        verified = true;
        return MinresControl::Stop;
      }
      // The recurrence estimate has drifted below the true residual.
      if (estimate < 1e-2 * last_two) return MinresControl::Restart;
      return MinresControl::Continue;
    };
    ++used;  // initial residual
    MinresResult res = minres(apply, b, x, budget - used, monitor);
    used += res.iterations;
    x = std::move(res.x);
    if (verified) {
      auto [dx, dy, dz] = recover(x);
      return detail::finish_direction(p, ctx, s, rhs, std::move(dx), std::move(dy), std::move(dz), used);
    }
    if (!x.allFinite()) break;
  }
  throw KrylovFailure(used, last_two, bound.two_norm, last_semi, bound.semi_norm);
}

}  // namespace ippmm
