#pragma once

#include <optional>
#include <string_view>

#include "ippmm/problem.hpp"
#include "ippmm/scaling.hpp"
#include "ippmm/seminorm.hpp"

namespace ippmm {

struct NeighbourhoodParams {
  double K_N;
  double gamma_S;
  double gamma_mu;
  double rho;
  double mu0;
  Vector b_bar;     // A vec(X0) - b
  SymMatrix C_bar;  // Z0 + A^* y0 - C

  void validate() const {
    if (!(K_N > 0.0)) throw Error(Errc::InvalidArgument, "K_N must be positive");
    if (!(gamma_S > 0.0 && gamma_S < 1.0)) throw Error(Errc::InvalidArgument, "gamma_S must lie in (0,1)");
    if (!(gamma_mu > 0.0 && gamma_mu < 1.0)) throw Error(Errc::InvalidArgument, "gamma_mu must lie in (0,1)");
    if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be positive");
    if (!(mu0 > 0.0)) throw Error(Errc::InvalidArgument, "mu0 must be positive");
  }

  double two_norm_bound(double mu) const { return K_N * mu / mu0; }
  double semi_norm_bound(double mu) const { return gamma_S * rho * mu / mu0; }
  double complementarity_bound(double mu) const { return gamma_mu * mu; }
};

/// Regularized residuals of a point relative to (Xi, lambda, mu). The pair
/// (r_p, R_d) equals (mu/mu0) times the scaled infeasibility (b~, C~).
struct RegResiduals {
  Vector r_p;
  SymMatrix R_d;
  double two_norm;
  double semi_norm;
  double compl_dev;
};

inline double joint_norm(const Vector& v, const SymMatrix& m) {
  return std::sqrt(v.squaredNorm() + m.dense().squaredNorm());
}

/// r_p = A X + mu (y - lambda) - b - (mu/mu0) b_bar
/// R_d = A^* y + Z - mu (X - Xi) - C - (mu/mu0) C_bar
inline RegResiduals reg_residuals(const SdpProblem& p, const NeighbourhoodParams& params,
                                  const SeminormEvaluator& ev, const SymMatrix& x, const Vector& y,
                                  const SymMatrix& z, const SymMatrix& xi, const Vector& lambda,
                                  double mu) {
  if (!(mu > 0.0)) throw Error(Errc::InvalidArgument, "mu must be positive");
  const double scale = mu / params.mu0;
  Vector r_p = apply_A(p, x) + mu * (y - lambda) - p.rhs() - scale * params.b_bar;
  SymMatrix r_d = apply_Astar(p, y) + z - mu * (x - xi) - p.cost() - scale * params.C_bar;
  const ScalingContext ctx(z);
  const double two = joint_norm(r_p, r_d);
  const double semi = ev.eval(r_p, r_d);
  const double dev = complementarity_deviation(ctx, x, mu);
  return {std::move(r_p), std::move(r_d), two, semi, dev};
}

enum class NeighbourhoodFailure { NotPD_X, NotPD_Z, TwoNorm, SemiNorm, Complementarity };

inline constexpr std::string_view failure_name(NeighbourhoodFailure f) noexcept {
  switch (f) {
    case NeighbourhoodFailure::NotPD_X: return "NotPD_X";
    case NeighbourhoodFailure::NotPD_Z: return "NotPD_Z";
    case NeighbourhoodFailure::TwoNorm: return "TwoNorm";
    case NeighbourhoodFailure::SemiNorm: return "SemiNorm";
    case NeighbourhoodFailure::Complementarity: return "Complementarity";
  }
  return "Unknown";
}

struct Membership {
  bool inside;
  std::optional<NeighbourhoodFailure> reason;

  explicit operator bool() const noexcept { return inside; }
};

inline Membership in_neighbourhood(const RegResiduals& res, const NeighbourhoodParams& params,
                                   const SymMatrix& x, const SymMatrix& z, double mu) {
  if (!is_pd(x)) return {false, NeighbourhoodFailure::NotPD_X};
  if (!is_pd(z)) return {false, NeighbourhoodFailure::NotPD_Z};
  if (!(res.two_norm <= params.two_norm_bound(mu))) return {false, NeighbourhoodFailure::TwoNorm};
  if (!(res.semi_norm <= params.semi_norm_bound(mu))) return {false, NeighbourhoodFailure::SemiNorm};
  if (!(res.compl_dev <= params.complementarity_bound(mu)))
    return {false, NeighbourhoodFailure::Complementarity};
  return {true, std::nullopt};
}

/// Full membership test from raw point data. Positive definiteness is checked
/// before residuals are formed, since H_P needs Z^{1/2}.
inline Membership check_neighbourhood(const SdpProblem& p, const NeighbourhoodParams& params,
                                      const SeminormEvaluator& ev, const SymMatrix& x,
                                      const Vector& y, const SymMatrix& z, const SymMatrix& xi,
                                      const Vector& lambda, double mu,
                                      std::optional<RegResiduals>* residuals_out = nullptr) {
  if (!is_pd(x)) return {false, NeighbourhoodFailure::NotPD_X};
  if (!is_pd(z)) return {false, NeighbourhoodFailure::NotPD_Z};
  if (!(mu > 0.0)) return {false, NeighbourhoodFailure::Complementarity};
  std::optional<RegResiduals> res;
  try {
    res = reg_residuals(p, params, ev, x, y, z, xi, lambda, mu);
  } catch (const Error& e) {
    if (e.code() == Errc::NotPositiveDefinite) return {false, NeighbourhoodFailure::NotPD_Z};
    throw;
  }
  Membership out = in_neighbourhood(*res, params, x, z, mu);
  if (residuals_out) *residuals_out = std::move(res);
  return out;
}

}  // namespace ippmm
