#pragma once

#include <utility>

#include "ippmm/linalg.hpp"

namespace ippmm {

/// Square-root factors of Z used by the symmetrization with P = Z^{1/2}.
/// Under this choice H_P(XZ) = Z^{1/2} X Z^{1/2}.
class ScalingContext {
 public:
  explicit ScalingContext(const SymMatrix& z) : source_(z), half_(z), halfinv_(z) {
    const SpectralDecomposition sd = detail::require_pd(z);
    half_ = detail::spectral_map(sd, [](double v) { return std::sqrt(v); });
    halfinv_ = detail::spectral_map(sd, [](double v) { return 1.0 / std::sqrt(v); });
  }

  int dim() const noexcept { return source_.dim(); }
  const SymMatrix& z() const noexcept { return source_; }
  const SymMatrix& z_half() const noexcept { return half_; }
  const SymMatrix& z_halfinv() const noexcept { return halfinv_; }

 private:
  SymMatrix source_;
  SymMatrix half_;
  SymMatrix halfinv_;
};

namespace detail {

inline void require_ctx_dim(const ScalingContext& ctx, Eigen::Index rows, Eigen::Index cols) {
  if (rows != ctx.dim() || cols != ctx.dim())
    throw Error(Errc::DimensionMismatch, "operand does not match scaling dimension " +
                                             std::to_string(ctx.dim()));
}

}  // namespace detail

/// H_P(B) = (P B P^{-1} + (P B P^{-1})^T) / 2 with P = Z^{1/2}.
inline SymMatrix h_p(const ScalingContext& ctx, const Matrix& b) {
  detail::require_ctx_dim(ctx, b.rows(), b.cols());
  const Matrix pbp = ctx.z_half().dense() * b * ctx.z_halfinv().dense();
  return SymMatrix(pbp);
}

/// E vec(M) with E = Z^{1/2} (x) Z^{1/2}, i.e. the congruence Z^{1/2} M Z^{1/2}.
inline SymMatrix apply_E(const ScalingContext& ctx, const SymMatrix& m) {
  detail::require_ctx_dim(ctx, m.dim(), m.dim());
  const Matrix& zh = ctx.z_half().dense();
  return SymMatrix(Matrix(zh * m.dense() * zh));
}

/// F vec(M) = H_P(X M) = (Z^{1/2} X M Z^{-1/2} + Z^{-1/2} M X Z^{1/2}) / 2.
inline SymMatrix apply_F(const ScalingContext& ctx, const SymMatrix& x, const SymMatrix& m) {
  detail::require_ctx_dim(ctx, x.dim(), x.dim());
  detail::require_ctx_dim(ctx, m.dim(), m.dim());
  return h_p(ctx, x.dense() * m.dense());
}

/// R_mu = sigma*mu I - Z^{1/2} X Z^{1/2}.
inline SymMatrix complementarity_residual(const ScalingContext& ctx, const SymMatrix& x,
                                          double sigma_mu) {
  return (-apply_E(ctx, x)).shift_diagonal(sigma_mu);
}

/// ||H_P(XZ) - mu I||_F.
inline double complementarity_deviation(const ScalingContext& ctx, const SymMatrix& x, double mu) {
  return complementarity_residual(ctx, x, mu).frobenius_norm();
}

/// Dense n^2 x n^2 matrix of E. Kronecker convention: (A (x) B) vec(M) = vec(B M A^T).
inline Matrix dense_E(const ScalingContext& ctx) {
  return kron(ctx.z_half().dense(), ctx.z_half().dense());
}

/// Dense n^2 x n^2 matrix of F at the point X.
inline Matrix dense_F(const ScalingContext& ctx, const SymMatrix& x) {
  const Matrix zx = ctx.z_half().dense() * x.dense();
  const Matrix& zi = ctx.z_halfinv().dense();
  return 0.5 * (kron(zx, zi) + kron(zi, zx));
}

struct ScaledNorms {
  double dx;  // ||D^{-T} vec(dX)||_2
  double dz;  // ||D vec(dZ)||_2
};

/// S = F E (matrix product, E applied first) is symmetric positive definite:
/// with G = E^{-1} F = (X (x) Z^{-1} + Z^{-1} (x) X)/2 one has S = E G E.
/// Then D = S^{-1/2} F = S^{1/2} E^{-1} and D^{-T} = S^{-1/2} E.
class ScaledOperators {
 public:
  ScaledOperators(const ScalingContext& ctx, const SymMatrix& x, int dense_cap) {
    if (ctx.dim() > dense_cap)
      throw Error(Errc::DimensionTooLarge, "scaled operators need n <= " + std::to_string(dense_cap));
    e_ = dense_E(ctx);
    f_ = dense_F(ctx, x);
    Matrix s = f_ * e_;
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
      throw Error(Errc::ConvergenceFailure, "eigensolver failed on scaled operator S");
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw Error(Errc::NotPositiveDefinite, "scaled operator S is not positive definite");
    s_invhalf_ = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose();
  }

  ScaledNorms direction_norms(const SymMatrix& dx, const SymMatrix& dz) const {
    return {(s_invhalf_ * (e_ * vec(dx))).norm(), (s_invhalf_ * (f_ * vec(dz))).norm()};
  }

  /// ||S^{-1/2} vec(R)||_2.
  double scaled_norm(const SymMatrix& r) const { return (s_invhalf_ * vec(r)).norm(); }

 private:
  Matrix e_, f_, s_invhalf_;
};

inline ScaledNorms scaled_direction_norms(const ScalingContext& ctx, const SymMatrix& x,
                                          const SymMatrix& dx, const SymMatrix& dz,
                                          int dense_cap = 16) {
  return ScaledOperators(ctx, x, dense_cap).direction_norms(dx, dz);
}

}  // namespace ippmm
