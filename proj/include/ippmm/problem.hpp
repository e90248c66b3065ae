#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "ippmm/linalg.hpp"

namespace ippmm {

/// Linear SDP in standard form:
///   min <C, X>  s.t.  <A_i, X> = b_i (i = 1..m),  X psd,
/// paired with the dual  max b^T y  s.t.  sum_i y_i A_i + Z = C,  Z psd.
class SdpProblem {
 public:
  SdpProblem(std::vector<SymMatrix> constraint_mats, Vector rhs, SymMatrix cost)
      : constraints_(std::move(constraint_mats)), rhs_(std::move(rhs)), cost_(std::move(cost)) {
    if (constraints_.empty()) throw Error(Errc::InvalidArgument, "problem needs m >= 1 constraints");
    if (rhs_.size() != static_cast<Eigen::Index>(constraints_.size()))
      throw Error(Errc::DimensionMismatch, "rhs length " + std::to_string(rhs_.size()) +
                                               " vs m = " + std::to_string(constraints_.size()));
    for (const auto& a : constraints_)
      if (a.dim() != cost_.dim())
        throw Error(Errc::DimensionMismatch, "constraint matrix dimension differs from cost");
  }

  int n() const noexcept { return cost_.dim(); }
  int m() const noexcept { return static_cast<int>(constraints_.size()); }

  const std::vector<SymMatrix>& constraint_mats() const noexcept { return constraints_; }
  const SymMatrix& constraint(int i) const { return constraints_.at(static_cast<std::size_t>(i)); }
  const Vector& rhs() const noexcept { return rhs_; }
  const SymMatrix& cost() const noexcept { return cost_; }

  /// m x n^2 matrix whose rows are vec(A_i)^T.
  Matrix vectorized_constraints() const {
    Matrix a(m(), static_cast<Eigen::Index>(n()) * n());
    for (int i = 0; i < m(); ++i) a.row(i) = vec(constraints_[static_cast<std::size_t>(i)]).transpose();
    return a;
  }

 private:
  std::vector<SymMatrix> constraints_;
  Vector rhs_;
  SymMatrix cost_;
};

struct KktResiduals {
  double primal_res;  // ||A vec(X) - b||_2
  double dual_res;    // ||vec(C) - A^T y - vec(Z)||_2
  double gap;         // <X, Z> / n
};

struct RankReport {
  int rank;
  bool full_row_rank;
};

inline void require_dim(const SdpProblem& p, const SymMatrix& x, const char* what) {
  if (x.dim() != p.n())
    throw Error(Errc::DimensionMismatch, std::string(what) + " has dimension " +
                                             std::to_string(x.dim()) + ", expected " +
                                             std::to_string(p.n()));
}

inline void require_len(const SdpProblem& p, const Vector& y, const char* what) {
  if (y.size() != p.m())
    throw Error(Errc::DimensionMismatch, std::string(what) + " has length " +
                                             std::to_string(y.size()) + ", expected " +
                                             std::to_string(p.m()));
}

inline Vector apply_A(const SdpProblem& p, const SymMatrix& x) {
  require_dim(p, x, "X");
  Vector out(p.m());
  for (int i = 0; i < p.m(); ++i) out(i) = frob_inner(p.constraint(i), x);
  return out;
}

inline SymMatrix apply_Astar(const SdpProblem& p, const Vector& y) {
  require_len(p, y, "y");
  Matrix out = Matrix::Zero(p.n(), p.n());
  for (int i = 0; i < p.m(); ++i) out += y(i) * p.constraint(i).dense();
  return SymMatrix(std::move(out));
}

inline KktResiduals kkt_residuals(const SdpProblem& p, const SymMatrix& x, const Vector& y,
                                  const SymMatrix& z) {
  require_dim(p, x, "X");
  require_dim(p, z, "Z");
  require_len(p, y, "y");
  const double primal = (apply_A(p, x) - p.rhs()).norm();
  const double dual = (p.cost() - apply_Astar(p, y) - z).frobenius_norm();
  const double gap = std::abs(frob_inner(x, z)) / p.n();
  return {primal, dual, gap};
}

inline double primal_objective(const SdpProblem& p, const SymMatrix& x) {
  return frob_inner(p.cost(), x);
}

inline double dual_objective(const SdpProblem& p, const Vector& y) { return p.rhs().dot(y); }

/// Numerical rank of the vectorized constraint operator, by column-pivoted
/// QR of A^T with threshold 1e-10 * |R_11|.
inline RankReport validate_rank(const SdpProblem& p) {
  const Matrix at = p.vectorized_constraints().transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(at);
  if (qr.maxPivot() == 0.0) return {0, false};
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  return {rank, rank == p.m()};
}

}  // namespace ippmm
