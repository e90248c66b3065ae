#pragma once

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "ippmm/problem.hpp"

namespace ippmm {

/// Evaluates ||(b, C)||_S = min { ||(vec X, vec Z)||_2 : A vec X = b, A^T y + vec Z = vec C }.
///
/// The program decouples: X is the minimum-norm solution of A x = b and Z is
/// the component of vec(C) orthogonal to range(A^T). Both come from one
/// column-pivoted QR of A^T, factored once per problem.
class SeminormEvaluator {
 public:
  static SeminormEvaluator build(const SdpProblem& p) { return SeminormEvaluator(p); }

  int rank() const noexcept { return rank_; }
  int m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  bool full_row_rank() const noexcept { return rank_ == m_; }

  /// Returns +infinity when b is outside range(A) (rank-deficient A only).
  double eval(const Vector& rhs_b, const Matrix& rhs_c) const {
    if (rhs_b.size() != m_ || rhs_c.rows() != n_ || rhs_c.cols() != n_)
      throw Error(Errc::DimensionMismatch, "semi-norm operands do not match the problem");
    const double x2 = min_norm_sq(rhs_b);
    if (!std::isfinite(x2)) return std::numeric_limits<double>::infinity();
    const Vector c = vec(rhs_c);
    const Vector proj = basis_ * (basis_.transpose() * c);
    const double z2 = (c - proj).squaredNorm();
    return std::sqrt(x2 + z2);
  }

  double eval(const Vector& rhs_b, const SymMatrix& rhs_c) const { return eval(rhs_b, rhs_c.dense()); }

 private:
  explicit SeminormEvaluator(const SdpProblem& p) : m_(p.m()), n_(p.n()) {
    const Matrix at = p.vectorized_constraints().transpose();
    Eigen::ColPivHouseholderQR<Matrix> qr(at);
    qr.setThreshold(1e-10);
    rank_ = qr.maxPivot() == 0.0 ? 0 : static_cast<int>(qr.rank());
    const Eigen::Index rows = at.rows();
    basis_ = (qr.householderQ() * Matrix::Identity(rows, rank_)).eval();
    r_top_ = qr.matrixQR().topRows(rank_).triangularView<Eigen::Upper>();
    perm_ = qr.colsPermutation();
  }

  // ||w||^2 where A Q1 w = b, Q1 the orthonormal basis of range(A^T).
  // A^T P = Q R gives A Q1 = P R_top^T, so R_top^T w = P^T b.
  double min_norm_sq(const Vector& b) const {
    if (rank_ == 0) return b.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const Vector pb = perm_.transpose() * b;
    const Matrix r11 = r_top_.leftCols(rank_);
    const Vector w = r11.transpose().triangularView<Eigen::Lower>().solve(pb.head(rank_));
    if (rank_ < m_) {
      const Vector tail = r_top_.rightCols(m_ - rank_).transpose() * w;
      const double mismatch = (tail - pb.tail(m_ - rank_)).norm();
      if (mismatch > 1e-10 * (1.0 + b.norm())) return std::numeric_limits<double>::infinity();
    }
    return w.squaredNorm();
  }

  int m_;
  int n_;
  int rank_ = 0;
  Matrix basis_;
  Matrix r_top_;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm_;
};

}  // namespace ippmm
