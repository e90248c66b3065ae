#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "ippmm/problem.hpp"

namespace ippmm {

struct FeasibleInstance {
  SdpProblem problem;
  SymMatrix X;  // rank r
  Vector y;
  SymMatrix Z;  // rank n - r, X Z = 0
};

namespace detail {

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Matrix matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = (*this)();
    return m;
  }

  SymMatrix symmetric(int n) {
    const Matrix g = matrix(n, n);
    return SymMatrix(Matrix(0.5 * (g + g.transpose())));
  }

  // Haar-distributed orthogonal matrix: QR of a Gaussian with sign-fixed R.
  Matrix orthogonal(int n) {
    Eigen::HouseholderQR<Matrix> qr(matrix(n, n));
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix& r = qr.matrixQR();
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace detail

/// Random instance with a known strictly complementary KKT triple.
/// X* = Q diag(d_1..d_r, 0..0) Q^T and Z* = Q diag(0..0, e_1..e_{n-r}) Q^T,
/// with d, e drawn from [0.5, 2]. b = A X*, C = A^* y* + Z*.
inline FeasibleInstance gen_feasible(int n, int m, int rank_r, std::uint64_t seed) {
  if (n < 2 || rank_r < 1 || rank_r > n - 1)
    throw Error(Errc::InvalidArgument, "gen_feasible needs 1 <= rank <= n-1, got rank " +
                                           std::to_string(rank_r) + " for n = " + std::to_string(n));
  if (m < 1 || m > n * (n + 1) / 2)
    throw Error(Errc::InvalidArgument, "gen_feasible needs 1 <= m <= n(n+1)/2, got m = " +
                                           std::to_string(m));

  detail::Gaussian g(seed);
  const Matrix q = g.orthogonal(n);
  Vector dx = Vector::Zero(n), dz = Vector::Zero(n);
  for (int i = 0; i < rank_r; ++i) dx(i) = g.uniform(0.5, 2.0);
  for (int i = rank_r; i < n; ++i) dz(i) = g.uniform(0.5, 2.0);
  SymMatrix x_star(Matrix(q * dx.asDiagonal() * q.transpose()));
  SymMatrix z_star(Matrix(q * dz.asDiagonal() * q.transpose()));

  constexpr int kMaxDraws = 10;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    std::vector<SymMatrix> mats;
    mats.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) mats.push_back(g.symmetric(n));
    Vector y_star(m);
    for (int i = 0; i < m; ++i) y_star(i) = g();

    SdpProblem probe(mats, Vector::Zero(m), SymMatrix::zero(n));
    if (!validate_rank(probe).full_row_rank) continue;

    const Vector b = apply_A(probe, x_star);
    SymMatrix c = apply_Astar(probe, y_star) + z_star;
    return {SdpProblem(std::move(mats), b, std::move(c)), x_star, y_star, z_star};
  }
  throw Error(Errc::RankDeficientDraw, "no full-rank constraint draw after 10 attempts");
}

/// <I, X> = -1 with C = I: primal infeasible because the trace of a psd
/// matrix is nonnegative.
inline SdpProblem gen_infeasible_trace(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "gen_infeasible_trace needs n >= 1");
  return SdpProblem({SymMatrix::identity(n)}, Vector::Constant(1, -1.0), SymMatrix::identity(n));
}

}  // namespace ippmm
