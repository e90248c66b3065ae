#pragma once

// Reference solutions for two families with closed-form or enumerable
// optima. Nothing here touches the Newton, neighbourhood or driver code.

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <bit>
#include <limits>
#include <optional>
#include <string>

#include "ippmm/problem.hpp"

namespace ippmm {

enum class Provenance { Analytic, BruteForce };

struct OracleSolution {
  SymMatrix X_star;
  Vector y_star;
  SymMatrix Z_star;
  double value;
  Provenance provenance;
};

/// min <C,X> s.t. Tr X = 1, X psd. The optimum sits on the eigenvector of the
/// smallest eigenvalue; ties take the first one.
inline OracleSolution solve_trace_sdp(const SymMatrix& c) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(c.dense());
  if (es.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "eigen solver failed");
  const double lmin = es.eigenvalues()(0);
  const Vector q = es.eigenvectors().col(0);
  SymMatrix z = c;
  z.shift_diagonal(-lmin);
  return {SymMatrix(Matrix(q * q.transpose())), Vector::Constant(1, lmin), std::move(z), lmin,
          Provenance::Analytic};
}

namespace detail {

inline bool is_diagonal(const SymMatrix& a) {
  const Matrix& d = a.dense();
  return (d - Matrix(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

struct Vertex {
  Vector x;
  double value;
};

// Minimizes c.x over {x >= 0, A x = b} by visiting every basic solution.
// Returns nullopt when no basic feasible solution exists.
inline std::optional<Vertex> enumerate_vertices(const Matrix& a, const Vector& b, const Vector& c) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  const double tol = 1e-9 * (1.0 + b.norm());
  std::optional<Vertex> best;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    if (k > m) continue;
    Vector x = Vector::Zero(n);
    if (k > 0) {
      Matrix cols(m, k);
      for (int j = 0, t = 0; j < n; ++j)
        if (mask & (1u << j)) cols.col(t++) = a.col(j);
      const Eigen::ColPivHouseholderQR<Matrix> qr(cols);
      if (qr.rank() < k) continue;
      const Vector xs = qr.solve(b);
      for (int j = 0, t = 0; j < n; ++j)
        if (mask & (1u << j)) x(j) = xs(t++);
    }
    if ((a * x - b).norm() > tol || x.minCoeff() < -tol) continue;
    x = x.cwiseMax(0.0);
    const double v = c.dot(x);
    if (!best || v < best->value) best = Vertex{std::move(x), v};
  }
  return best;
}

}  // namespace detail

/// Diagonal data turns the SDP into the LP min c.x s.t. A x = b, x >= 0 over
/// the diagonal of X. Solved by exhaustive basis enumeration, so n, m <= 8.
inline OracleSolution solve_diagonal_sdp(const SdpProblem& p) {
  const int n = p.n(), m = p.m();
  if (n > 8 || m > 8) throw Error(Errc::DimensionTooLarge, "diagonal oracle needs n, m <= 8");
  if (!detail::is_diagonal(p.cost())) throw Error(Errc::InvalidArgument, "cost matrix is not diagonal");
  Matrix a(m, n);
  for (int i = 0; i < m; ++i) {
    if (!detail::is_diagonal(p.constraint(i)))
      throw Error(Errc::InvalidArgument, "constraint " + std::to_string(i + 1) + " is not diagonal");
    a.row(i) = p.constraint(i).dense().diagonal().transpose();
  }
  const Vector c = p.cost().dense().diagonal();
  const Vector& b = p.rhs();

  const auto primal = detail::enumerate_vertices(a, b, c);
  if (!primal) throw Error(Errc::Infeasible, "no x >= 0 satisfies the diagonal constraints");

  // Unbounded iff some ray d >= 0 with A d = 0 has c.d < 0; normalize 1.d = 1.
  Matrix ar(m + 1, n);
  ar << a, Matrix::Ones(1, n);
  Vector br = Vector::Zero(m + 1);
  br(m) = 1.0;
  if (const auto ray = detail::enumerate_vertices(ar, br, c); ray && ray->value < -1e-12)
    throw Error(Errc::Unbounded, "objective decreases along a recession direction");

  // Dual: every minimal face of {y : A^T y <= c} is an affine set cut out by
  // its active rows, so the min-norm solution of some active set is optimal.
  const double vtol = 1e-9 * (1.0 + std::abs(primal->value));
  std::optional<Vector> dual;
  for (unsigned mask = 0; mask < (1u << n) && !dual; ++mask) {
    bool covers = true;
    for (int j = 0; j < n; ++j)
      if (primal->x(j) > 0.0 && !(mask & (1u << j))) covers = false;
    if (!covers) continue;
    const int k = std::popcount(mask);
    Vector y = Vector::Zero(m);
    if (k > 0) {
      Matrix rows(k, m);
      Vector rhs(k);
      for (int j = 0, t = 0; j < n; ++j)
        if (mask & (1u << j)) {
          rows.row(t) = a.col(j).transpose();
          rhs(t++) = c(j);
        }
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(rows);
      y = cod.solve(rhs);
      if ((rows * y - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) continue;
    }
    const Vector slack = c - a.transpose() * y;
    if (slack.minCoeff() < -1e-9 * (1.0 + c.norm())) continue;
    if (std::abs(b.dot(y) - primal->value) > vtol) continue;
    dual = std::move(y);
  }
  if (!dual) throw Error(Errc::ConvergenceFailure, "no dual vertex matches the primal optimum");

  const Vector slack = (c - a.transpose() * *dual).cwiseMax(0.0);
  return {SymMatrix::diagonal(primal->x), std::move(*dual), SymMatrix::diagonal(slack),
          primal->value, Provenance::BruteForce};
}

}  // namespace ippmm
