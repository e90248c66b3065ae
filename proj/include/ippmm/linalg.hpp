#pragma once

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "ippmm/error.hpp"

namespace ippmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Every constructor symmetrizes its input as
/// (M + M^T)/2, so entries (i,j) and (j,i) are bitwise equal.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m) : data_(symmetrized(m)) {}
  explicit SymMatrix(Matrix&& m) : data_(std::move(m)) { symmetrize_in_place(); }

  static SymMatrix zero(int n) { return SymMatrix(Matrix::Zero(check_dim(n), n)); }
  static SymMatrix identity(int n) { return SymMatrix(Matrix::Identity(check_dim(n), n)); }
  static SymMatrix diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

  int dim() const noexcept { return static_cast<int>(data_.rows()); }
  double operator()(int i, int j) const { return data_(i, j); }
  const Matrix& dense() const noexcept { return data_; }
  double frobenius_norm() const { return data_.norm(); }
  double trace() const { return data_.trace(); }

  SymMatrix& operator+=(const SymMatrix& o) {
    require_same(o);
    data_ += o.data_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    require_same(o);
    data_ -= o.data_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    data_ *= s;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

  /// Adds s*I.
  SymMatrix& shift_diagonal(double s) {
    data_.diagonal().array() += s;
    return *this;
  }

  bool operator==(const SymMatrix& o) const { return data_ == o.data_; }

 private:
  static int check_dim(int n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "matrix dimension must be >= 1");
    return n;
  }

  static Matrix symmetrized(const Matrix& m) {
    Matrix out = m;
    symmetrize(out);
    return out;
  }

  static void symmetrize(Matrix& m) {
    if (m.rows() != m.cols())
      throw Error(Errc::DimensionMismatch, "symmetric matrix must be square");
    check_dim(static_cast<int>(m.rows()));
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j + 1; i < n; ++i) {
        const double avg = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = avg;
        m(j, i) = avg;
      }
    }
  }

  void symmetrize_in_place() { symmetrize(data_); }

  void require_same(const SymMatrix& o) const {
    if (o.dim() != dim())
      throw Error(Errc::DimensionMismatch,
                  "dimensions " + std::to_string(dim()) + " and " + std::to_string(o.dim()));
  }

  Matrix data_;
};

struct SpectralDecomposition {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors;
};

/// Positive-definiteness floor shared by is_pd, sqrt_pd and invsqrt_pd.
inline double pd_floor(const SymMatrix& m) { return 1e-13 * (1.0 + m.frobenius_norm()); }

/// Column-stacked vectorization.
inline Vector vec(const SymMatrix& m) {
  return Eigen::Map<const Vector>(m.dense().data(), m.dense().size());
}

inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

/// Reshapes a length-n^2 vector column-wise into an n x n matrix (no symmetry check).
inline Matrix unvec(const Vector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n < 1 || n * n != v.size())
    throw Error(Errc::NonSquareLength, "length " + std::to_string(v.size()) + " is not a square");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

inline SymMatrix mat(const Vector& v) {
  Matrix m = unvec(v);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw Error(Errc::AsymmetricInput, "reshaped matrix asymmetric by " + std::to_string(asym));
  return SymMatrix(std::move(m));
}

inline SpectralDecomposition sym_eig(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.dense());
  if (es.info() != Eigen::Success)
    throw Error(Errc::ConvergenceFailure, "symmetric eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

template <class F>
SymMatrix spectral_map(const SpectralDecomposition& sd, F&& f) {
  const Vector mapped = sd.eigenvalues.unaryExpr(f);
  return SymMatrix(Matrix(sd.eigenvectors * mapped.asDiagonal() * sd.eigenvectors.transpose()));
}

inline SpectralDecomposition require_pd(const SymMatrix& m) {
  SpectralDecomposition sd = sym_eig(m);
  if (!(sd.eigenvalues(0) > pd_floor(m)))
    throw Error(Errc::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(sd.eigenvalues(0)) + " below floor");
  return sd;
}

}  // namespace detail

inline SymMatrix sqrt_pd(const SymMatrix& m) {
  return detail::spectral_map(detail::require_pd(m), [](double x) { return std::sqrt(x); });
}

inline SymMatrix invsqrt_pd(const SymMatrix& m) {
  return detail::spectral_map(detail::require_pd(m), [](double x) { return 1.0 / std::sqrt(x); });
}

/// Pivoted LDL^T; every pivot must clear pd_floor.
inline bool is_pd(const SymMatrix& m) {
  if (!m.dense().allFinite()) return false;
  Eigen::LDLT<Matrix> ldlt(m.dense());
  if (ldlt.info() != Eigen::Success) return false;
  return ldlt.vectorD().minCoeff() > pd_floor(m);
}

inline double frob_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim())
    throw Error(Errc::DimensionMismatch,
                "frob_inner of " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  return a.dense().cwiseProduct(b.dense()).sum();
}

/// Dense Kronecker product a (x) b.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace ippmm
