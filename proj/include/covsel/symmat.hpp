#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "covsel/error.hpp"

namespace covsel {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {
inline thread_local std::uint64_t eig_calls = 0;
}  // namespace detail

/// Number of dense symmetric eigendecompositions performed on this thread.
/// Solvers are single-threaded, so differences of this counter around a solve
/// give its exact eigendecomposition count.
inline std::uint64_t eig_call_count() { return detail::eig_calls; }

/// Dense symmetric n x n matrix. Entries are exactly symmetric and finite.
template <typename Scalar>
class SymMatrix {
 public:
  using Dense = DenseMatrix<Scalar>;

  SymMatrix() = default;

  /// Symmetrizes via (M + M^T)/2 and records max |M - M^T| before symmetrizing.
  template <typename Derived>
  static SymMatrix from_dense(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
      throw InvalidInput("SymMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
    }
    if (!m.allFinite()) throw InvalidInput("SymMatrix: non-finite entry");
    SymMatrix s;
    s.entries_ = (m + m.transpose()) / Scalar(2);
    s.asymmetry_ = m.rows() == 0 ? Scalar(0) : (m - m.transpose()).cwiseAbs().maxCoeff();
    return s;
  }

  /// Like from_dense, but rejects inputs whose asymmetry exceeds `tol`.
  template <typename Derived>
  static SymMatrix from_dense_checked(const Eigen::MatrixBase<Derived>& m, Scalar tol = Scalar(1e-6)) {
    SymMatrix s = from_dense(m);
    if (s.asymmetry_ > tol) {
      throw InvalidInput("SymMatrix: asymmetry " + std::to_string(double(s.asymmetry_)) +
                         " exceeds tolerance");
    }
    return s;
  }

  static SymMatrix zero(Index n) { return from_symmetric(Dense::Zero(n, n)); }
  static SymMatrix identity(Index n) { return from_symmetric(Dense::Identity(n, n)); }
  static SymMatrix constant(Index n, Scalar v) { return from_symmetric(Dense::Constant(n, n, v)); }

  template <typename Derived>
  static SymMatrix diagonal(const Eigen::MatrixBase<Derived>& d) {
    Dense m = Dense::Zero(d.size(), d.size());
    m.diagonal() = d;
    return from_dense(m);
  }

  Index n() const { return entries_.rows(); }
  const Dense& dense() const { return entries_; }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }
  Scalar asymmetry() const { return asymmetry_; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.entries_ == b.entries_; }

 private:
  // Caller guarantees exact symmetry; only finiteness is checked.
  static SymMatrix from_symmetric(Dense m) {
    if (!m.allFinite()) throw InvalidInput("SymMatrix: non-finite entry");
    SymMatrix s;
    s.entries_ = std::move(m);
    return s;
  }

  Dense entries_;
  Scalar asymmetry_ = Scalar(0);
};

/// Eigendecomposition m = q diag(gamma) q^T, gamma ascending.
template <typename Scalar>
struct EigDecomposition {
  DenseMatrix<Scalar> q;
  Vector<Scalar> gamma;
};

template <typename Scalar>
EigDecomposition<Scalar> eig_sym(const SymMatrix<Scalar>& m) {
  ++detail::eig_calls;
  if (!m.dense().allFinite()) throw InvalidInput("eig_sym: non-finite entry");
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(m.dense(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericFailure("eig_sym: eigensolver did not converge");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

/// Q diag(d) Q^T, symmetrized.
template <typename Scalar>
SymMatrix<Scalar> assemble(const DenseMatrix<Scalar>& q, const Vector<Scalar>& d) {
  DenseMatrix<Scalar> m = q * d.asDiagonal() * q.transpose();
  return SymMatrix<Scalar>::from_dense(m);
}

template <typename Scalar>
Scalar spectral_norm(const SymMatrix<Scalar>& m) {
  if (m.n() == 0) return Scalar(0);
  return eig_sym(m).gamma.cwiseAbs().maxCoeff();
}

/// e^T |m| e.
template <typename Scalar>
Scalar abs_sum(const SymMatrix<Scalar>& m) {
  return m.dense().cwiseAbs().sum();
}

/// <a, b> = Tr(a b) for symmetric a, b.
template <typename Scalar>
Scalar inner(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b) {
  return a.dense().cwiseProduct(b.dense()).sum();
}

template <typename Scalar>
Scalar logdet_from_eigs(std::span<const Scalar> gamma) {
  Scalar total(0);
  for (Scalar g : gamma) {
    if (!(g > Scalar(0))) throw NotPositiveDefinite("logdet_from_eigs: non-positive eigenvalue");
    total += std::log(g);
  }
  return total;
}

template <typename Scalar>
Scalar logdet_from_eigs(const Vector<Scalar>& gamma) {
  return logdet_from_eigs(std::span<const Scalar>(gamma.data(), static_cast<std::size_t>(gamma.size())));
}

/// log det via Cholesky; throws NotPositiveDefinite when the factorization fails.
template <typename Scalar>
Scalar logdet_cholesky(const SymMatrix<Scalar>& m) {
  Eigen::LLT<DenseMatrix<Scalar>> llt(m.dense());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("logdet: matrix is not positive definite");
  const auto& l = llt.matrixLLT();
  Scalar total(0);
  for (Index i = 0; i < m.n(); ++i) {
    if (!(l(i, i) > Scalar(0))) throw NotPositiveDefinite("logdet: matrix is not positive definite");
    total += std::log(l(i, i));
  }
  return Scalar(2) * total;
}

}  // namespace covsel
