#pragma once

#include <cstdint>

#include "covsel/problem.hpp"
#include "covsel/symmat.hpp"

namespace covsel {

/// Counter-based generator "covsel-splitmix64-v1": draw c (c = 0, 1, ...) is the
/// SplitMix64 finalizer applied to seed + (c + 1) * 0x9E3779B97F4A7C15.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t counter) const { return mix(seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL); }
  std::uint64_t next() { return at(counter_++); }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
  /// Uniform on [-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

template <typename Scalar>
struct GenParams {
  Index n = 50;
  Scalar density = Scalar(0.01);
  Scalar tau = Scalar(0.15);
  Scalar theta = Scalar(1e-4);
  Scalar rho = Scalar(0.5);
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw InvalidInput("GenParams: n must be positive");
    if (!(density >= Scalar(0) && density <= Scalar(1))) throw InvalidInput("GenParams: density must lie in [0, 1]");
    if (!(theta > Scalar(0))) throw InvalidInput("GenParams: theta must be positive");
    if (!(tau >= Scalar(0))) throw InvalidInput("GenParams: tau must be nonnegative");
    if (!(rho > Scalar(0))) throw InvalidInput("GenParams: rho must be positive");
  }
};

template <typename Scalar>
struct GeneratedInstance {
  SymMatrix<Scalar> sigma;
  Scalar rho;
  std::int64_t a_offdiag_nonzeros;  // unordered pairs (i < j)
  Scalar lambda_min_b;
  Scalar lambda_min_sigma;

  Instance<Scalar> instance() const { return Instance<Scalar>(sigma, rho); }
};

/// Sparse diagonally dominant A, B = A^{-1} + tau V, sigma = B - min(lambda_min(B) - theta, 0) I.
///
/// Draw order: for each pair i < j (row-major) one uniform decides whether A_ij is
/// nonzero (probability `density`), followed by one uniform(-1, 1) value when it is;
/// then one uniform(-1, 1) per V_ij, i <= j, row-major.
template <typename Scalar>
GeneratedInstance<Scalar> generate_detailed(const GenParams<Scalar>& p) {
  p.validate();
  const Index n = p.n;
  SplitMix64 rng(p.seed);

  DenseMatrix<Scalar> a = DenseMatrix<Scalar>::Zero(n, n);
  std::int64_t nnz = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (rng.uniform01() < double(p.density)) {
        const Scalar v = Scalar(rng.uniform_pm1());
        a(i, j) = v;
        a(j, i) = v;
        ++nnz;
      }
    }
  }
  for (Index i = 0; i < n; ++i) a(i, i) = Scalar(1) + a.row(i).cwiseAbs().sum();

  DenseMatrix<Scalar> v = DenseMatrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const Scalar x = Scalar(rng.uniform_pm1());
      v(i, j) = x;
      v(j, i) = x;
    }
  }

  Eigen::LLT<DenseMatrix<Scalar>> llt(a);
  if (llt.info() != Eigen::Success) throw InternalInconsistency("generate: A is not positive definite");
  const DenseMatrix<Scalar> a_inv = llt.solve(DenseMatrix<Scalar>::Identity(n, n));
  const auto b = SymMatrix<Scalar>::from_dense(a_inv + p.tau * v);
  const Scalar lambda_min_b = eig_sym(b).gamma(0);
  const Scalar shift = std::min(lambda_min_b - p.theta, Scalar(0));
  auto sigma = SymMatrix<Scalar>::from_dense(b.dense() - shift * DenseMatrix<Scalar>::Identity(n, n));
  const Scalar lambda_min_sigma = eig_sym(sigma).gamma(0);
  return {std::move(sigma), p.rho, nnz, lambda_min_b, lambda_min_sigma};
}

template <typename Scalar>
Instance<Scalar> generate(const GenParams<Scalar>& p) {
  return generate_detailed(p).instance();
}

}  // namespace covsel
