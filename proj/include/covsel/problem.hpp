#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "covsel/symmat.hpp"

namespace covsel {

/// Sample covariance `sigma` (PSD up to round-off) and penalty weight `rho` >= 0 (the solvers need rho > 0).
template <typename Scalar>
class Instance {
 public:
  Instance(SymMatrix<Scalar> sigma, Scalar rho) : sigma_(std::move(sigma)), rho_(rho) {
    if (!(rho_ >= Scalar(0)) || !std::isfinite(double(rho_))) throw InvalidInput("Instance: rho must be nonnegative");
    if (sigma_.n() < 1) throw InvalidInput("Instance: empty covariance");
    const auto gamma = eig_sym(sigma_).gamma;
    const Scalar norm = gamma.cwiseAbs().maxCoeff();
    if (gamma(0) < -Scalar(1e-8) * (Scalar(1) + norm)) {
      throw InvalidInput("Instance: covariance is not positive semidefinite (lambda_min = " +
                         std::to_string(double(gamma(0))) + ")");
    }
  }

  const SymMatrix<Scalar>& sigma() const { return sigma_; }
  Scalar rho() const { return rho_; }
  Index n() const { return sigma_.n(); }

 private:
  SymMatrix<Scalar> sigma_;
  Scalar rho_;
};

/// Eigenvalue bounds alpha I <= X <= beta I of the primal feasible set.
template <typename Scalar>
struct SpectralBox {
  Scalar alpha;
  Scalar beta;

  SpectralBox(Scalar a, Scalar b) : alpha(a), beta(b) {
    if (!(alpha > Scalar(0)) || !(alpha <= beta) || !std::isfinite(double(beta))) {
      throw InvalidInput("SpectralBox: need 0 < alpha <= beta < inf");
    }
  }

  Scalar condition() const { return beta / alpha; }
};

/// Eigenvalue bounds that provably contain the solution of the unconstrained
/// penalized problem.
template <typename Scalar>
SpectralBox<Scalar> compute_bounds(const Instance<Scalar>& inst) {
  if (!(inst.rho() > Scalar(0))) throw InvalidInput("compute_bounds: rho must be positive");
  const Index n = inst.n();
  const Scalar nn = Scalar(n);
  const Scalar rho = inst.rho();
  const auto& sigma = inst.sigma();
  const auto eig = eig_sym(sigma);
  const Scalar norm = eig.gamma.cwiseAbs().maxCoeff();
  const Scalar lambda_min = eig.gamma(0);

  const Scalar alpha = Scalar(1) / (norm + nn * rho);
  const Scalar trace_bound = (nn - alpha * sigma.dense().trace()) / rho;

  Scalar eta;
  if (lambda_min > Scalar(1e-10) * (Scalar(1) + norm)) {
    const auto inv = assemble<Scalar>(eig.q, eig.gamma.cwiseInverse());
    const Scalar inv_norm = Scalar(1) / lambda_min;
    eta = std::min(abs_sum(inv), (nn - rho * std::sqrt(nn) * alpha) * inv_norm - (nn - Scalar(1)) * alpha);
  } else {
    const Vector<Scalar> shifted = (eig.gamma.array() + rho / Scalar(2)).inverse().matrix();
    const auto inv = assemble<Scalar>(eig.q, shifted);
    eta = Scalar(2) * abs_sum(inv) - shifted.sum();
  }
  Scalar beta = std::min(trace_bound, eta);

  // Equality is attainable (n = 1); anything below alpha beyond round-off is a bug.
  const Scalar slack = Scalar(1e-10) * (Scalar(1) + alpha);
  if (beta < alpha - slack) {
    throw InternalInconsistency("compute_bounds: beta " + std::to_string(double(beta)) + " < alpha " +
                                std::to_string(double(alpha)));
  }
  beta = std::max(beta, alpha);
  return SpectralBox<Scalar>(alpha, beta);
}

/// alpha I <= x <= beta I up to tolerance 1e-8 (1 + beta).
template <typename Scalar>
bool in_spectral_box(const SymMatrix<Scalar>& x, const SpectralBox<Scalar>& box) {
  const auto gamma = eig_sym(x).gamma;
  const Scalar tol = Scalar(1e-8) * (Scalar(1) + box.beta);
  return box.alpha - tol <= gamma(0) && gamma(gamma.size() - 1) <= box.beta + tol;
}

/// Every |u_ij| <= 1 (+1e-12).
template <typename Scalar>
bool in_unit_box(const SymMatrix<Scalar>& u) {
  return u.n() == 0 || u.dense().cwiseAbs().maxCoeff() <= Scalar(1) + Scalar(1e-12);
}

}  // namespace covsel
