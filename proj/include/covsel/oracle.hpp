#pragma once

#include <algorithm>
#include <cmath>

#include "covsel/problem.hpp"
#include "covsel/symmat.hpp"

namespace covsel {

/// Relative tolerance for deciding that the top eigenvalue sits on the cap.
inline constexpr double kActivityTol = 1e-9;

/// Maximizer of log(l) - gamma l over l in [alpha, beta_hat].
template <typename Scalar>
Scalar clamp_eigenvalue(Scalar gamma, Scalar alpha, Scalar beta_hat) {
  if (gamma > Scalar(0)) return std::min(std::max(Scalar(1) / gamma, alpha), beta_hat);
  return beta_hat;
}

/// Active: the top eigenvalue hits the working cap and the cap is below the global top.
template <typename Scalar>
bool is_active(Scalar lambda_max, Scalar beta_hat, Scalar beta_global) {
  const Scalar tol = Scalar(kActivityTol);
  return lambda_max >= beta_hat * (Scalar(1) - tol) && beta_hat < beta_global * (Scalar(1) - tol);
}

/// Dual oracle output at U for the box [alpha, beta_hat].
template <typename Scalar>
struct OracleEval {
  SymMatrix<Scalar> x_of_u;
  Scalar f_value;
  SymMatrix<Scalar> grad_f;
  Vector<Scalar> gamma;   // eigenvalues of sigma + rho U, ascending
  Vector<Scalar> lambda;  // clamped eigenvalues of x_of_u
  Scalar lambda_max;
  bool is_active;
  Scalar alpha;
  Scalar beta_hat;
  Scalar beta_global;
  DenseMatrix<Scalar> q;  // eigenvectors shared by sigma + rho U and x_of_u
};

namespace detail {

template <typename Scalar>
OracleEval<Scalar> finish_eval(DenseMatrix<Scalar> q, Vector<Scalar> gamma, Scalar rho, Scalar alpha,
                               Scalar beta_hat, Scalar beta_global) {
  Vector<Scalar> lambda(gamma.size());
  for (Index i = 0; i < gamma.size(); ++i) lambda(i) = clamp_eigenvalue(gamma(i), alpha, beta_hat);
  const Scalar lambda_max = lambda.maxCoeff();
  const Scalar f = -gamma.dot(lambda) + logdet_from_eigs(lambda);
  auto x = assemble<Scalar>(q, lambda);
  auto grad = SymMatrix<Scalar>::from_dense(-rho * x.dense());
  return {std::move(x),
          f,
          std::move(grad),
          std::move(gamma),
          std::move(lambda),
          lambda_max,
          is_active(lambda_max, beta_hat, beta_global),
          alpha,
          beta_hat,
          beta_global,
          std::move(q)};
}

}  // namespace detail

/// f(U) = max over alpha I <= X <= beta_hat I of log det X - <sigma + rho U, X>, with its
/// maximizer X(U) and gradient -rho X(U), from one eigendecomposition of sigma + rho U.
template <typename Scalar>
OracleEval<Scalar> eval_dual(const SymMatrix<Scalar>& u, const Instance<Scalar>& inst, Scalar alpha,
                             Scalar beta_hat, Scalar beta_global) {
  if (u.n() != inst.n()) throw InvalidInput("eval_dual: dimension mismatch");
  if (!(alpha <= beta_hat && beta_hat <= beta_global)) throw InvalidInput("eval_dual: need alpha <= beta_hat <= beta");
  const auto m = SymMatrix<Scalar>::from_dense(inst.sigma().dense() + inst.rho() * u.dense());
  auto eig = eig_sym(m);
  return detail::finish_eval(std::move(eig.q), std::move(eig.gamma), inst.rho(), alpha, beta_hat, beta_global);
}

/// Same U, different cap. Reuses the stored eigendecomposition.
template <typename Scalar>
OracleEval<Scalar> reclamp(const OracleEval<Scalar>& ev, const Instance<Scalar>& inst, Scalar beta_hat) {
  if (!(ev.alpha <= beta_hat && beta_hat <= ev.beta_global)) throw InvalidInput("reclamp: cap outside [alpha, beta]");
  return detail::finish_eval(ev.q, ev.gamma, inst.rho(), ev.alpha, beta_hat, ev.beta_global);
}

/// g(X) = log det X - <sigma, X> - rho e^T |X| e.
template <typename Scalar>
Scalar eval_primal(const SymMatrix<Scalar>& x, const Instance<Scalar>& inst) {
  if (x.n() != inst.n()) throw InvalidInput("eval_primal: dimension mismatch");
  return logdet_cholesky(x) - inner(inst.sigma(), x) - inst.rho() * abs_sum(x);
}

/// g(X(U)) using the known eigenvalues of X(U) for the log-det term.
template <typename Scalar>
Scalar primal_at(const OracleEval<Scalar>& ev, const Instance<Scalar>& inst) {
  return logdet_from_eigs(ev.lambda) - inner(inst.sigma(), ev.x_of_u) - inst.rho() * abs_sum(ev.x_of_u);
}

/// f_{beta_hat}(u) - g(x). Nonnegative up to round-off for u in the unit box and x in the box.
template <typename Scalar>
Scalar duality_gap(const SymMatrix<Scalar>& u, const SymMatrix<Scalar>& x, const Instance<Scalar>& inst,
                   Scalar alpha, Scalar beta_hat, Scalar beta_global) {
  return eval_dual(u, inst, alpha, beta_hat, beta_global).f_value - eval_primal(x, inst);
}

}  // namespace covsel
