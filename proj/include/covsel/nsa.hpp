#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>

#include "covsel/oracle.hpp"
#include "covsel/smacs.hpp"

namespace covsel {

// Smooth-approximation baseline: maximize a smoothed primal g_mu over the spectral
// box with the accelerated scheme. The inner problem defining g_mu adds the prox
// term mu ||U||_F^2 / 2, so |g_mu - g| <= mu n^2 / 2 = eps / 2 on the box.
// Primal steps: Frobenius projection for the gradient step, and the prox-function
// d(X) = -log det X + n log beta (modulus 1 / beta^2, center beta I) for the
// aggregated step.

template <typename Scalar>
struct SmoothedPrimal {
  Scalar mu;         // eps / (2 d_hat_max)
  Scalar d_hat_max;  // n^2 / 2
  Scalar lipschitz;  // 1 / alpha^2 + rho^2 / mu
};

template <typename Scalar>
SmoothedPrimal<Scalar> make_smoothed_primal(Index n, Scalar rho, Scalar eps, Scalar alpha) {
  if (!(eps > Scalar(0))) throw InvalidInput("make_smoothed_primal: eps must be positive");
  const Scalar d_hat = Scalar(n) * Scalar(n) / Scalar(2);
  const Scalar mu = eps / (Scalar(2) * d_hat);
  return {mu, d_hat, Scalar(1) / (alpha * alpha) + rho * rho / mu};
}

template <typename Scalar>
struct SmoothedEval {
  Scalar value;
  SymMatrix<Scalar> gradient;
  SymMatrix<Scalar> u_star;  // inner minimizer
};

/// Inner minimizer U*(X) = clamp(rho X / mu, [-1, 1]).
template <typename Scalar>
SymMatrix<Scalar> smoothing_dual(const SymMatrix<Scalar>& x, Scalar rho, Scalar mu) {
  return SymMatrix<Scalar>::from_dense((rho / mu * x.dense()).cwiseMax(Scalar(-1)).cwiseMin(Scalar(1)));
}

template <typename Scalar>
SmoothedEval<Scalar> smoothed_value_grad(const SymMatrix<Scalar>& x, const Instance<Scalar>& inst,
                                         const SmoothedPrimal<Scalar>& sp) {
  if (x.n() != inst.n()) throw InvalidInput("smoothed_value_grad: dimension mismatch");
  Eigen::LLT<DenseMatrix<Scalar>> llt(x.dense());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("smoothed_value_grad: X is not positive definite");
  const Scalar logdet = Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
  const DenseMatrix<Scalar> x_inv = llt.solve(DenseMatrix<Scalar>::Identity(x.n(), x.n()));

  const Scalar rho = inst.rho();
  auto u = smoothing_dual(x, rho, sp.mu);
  const Scalar value = logdet - inner(inst.sigma(), x) - rho * inner(u, x) +
                       sp.mu / Scalar(2) * u.dense().squaredNorm();
  auto grad = SymMatrix<Scalar>::from_dense(x_inv - inst.sigma().dense() - rho * u.dense());
  return {value, std::move(grad), std::move(u)};
}

/// Frobenius projection onto alpha I <= X <= beta I.
template <typename Scalar>
SymMatrix<Scalar> project_spectral_box(const SymMatrix<Scalar>& m, const SpectralBox<Scalar>& box) {
  auto eig = eig_sym(m);
  const Vector<Scalar> clamped = eig.gamma.cwiseMax(box.alpha).cwiseMin(box.beta);
  return assemble<Scalar>(eig.q, clamped);
}

/// argmin over the box of -c log det X - <s, X>: eigenvalues of s mapped through the
/// same clamp rule as the dual oracle.
template <typename Scalar>
SymMatrix<Scalar> logdet_prox_step(const SymMatrix<Scalar>& s, Scalar c, const SpectralBox<Scalar>& box) {
  auto eig = eig_sym(s);
  Vector<Scalar> x(eig.gamma.size());
  for (Index i = 0; i < x.size(); ++i) x(i) = clamp_eigenvalue(-eig.gamma(i) / c, box.alpha, box.beta);
  return assemble<Scalar>(eig.q, x);
}

template <typename Scalar>
SolveReport<Scalar> solve_nsa(const Instance<Scalar>& inst, const SpectralBox<Scalar>& box, Scalar eps,
                              std::int64_t max_iter = 200000, const TraceSink<Scalar>& sink = {}) {
  if (!(eps > Scalar(0))) throw InvalidInput("solve_nsa: eps must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t eig_start = eig_call_count();
  const Index n = inst.n();
  const auto sp = make_smoothed_primal(n, inst.rho(), eps, box.alpha);
  const Scalar lipschitz = sp.lipschitz;

  // Prox-center of d(X) = -log det X + n log beta over the box is beta I.
  const auto x0 = SymMatrix<Scalar>::from_dense(box.beta * DenseMatrix<Scalar>::Identity(n, n));
  const Scalar prox_weight = lipschitz * box.beta * box.beta;  // L / sigma, sigma = 1 / beta^2
  SymMatrix<Scalar> x_k = x0;
  DenseMatrix<Scalar> grad_accum = DenseMatrix<Scalar>::Zero(n, n);
  SolveReport<Scalar> report;
  report.beta_hat = box.beta;

  for (std::int64_t k = 0;; ++k) {
    const auto sv = smoothed_value_grad(x_k, inst, sp);
    ++report.evaluations;
    const auto y_k = project_spectral_box(SymMatrix<Scalar>::from_dense(x_k.dense() + sv.gradient.dense() / lipschitz), box);

    const auto u_k = smoothing_dual(y_k, inst.rho(), sp.mu);
    const Scalar f_dual = eval_dual(u_k, inst, box.alpha, box.beta, box.beta).f_value;
    const Scalar g_primal = eval_primal(y_k, inst);
    const Scalar gap = f_dual - g_primal;
    detail::emit(report, sink, {k, f_dual, g_primal, gap, gap, box.beta, 0, detail::elapsed_ms(start)});

    const bool done = gap <= eps;
    if (done || k >= max_iter) {
      report.status = done ? SolveStatus::converged : SolveStatus::max_iter_reached;
      report.iterations = k;
      report.final_gap = gap;
      report.dual_obj = f_dual;
      report.primal_obj = g_primal;
      report.x_star = y_k;
      report.u_star = u_k;
      break;
    }

    grad_accum += Scalar(k + 1) / Scalar(2) * sv.gradient.dense();
    const auto z_k = logdet_prox_step(SymMatrix<Scalar>::from_dense(grad_accum), prox_weight, box);
    const Scalar kk = Scalar(k);
    x_k = SymMatrix<Scalar>::from_dense(Scalar(2) / (kk + 3) * z_k.dense() + (kk + 1) / (kk + 3) * y_k.dense());
  }

  report.eig_calls = eig_call_count() - eig_start;
  report.total_ms = detail::elapsed_ms(start);
  return report;
}

}  // namespace covsel
