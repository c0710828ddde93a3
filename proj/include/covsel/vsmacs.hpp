#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "covsel/oracle.hpp"
#include "covsel/smacs.hpp"

namespace covsel {

template <typename Scalar>
struct AdaptiveConfig {
  Scalar varsigma1 = Scalar(1.05);  // escalation factor
  Scalar varsigma2 = Scalar(1.05);  // headroom above lambda_max after a shrink
  Scalar varsigma3 = Scalar(0.95);  // shrink trigger
  Scalar eps = Scalar(0.1);
  std::int64_t max_iter = 50000;  // oracle evaluations summed over restarts
  std::optional<SymMatrix<Scalar>> u0;

  void validate() const {
    if (!(varsigma1 > Scalar(1)) || !(varsigma2 > Scalar(1))) throw InvalidInput("AdaptiveConfig: varsigma1, varsigma2 must exceed 1");
    if (!(varsigma3 > Scalar(0) && varsigma3 < Scalar(1))) throw InvalidInput("AdaptiveConfig: varsigma3 must lie in (0, 1)");
    if (!(eps > Scalar(0))) throw InvalidInput("AdaptiveConfig: eps must be positive");
    if (max_iter < 0) throw InvalidInput("AdaptiveConfig: max_iter must be nonnegative");
  }
};

enum class Activity { active, inactive };

template <typename Scalar>
Activity classify(const OracleEval<Scalar>& ev, Scalar beta_global) {
  return is_active(ev.lambda_max, ev.beta_hat, beta_global) ? Activity::active : Activity::inactive;
}

/// Smallest s >= 1 such that the evaluation re-clamped at min(varsigma1^s beta_hat, beta)
/// is inactive. Works on the eigenvalues gamma of sigma + rho U alone.
template <typename Scalar>
Scalar escalate(const Vector<Scalar>& gamma, Scalar alpha, Scalar beta_hat, Scalar beta, Scalar varsigma1) {
  for (int s = 1;; ++s) {
    const Scalar candidate = std::min(beta_hat * std::pow(varsigma1, Scalar(s)), beta);
    if (candidate >= beta) return beta;
    Scalar lambda_max = alpha;
    for (Index i = 0; i < gamma.size(); ++i) lambda_max = std::max(lambda_max, clamp_eigenvalue(gamma(i), alpha, candidate));
    if (!is_active(lambda_max, candidate, beta)) return candidate;
  }
}

/// max(min(varsigma2 lambda_max, beta), alpha).
template <typename Scalar>
Scalar shrink(Scalar lambda_max, Scalar alpha, Scalar beta, Scalar varsigma2) {
  return std::max(std::min(varsigma2 * lambda_max, beta), alpha);
}

/// Accelerated dual scheme with an adaptive cap beta_hat on the spectrum of X,
/// restarted whenever the cap moves, stopped on the one-evaluation gap
/// f_{beta_hat}(U_k) - g(X_{beta_hat}(U_k)). One eigendecomposition per iteration.
template <typename Scalar>
SolveReport<Scalar> solve_vsmacs(const Instance<Scalar>& inst, const SpectralBox<Scalar>& box,
                                 const AdaptiveConfig<Scalar>& cfg, const TraceSink<Scalar>& sink = {}) {
  cfg.validate();
  if (!(inst.rho() > Scalar(0))) throw InvalidInput("solve_vsmacs: rho must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t eig_start = eig_call_count();
  const Index n = inst.n();
  const Scalar alpha = box.alpha;
  const Scalar beta = box.beta;
  const Scalar rho2 = inst.rho() * inst.rho();

  SymMatrix<Scalar> u0 = cfg.u0 ? *cfg.u0 : SymMatrix<Scalar>::zero(n);
  if (u0.n() != n) throw InvalidInput("solve_vsmacs: u0 dimension mismatch");

  Scalar beta_hat = beta;
  AcceleratedDualScheme<Scalar> scheme(std::move(u0), rho2 * beta_hat * beta_hat);
  SolveReport<Scalar> report;
  std::int64_t restarts = 0;

  for (std::int64_t total = 0;; ++total) {
    const auto& st = scheme.state();
    auto ev = eval_dual(st.u_k, inst, alpha, beta_hat, beta);
    ++report.evaluations;

    if (ev.is_active) {
      beta_hat = escalate(ev.gamma, alpha, beta_hat, beta, cfg.varsigma1);
      ev = reclamp(ev, inst, beta_hat);
      scheme.restart(st.u_k, rho2 * beta_hat * beta_hat);
      ++restarts;
    } else if (ev.lambda_max <= cfg.varsigma3 * beta_hat) {
      beta_hat = shrink(ev.lambda_max, alpha, beta, cfg.varsigma2);
      ev = reclamp(ev, inst, beta_hat);
      scheme.restart(st.u_k, rho2 * beta_hat * beta_hat);
      ++restarts;
    }
    if (ev.is_active) throw InternalInconsistency("solve_vsmacs: evaluation still active after cap update");

    const Scalar g_cur = primal_at(ev, inst);
    const Scalar gap = ev.f_value - g_cur;
    detail::emit(report, sink, {total, ev.f_value, g_cur, gap, gap, beta_hat, restarts, detail::elapsed_ms(start)});

    const bool done = gap <= cfg.eps;
    if (done || total >= cfg.max_iter) {
      report.status = done ? SolveStatus::converged : SolveStatus::max_iter_reached;
      report.iterations = total;
      report.final_gap = gap;
      report.dual_obj = ev.f_value;
      report.primal_obj = g_cur;
      report.x_star = ev.x_of_u;
      report.u_star = st.u_k;
      break;
    }
    scheme.absorb(ev);
    scheme.advance();
  }

  report.beta_hat = beta_hat;
  report.restart_count = restarts;
  report.eig_calls = eig_call_count() - eig_start;
  report.total_ms = detail::elapsed_ms(start);
  return report;
}

}  // namespace covsel
