#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covsel/oracle.hpp"
#include "covsel/problem.hpp"
#include "covsel/symmat.hpp"

namespace covsel {

enum class SolveStatus { converged, max_iter_reached };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::converged ? "converged" : "max_iter_reached";
}

/// Which pair the stopping test is evaluated on.
enum class Termination {
  canonical,  // f(u_sd_k) - g(x_bar_k); a second eigendecomposition per iteration
  cheap,      // f(U_k) - g(X(U_k)); reuses the step-1 oracle evaluation
};

template <typename Scalar>
struct SolverConfig {
  Scalar eps = Scalar(0.1);
  std::optional<std::int64_t> max_iter;  // default: 2 * ceil(2 sqrt(L D / (sigma eps))) + 10
  std::optional<SymMatrix<Scalar>> u0;   // default: zero
  Scalar sigma_mod = Scalar(1);
  bool gap_bound_check = false;
  Termination termination = Termination::canonical;
};

template <typename Scalar>
struct IterRecord {
  std::int64_t k;
  Scalar f_dual;
  Scalar g_primal;
  Scalar gap;
  Scalar cheap_gap;  // f(U_k) - g(X(U_k)), always available from step 1
  Scalar beta_hat;
  std::int64_t restart_count;
  double wallclock_ms;
};

template <typename Scalar>
using TraceSink = std::function<void(const IterRecord<Scalar>&)>;

template <typename Scalar>
struct SolveReport {
  SolveStatus status = SolveStatus::max_iter_reached;
  std::int64_t iterations = 0;   // index k of the last iterate
  std::int64_t evaluations = 0;  // oracle evaluations at U_k (= iterations + 1)
  Scalar final_gap = Scalar(0);
  Scalar primal_obj = Scalar(0);
  Scalar dual_obj = Scalar(0);
  SymMatrix<Scalar> x_star;
  SymMatrix<Scalar> u_star;
  Scalar beta_hat = Scalar(0);
  std::int64_t restart_count = 0;
  std::uint64_t eig_calls = 0;
  std::vector<IterRecord<Scalar>> trace;
  double total_ms = 0.0;
};

/// Entrywise clamp to [-1, 1].
template <typename Scalar>
SymMatrix<Scalar> clip_unit_box(const SymMatrix<Scalar>& m) {
  return SymMatrix<Scalar>::from_dense(m.dense().cwiseMax(Scalar(-1)).cwiseMin(Scalar(1)));
}

/// argmin over the unit box of <grad, U - u_k> + (L/2) ||U - u_k||_F^2.
template <typename Scalar>
SymMatrix<Scalar> step_sd(const SymMatrix<Scalar>& u_k, const SymMatrix<Scalar>& grad, Scalar lipschitz) {
  return clip_unit_box(SymMatrix<Scalar>::from_dense(u_k.dense() - grad.dense() / lipschitz));
}

/// argmin over the unit box of (L / 2 sigma) ||U - u0||_F^2 + <grad_accum, U>.
template <typename Scalar>
SymMatrix<Scalar> step_ag(const SymMatrix<Scalar>& u0, const SymMatrix<Scalar>& grad_accum, Scalar lipschitz,
                          Scalar sigma_mod) {
  return clip_unit_box(SymMatrix<Scalar>::from_dense(u0.dense() - (sigma_mod / lipschitz) * grad_accum.dense()));
}

/// max over the unit box of ||U - u0||_F^2 / 2.
template <typename Scalar>
Scalar prox_diameter(const SymMatrix<Scalar>& u0) {
  return (u0.dense().cwiseAbs().array() + Scalar(1)).square().sum() / Scalar(2);
}

/// 4 L D / (sigma (k+1)(k+2)).
template <typename Scalar>
Scalar gap_bound(Scalar lipschitz, Scalar diameter, Scalar sigma_mod, std::int64_t k) {
  return Scalar(4) * lipschitz * diameter / (sigma_mod * Scalar(k + 1) * Scalar(k + 2));
}

/// ceil(2 sqrt(L D / (sigma eps))).
template <typename Scalar>
std::int64_t iteration_cap(Scalar lipschitz, Scalar diameter, Scalar sigma_mod, Scalar eps) {
  return static_cast<std::int64_t>(std::ceil(Scalar(2) * std::sqrt(lipschitz * diameter / (sigma_mod * eps))));
}

template <typename Scalar>
struct IterState {
  std::int64_t k = 0;
  SymMatrix<Scalar> u_k;
  SymMatrix<Scalar> x_bar;
  SymMatrix<Scalar> grad_accum;
  SymMatrix<Scalar> u_sd;
  SymMatrix<Scalar> u_ag;
};

/// State machine of the accelerated dual scheme with Frobenius prox-function
/// ||U - u0||^2 / 2. Each iteration is absorb(eval at u_k) followed by advance().
template <typename Scalar>
class AcceleratedDualScheme {
 public:
  AcceleratedDualScheme(SymMatrix<Scalar> u0, Scalar lipschitz, Scalar sigma_mod = Scalar(1))
      : sigma_mod_(sigma_mod) {
    restart(std::move(u0), lipschitz);
  }

  /// k = 0, u0 = u_k = given point, accumulators cleared.
  void restart(SymMatrix<Scalar> u0, Scalar lipschitz) {
    if (!in_unit_box(u0)) throw InvalidInput("AcceleratedDualScheme: u0 outside the unit box");
    if (!(lipschitz > Scalar(0))) throw InvalidInput("AcceleratedDualScheme: L must be positive");
    const Index n = u0.n();
    lipschitz_ = lipschitz;
    state_.k = 0;
    state_.u_k = u0;
    state_.x_bar = SymMatrix<Scalar>::zero(n);
    state_.grad_accum = SymMatrix<Scalar>::zero(n);
    state_.u_sd = u0;
    state_.u_ag = u0;
    u0_ = std::move(u0);
  }

  /// Steps 1-2: fold X(u_k) into the weighted average and take the gradient step.
  void absorb(const OracleEval<Scalar>& ev) {
    const Scalar k = Scalar(state_.k);
    state_.x_bar = SymMatrix<Scalar>::from_dense(k / (k + 2) * state_.x_bar.dense() +
                                                 Scalar(2) / (k + 2) * ev.x_of_u.dense());
    state_.u_sd = step_sd(state_.u_k, ev.grad_f, lipschitz_);
    grad_ = ev.grad_f;
  }

  /// Steps 3-4: aggregated prox step and the convex combination giving u_{k+1}.
  void advance() {
    const Scalar k = Scalar(state_.k);
    state_.grad_accum =
        SymMatrix<Scalar>::from_dense(state_.grad_accum.dense() + (k + 1) / Scalar(2) * grad_.dense());
    state_.u_ag = step_ag(u0_, state_.grad_accum, lipschitz_, sigma_mod_);
    state_.u_k = SymMatrix<Scalar>::from_dense(Scalar(2) / (k + 3) * state_.u_ag.dense() +
                                               (k + 1) / (k + 3) * state_.u_sd.dense());
    ++state_.k;
  }

  const IterState<Scalar>& state() const { return state_; }
  const SymMatrix<Scalar>& u0() const { return u0_; }
  Scalar lipschitz() const { return lipschitz_; }
  Scalar sigma_mod() const { return sigma_mod_; }

 private:
  IterState<Scalar> state_;
  SymMatrix<Scalar> u0_;
  SymMatrix<Scalar> grad_;
  Scalar lipschitz_ = Scalar(1);
  Scalar sigma_mod_;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

template <typename Scalar>
void emit(SolveReport<Scalar>& report, const TraceSink<Scalar>& sink, IterRecord<Scalar> rec) {
  if (sink) sink(rec);
  report.trace.push_back(std::move(rec));
}

}  // namespace detail

/// Accelerated smooth minimization of the dual over the unit box, with weighted
/// primal averaging and a primal-dual gap stopping rule.
template <typename Scalar>
SolveReport<Scalar> solve_smacs(const Instance<Scalar>& inst, const SpectralBox<Scalar>& box,
                                const SolverConfig<Scalar>& cfg, const TraceSink<Scalar>& sink = {}) {
  if (!(cfg.eps > Scalar(0))) throw InvalidInput("solve_smacs: eps must be positive");
  if (!(cfg.sigma_mod > Scalar(0))) throw InvalidInput("solve_smacs: sigma must be positive");
  if (!(inst.rho() > Scalar(0))) throw InvalidInput("solve_smacs: rho must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t eig_start = eig_call_count();
  const Index n = inst.n();
  const Scalar alpha = box.alpha;
  const Scalar beta = box.beta;
  const Scalar lipschitz = inst.rho() * inst.rho() * beta * beta;

  SymMatrix<Scalar> u0 = cfg.u0 ? *cfg.u0 : SymMatrix<Scalar>::zero(n);
  if (u0.n() != n) throw InvalidInput("solve_smacs: u0 dimension mismatch");
  const Scalar diameter = prox_diameter(u0);
  const std::int64_t max_iter =
      cfg.max_iter ? *cfg.max_iter : 2 * iteration_cap(lipschitz, diameter, cfg.sigma_mod, cfg.eps) + 10;

  AcceleratedDualScheme<Scalar> scheme(std::move(u0), lipschitz, cfg.sigma_mod);
  SolveReport<Scalar> report;
  report.beta_hat = beta;

  for (;;) {
    const auto& st = scheme.state();
    const auto ev = eval_dual(st.u_k, inst, alpha, beta, beta);
    ++report.evaluations;
    scheme.absorb(ev);

    const Scalar g_cur = primal_at(ev, inst);
    const Scalar cheap_gap = ev.f_value - g_cur;
    Scalar f_dual = ev.f_value;
    Scalar g_primal = g_cur;
    if (cfg.termination == Termination::canonical) {
      f_dual = eval_dual(st.u_sd, inst, alpha, beta, beta).f_value;
      g_primal = eval_primal(st.x_bar, inst);
    }
    const Scalar gap = f_dual - g_primal;

    if (cfg.gap_bound_check && cfg.termination == Termination::canonical) {
      const Scalar bound = gap_bound(lipschitz, diameter, cfg.sigma_mod, st.k);
      if (gap > bound + Scalar(1e-8) * (Scalar(1) + std::abs(f_dual))) {
        throw InternalInconsistency("solve_smacs: gap " + std::to_string(double(gap)) + " exceeds bound " +
                                    std::to_string(double(bound)) + " at k = " + std::to_string(st.k));
      }
    }
    detail::emit(report, sink, {st.k, f_dual, g_primal, gap, cheap_gap, beta, 0, detail::elapsed_ms(start)});

    const bool done = gap <= cfg.eps;
    if (done || st.k >= max_iter) {
      report.status = done ? SolveStatus::converged : SolveStatus::max_iter_reached;
      report.iterations = st.k;
      report.final_gap = gap;
      report.dual_obj = f_dual;
      report.primal_obj = g_primal;
      if (cfg.termination == Termination::canonical) {
        report.x_star = st.x_bar;
        report.u_star = st.u_sd;
      } else {
        report.x_star = ev.x_of_u;
        report.u_star = st.u_k;
      }
      break;
    }
    scheme.advance();
  }

  report.eig_calls = eig_call_count() - eig_start;
  report.total_ms = detail::elapsed_ms(start);
  return report;
}

}  // namespace covsel
