#include "covsel/checks.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include "covsel/nsa.hpp"
#include "covsel/oracle.hpp"
#include "covsel/smacs.hpp"
#include "covsel/vsmacs.hpp"

namespace covsel::checks {

SymMatrix<double> random_symmetric(Index n, SplitMix64& rng, double lo, double hi) {
  DenseMatrix<double> m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      m(i, j) = lo + (hi - lo) * rng.uniform01();
      m(j, i) = m(i, j);
    }
  }
  return SymMatrix<double>::from_dense(m);
}

SymMatrix<double> random_psd(Index n, SplitMix64& rng) {
  const Index m = n + 2;
  DenseMatrix<double> g(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) g(i, j) = rng.uniform_pm1();
  return SymMatrix<double>::from_dense(g * g.transpose() / double(m));
}

SymMatrix<double> random_in_box(Index n, SplitMix64& rng, double alpha, double beta) {
  DenseMatrix<double> g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.uniform_pm1();
  const DenseMatrix<double> q = Eigen::HouseholderQR<DenseMatrix<double>>(g).householderQ();
  Vector<double> d(n);
  for (Index i = 0; i < n; ++i) d(i) = alpha + (beta - alpha) * rng.uniform01();
  return SymMatrix<double>::from_dense(q * d.asDiagonal() * q.transpose());
}

namespace {

DenseMatrix<double> clamp_spectrum(const DenseMatrix<double>& m, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix<double>> es((m + m.transpose()) / 2.0);
  const Vector<double> d = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// log det X - <c, X>, or -inf outside the PD cone.
double ascent_objective(const DenseMatrix<double>& x, const DenseMatrix<double>& c) {
  Eigen::LLT<DenseMatrix<double>> llt(x);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum() - c.cwiseProduct(x).sum();
}

}  // namespace

double projected_ascent_max(const SymMatrix<double>& c, double alpha, double beta_hat) {
  const Index n = c.n();
  const DenseMatrix<double>& cm = c.dense();
  DenseMatrix<double> x = DenseMatrix<double>::Identity(n, n) * std::clamp(1.0, alpha, beta_hat);
  double obj = ascent_objective(x, cm);
  double step = 1.0;
  int stalled = 0;
  for (int it = 0; it < 200000 && stalled < 50; ++it) {
    const DenseMatrix<double> grad = x.inverse() - cm;
    DenseMatrix<double> next;
    double next_obj = 0.0;
    for (;;) {
      next = clamp_spectrum(x + step * grad, alpha, beta_hat);
      next_obj = ascent_objective(next, cm);
      const DenseMatrix<double> d = next - x;
      // Sufficient increase for a concave function with (1/step)-Lipschitz gradient.
      if (next_obj >= obj + grad.cwiseProduct(d).sum() - d.squaredNorm() / (2.0 * step) - 1e-15 * std::abs(obj)) break;
      step /= 2.0;
      if (step < 1e-20) return obj;
    }
    // Near the optimum the increase drops below round-off and backtracking keeps firing.
    stalled = next_obj > obj + 1e-15 * (1.0 + std::abs(obj)) ? 0 : stalled + 1;
    if (next_obj >= obj) {
      x = next;
      obj = next_obj;
    }
    step = std::min(step * 2.0, 1e6);
  }
  return obj;
}

SymMatrix<double> finite_difference_gradient(const std::function<double(const SymMatrix<double>&)>& f,
                                             const SymMatrix<double>& u, double h) {
  const Index n = u.n();
  DenseMatrix<double> g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      DenseMatrix<double> dir = DenseMatrix<double>::Zero(n, n);
      dir(i, j) = 1.0;
      dir(j, i) = 1.0;
      const double plus = f(SymMatrix<double>::from_dense(u.dense() + h * dir));
      const double minus = f(SymMatrix<double>::from_dense(u.dense() - h * dir));
      // Off-diagonal directions touch two entries, so <G, dir> = 2 G_ij.
      const double scale = i == j ? 2.0 * h : 4.0 * h;
      g(i, j) = (plus - minus) / scale;
      g(j, i) = g(i, j);
    }
  }
  return SymMatrix<double>::from_dense(g);
}

bool CheckReport::ok() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
}

namespace {

constexpr double kAlpha = 0.1;
constexpr double kBeta = 10.0;

Instance<double> random_instance(Index n, SplitMix64& rng) {
  const double rho = 0.1 + 0.9 * rng.uniform01();
  return Instance<double>(random_psd(n, rng), rho);
}

Instance<double> generated_instance(Index n, std::uint64_t seed) {
  GenParams<double> p;
  p.n = n;
  p.density = 0.3;
  p.seed = seed;
  return generate(p);
}

SuiteResult gradient_suite(const CheckOptions& opts) {
  SuiteResult r{"gradient", 0, 0};
  SplitMix64 rng(opts.seed ^ 0x6772616469656e74ULL);
  for (Index n : opts.sizes) {
    for (int c = 0; c < 10; ++c) {
      const auto inst = random_instance(n, rng);
      const auto u = random_symmetric(n, rng, -0.9, 0.9);
      const auto ev = eval_dual(u, inst, kAlpha, kBeta, kBeta);
      const DenseMatrix<double> analytic = ev.grad_f.dense().array() + opts.perturb_grad;
      const auto fd = finite_difference_gradient(
          [&](const SymMatrix<double>& v) { return eval_dual(v, inst, kAlpha, kBeta, kBeta).f_value; }, u, 1e-5);
      const double scale = std::max(analytic.cwiseAbs().maxCoeff(), 1e-12);
      const double err = (fd.dense() - analytic).cwiseAbs().maxCoeff();
      ++r.total;
      if (err <= 1e-4 * scale) ++r.passed;
    }
  }
  return r;
}

SuiteResult brute_force_suite(const CheckOptions& opts) {
  SuiteResult r{"oracle-vs-brute-force", 0, 0};
  SplitMix64 rng(opts.seed ^ 0x6272757465ULL);
  for (Index n : opts.sizes) {
    for (int c = 0; c < 20; ++c) {
      const auto inst = random_instance(n, rng);
      const auto u = random_symmetric(n, rng, -1.0, 1.0);
      const double closed = eval_dual(u, inst, kAlpha, kBeta, kBeta).f_value;
      const auto shifted = SymMatrix<double>::from_dense(inst.sigma().dense() + inst.rho() * u.dense());
      const double brute = projected_ascent_max(shifted, kAlpha, kBeta);
      ++r.total;
      if (std::abs(closed - brute) <= 1e-6) ++r.passed;
    }
  }
  return r;
}

SuiteResult gap_bound_suite(const CheckOptions& opts) {
  SuiteResult r{"gap-bound", 0, 0};
  for (Index n : opts.sizes) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto inst = generated_instance(n, opts.seed * 1000 + s);
      const SpectralBox<double> box(kAlpha, kBeta);
      SolverConfig<double> cfg;
      cfg.eps = 1e-2;
      const auto rep = solve_smacs(inst, box, cfg);
      const double lip = inst.rho() * inst.rho() * kBeta * kBeta;
      const double diam = double(n * n) / 2.0;
      bool ok = rep.status == SolveStatus::converged && rep.iterations <= iteration_cap(lip, diam, 1.0, cfg.eps);
      for (const auto& rec : rep.trace) {
        ok = ok && rec.gap <= gap_bound(lip, diam, 1.0, rec.k) + 1e-8 * (1.0 + std::abs(rec.f_dual));
        ok = ok && rec.gap >= -1e-8 * (1.0 + std::abs(rec.f_dual));
      }
      ++r.total;
      if (ok) ++r.passed;
    }
  }
  return r;
}

SuiteResult certificate_suite(const CheckOptions& opts) {
  SuiteResult r{"certificate", 0, 0};
  for (Index n : opts.sizes) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto inst = generated_instance(n, opts.seed * 2000 + s);
      const SpectralBox<double> box(kAlpha, kBeta);
      AdaptiveConfig<double> cfg;
      cfg.eps = 1e-3;
      const auto rep = solve_vsmacs(inst, box, cfg);
      bool ok = rep.status == SolveStatus::converged;
      if (ok) ok = duality_gap(rep.u_star, rep.x_star, inst, kAlpha, kBeta, kBeta) <= cfg.eps;
      ++r.total;
      if (ok) ++r.passed;
    }
  }
  return r;
}

}  // namespace

CheckReport run_self_checks(const CheckOptions& opts, std::ostream& log) {
  using Suite = SuiteResult (*)(const CheckOptions&);
  const std::pair<const char*, Suite> suites[] = {{"gradient", gradient_suite},
                                                  {"oracle-vs-brute-force", brute_force_suite},
                                                  {"gap-bound", gap_bound_suite},
                                                  {"certificate", certificate_suite}};
  CheckReport report;
  for (const auto& [name, suite] : suites) {
    SuiteResult r{name, 0, 1};
    try {
      r = suite(opts);
    } catch (const std::exception& e) {
      log << "  " << name << " error: " << e.what() << '\n';
    }
    log << r.name << ": " << r.passed << "/" << r.total << (r.ok() ? " PASS" : " FAIL") << '\n';
    report.suites.push_back(r);
  }
  return report;
}

}  // namespace covsel::checks
