#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace covsel;
using namespace covsel::testing;

TEST_CASE("eval_dual on a diagonal instance") {
  const Instance<double> inst(diag({1.0, 2.0}), 0.5);
  const auto ev = eval_dual(Sym::zero(2), inst, 0.1, 10.0, 10.0);
  CHECK(max_abs_diff(ev.x_of_u, diag({1.0, 0.5})) < 1e-14);
  CHECK(ev.f_value == doctest::Approx(-2.0 + std::log(0.5)).epsilon(1e-14));
  CHECK(ev.f_value == doctest::Approx(-2.693147).epsilon(1e-6));
  CHECK(max_abs_diff(ev.grad_f, diag({-0.5, -0.25})) < 1e-14);
  CHECK_FALSE(ev.is_active);
}

TEST_CASE("eigenvalue clamp rule") {
  CHECK(clamp_eigenvalue(0.05, 0.1, 10.0) == 10.0);
  CHECK(clamp_eigenvalue(-1.0, 0.1, 10.0) == 10.0);
  CHECK(clamp_eigenvalue(0.0, 0.1, 10.0) == 10.0);
  CHECK(clamp_eigenvalue(20.0, 0.1, 10.0) == 0.1);
  CHECK(clamp_eigenvalue(2.0, 0.1, 10.0) == 0.5);

  // gamma = 1 + 2 * (-1) = -1 goes through the "otherwise" branch.
  const Instance<double> inst(sym({{1.0}}), 2.0);
  const auto ev = eval_dual(sym({{-1.0}}), inst, 0.1, 10.0, 10.0);
  CHECK(ev.x_of_u(0, 0) == 10.0);
  CHECK(ev.f_value == doctest::Approx(10.0 + std::log(10.0)));
}

TEST_CASE("eval_dual rejects a bad cap ordering and dimension") {
  const Instance<double> inst(Sym::identity(2), 0.5);
  CHECK_THROWS_AS(eval_dual(Sym::zero(2), inst, 1.0, 0.5, 10.0), InvalidInput);
  CHECK_THROWS_AS(eval_dual(Sym::zero(2), inst, 0.1, 11.0, 10.0), InvalidInput);
  CHECK_THROWS_AS(eval_dual(Sym::zero(3), inst, 0.1, 1.0, 10.0), InvalidInput);
}

TEST_CASE("eval_primal") {
  CHECK(eval_primal(Sym::identity(2), Instance<double>(Sym::identity(2), 0.0)) == doctest::Approx(-2.0));
  CHECK(eval_primal(Sym::identity(2), Instance<double>(Sym::zero(2), 1.0)) == doctest::Approx(-2.0));
  CHECK(eval_primal(sym({{2.0 / 3.0}}), Instance<double>(sym({{1.0}}), 0.5)) == doctest::Approx(-1.405465).epsilon(1e-6));
  CHECK(eval_primal(sym({{1.0, 0.5}, {0.5, 1.0}}), Instance<double>(Sym::zero(2), 1.0)) ==
        doctest::Approx(std::log(0.75) - 3.0));
  CHECK_THROWS_AS(eval_primal(diag({1.0, -1.0}), Instance<double>(Sym::identity(2), 0.5)), NotPositiveDefinite);
}

TEST_CASE("duality gap on a pinned box") {
  const Instance<double> inst(sym({{1.0}}), 0.5);
  const double a = 2.0 / 3.0;
  // U = sign(X*) = 1 is the optimal dual point: both sides equal log(2/3) - 1.
  CHECK(std::abs(duality_gap(sym({{1.0}}), sym({{a}}), inst, a, a, a)) < 1e-12);
  CHECK(duality_gap(sym({{0.0}}), sym({{a}}), inst, a, a, a) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("weak duality on random feasible pairs") {
  SplitMix64 rng(17);
  for (Index n = 1; n <= 6; ++n) {
    for (int c = 0; c < 10; ++c) {
      const Instance<double> inst(checks::random_psd(n, rng), 0.1 + rng.uniform01());
      const auto u = checks::random_symmetric(n, rng, -1.0, 1.0);
      const auto x = checks::random_in_box(n, rng, 0.1, 10.0);
      const auto ev = eval_dual(u, inst, 0.1, 10.0, 10.0);
      CHECK(ev.f_value - eval_primal(x, inst) >= -1e-8 * (1.0 + std::abs(ev.f_value)));
    }
  }
}

TEST_CASE("X(U) attains the brute-force maximum") {
  SplitMix64 rng(23);
  for (Index n = 2; n <= 4; ++n) {
    for (int c = 0; c < 5; ++c) {
      const Instance<double> inst(checks::random_psd(n, rng), 0.2 + rng.uniform01());
      const auto u = checks::random_symmetric(n, rng, -1.0, 1.0);
      const double beta_hat = 1.0 + 4.0 * rng.uniform01();
      const auto ev = eval_dual(u, inst, 0.1, beta_hat, 10.0);
      const auto c_mat = Sym::from_dense(inst.sigma().dense() + inst.rho() * u.dense());
      CHECK(ev.f_value == doctest::Approx(checks::projected_ascent_max(c_mat, 0.1, beta_hat)).epsilon(1e-7));
      CHECK(in_spectral_box(ev.x_of_u, SpectralBox<double>(0.1, beta_hat)));
      // The closed form also matches the objective evaluated at X(U).
      CHECK(ev.f_value == doctest::Approx(logdet_cholesky(ev.x_of_u) - inner(c_mat, ev.x_of_u)).epsilon(1e-10));
    }
  }
}

TEST_CASE("gradient matches central differences") {
  SplitMix64 rng(29);
  for (Index n = 2; n <= 6; ++n) {
    for (int c = 0; c < 4; ++c) {
      const Instance<double> inst(checks::random_psd(n, rng), 0.1 + rng.uniform01());
      const auto u = checks::random_symmetric(n, rng, -0.9, 0.9);
      const auto ev = eval_dual(u, inst, 0.1, 10.0, 10.0);
      const auto fd = checks::finite_difference_gradient(
          [&](const Sym& v) { return eval_dual(v, inst, 0.1, 10.0, 10.0).f_value; }, u, 1e-5);
      const double scale = ev.grad_f.dense().cwiseAbs().maxCoeff();
      CHECK(max_abs_diff(fd, ev.grad_f) <= 1e-4 * scale);
      CHECK(ev.grad_f == Sym::from_dense(-inst.rho() * ev.x_of_u.dense()));
    }
  }
}

TEST_CASE("gradient is Lipschitz with constant rho^2 beta_hat^2") {
  SplitMix64 rng(31);
  for (Index n = 2; n <= 5; ++n) {
    for (int c = 0; c < 10; ++c) {
      const Instance<double> inst(checks::random_psd(n, rng), 0.1 + rng.uniform01());
      const double beta_hat = 0.5 + 9.5 * rng.uniform01();
      const auto u = checks::random_symmetric(n, rng, -1.0, 1.0);
      const auto v = checks::random_symmetric(n, rng, -1.0, 1.0);
      const auto gu = eval_dual(u, inst, 0.1, beta_hat, 10.0).grad_f;
      const auto gv = eval_dual(v, inst, 0.1, beta_hat, 10.0).grad_f;
      const double lip = inst.rho() * inst.rho() * beta_hat * beta_hat;
      CHECK((gu.dense() - gv.dense()).norm() <= lip * (u.dense() - v.dense()).norm() * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("activity flag and reclamp") {
  // gamma = 0.1 gives 1/gamma = 10, capped at beta_hat = 5.
  const Instance<double> inst(diag({0.1, 1.0}), 0.5);
  const auto ev = eval_dual(Sym::zero(2), inst, 0.1, 5.0, 10.0);
  CHECK(ev.is_active);
  CHECK(ev.lambda_max == 5.0);

  const auto wide = reclamp(ev, inst, 10.0);
  CHECK_FALSE(wide.is_active);
  const auto fresh = eval_dual(Sym::zero(2), inst, 0.1, 10.0, 10.0);
  CHECK(wide.f_value == doctest::Approx(fresh.f_value).epsilon(1e-14));
  CHECK(max_abs_diff(wide.x_of_u, fresh.x_of_u) < 1e-12);

  const auto before = eig_call_count();
  (void)reclamp(ev, inst, 7.0);
  CHECK(eig_call_count() == before);
  CHECK_THROWS_AS(reclamp(ev, inst, 11.0), InvalidInput);
}

TEST_CASE("primal_at agrees with eval_primal") {
  SplitMix64 rng(37);
  for (Index n = 1; n <= 5; ++n) {
    const Instance<double> inst(checks::random_psd(n, rng), 0.3);
    const auto u = checks::random_symmetric(n, rng, -1.0, 1.0);
    const auto ev = eval_dual(u, inst, 0.1, 10.0, 10.0);
    CHECK(primal_at(ev, inst) == doctest::Approx(eval_primal(ev.x_of_u, inst)).epsilon(1e-10));
  }
}
