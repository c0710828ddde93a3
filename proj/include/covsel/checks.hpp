#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "covsel/instgen.hpp"
#include "covsel/problem.hpp"
#include "covsel/symmat.hpp"

// Reference oracles that do not go through the closed-form solver paths, and the
// property suites built on them (run by `covsel check` and by the test suites).

namespace covsel::checks {

/// Symmetric matrix with entries uniform in [lo, hi).
SymMatrix<double> random_symmetric(Index n, SplitMix64& rng, double lo, double hi);

/// Wishart-like PSD matrix G G^T / m with G uniform in [-1, 1)^{n x m}.
SymMatrix<double> random_psd(Index n, SplitMix64& rng);

/// Random point of the spectral box: random orthogonal basis, eigenvalues uniform in [alpha, beta].
SymMatrix<double> random_in_box(Index n, SplitMix64& rng, double alpha, double beta);

/// max over alpha I <= X <= beta_hat I of log det X - <c, X>, by projected gradient
/// ascent with backtracking (Frobenius projection by eigenvalue clamping), run until the
/// objective stops improving.
double projected_ascent_max(const SymMatrix<double>& c, double alpha, double beta_hat);

/// Central differences of f along the symmetric coordinate directions of S^n,
/// returned as the matrix G with <G, H> ~ f'(u)[H].
SymMatrix<double> finite_difference_gradient(const std::function<double(const SymMatrix<double>&)>& f,
                                             const SymMatrix<double>& u, double h);

struct CheckOptions {
  std::uint64_t seed = 1;
  std::vector<Index> sizes = {2, 3, 4, 5};
  double perturb_grad = 0.0;  // added to every analytic gradient entry (negative control)
};

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  bool ok() const { return passed == total; }
};

struct CheckReport {
  std::vector<SuiteResult> suites;
  bool ok() const;
};

/// Gradient, oracle-vs-brute-force, gap-bound and certificate suites.
CheckReport run_self_checks(const CheckOptions& opts, std::ostream& log);

}  // namespace covsel::checks
