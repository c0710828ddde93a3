#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "covsel/checks.hpp"
#include "covsel/covsel.hpp"
#include "covsel/io.hpp"

namespace covsel::cli {

namespace {

struct MethodOptions {
  double eps = 0.1;
  std::optional<std::int64_t> max_iter;
  double vs1 = 1.05;
  double vs2 = 1.05;
  double vs3 = 0.95;
  std::string termination = "canonical";
};

SolveReport<double> run_method(const std::string& method, const Instance<double>& inst,
                               const SpectralBox<double>& box, const MethodOptions& o) {
  if (method == "sm") {
    SolverConfig<double> cfg;
    cfg.eps = o.eps;
    cfg.max_iter = o.max_iter;
    cfg.termination = o.termination == "cheap" ? Termination::cheap : Termination::canonical;
    return solve_smacs(inst, box, cfg);
  }
  if (method == "vsm") {
    AdaptiveConfig<double> cfg;
    cfg.eps = o.eps;
    cfg.varsigma1 = o.vs1;
    cfg.varsigma2 = o.vs2;
    cfg.varsigma3 = o.vs3;
    if (o.max_iter) cfg.max_iter = *o.max_iter;
    return solve_vsmacs(inst, box, cfg);
  }
  if (method == "nsa") return solve_nsa(inst, box, o.eps, o.max_iter.value_or(200000));
  throw InvalidInput("unknown method '" + method + "'");
}

std::string fixed(double x, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

struct GenArgs {
  std::int64_t n = 0;
  double density = 0.01;
  double tau = 0.15;
  double theta = 1e-4;
  double rho = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  GenParams<double> p;
  p.n = a.n;
  p.density = a.density;
  p.tau = a.tau;
  p.theta = a.theta;
  p.rho = a.rho;
  p.seed = a.seed;
  const auto g = generate_detailed(p);
  io::write_instance(a.out, g.instance());
  const double pairs = double(a.n) * double(a.n - 1) / 2.0;
  out << "density=" << a.density << " tau=" << a.tau << " theta=" << a.theta << " rho=" << a.rho
      << " seed=" << a.seed << '\n';
  out << "lambda_min(sigma)=" << io::format_double(g.lambda_min_sigma)
      << " lambda_min(B)=" << io::format_double(g.lambda_min_b) << '\n';
  out << "offdiag_nonzeros(A)=" << g.a_offdiag_nonzeros << '/' << static_cast<std::int64_t>(pairs)
      << " fraction=" << (pairs > 0 ? double(g.a_offdiag_nonzeros) / pairs : 0.0) << '\n';
  out << "wrote " << a.out << '\n';
  return kOk;
}

struct SolveArgs {
  std::string in;
  std::string method = "vsm";
  MethodOptions opts;
  std::optional<double> alpha;
  std::optional<double> beta;
  bool auto_bounds = false;
  std::string trace;
  std::string dump_prefix;
  std::optional<std::uint64_t> seed;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const auto inst = io::read_instance(a.in);
  double alpha = a.alpha.value_or(0.0);
  double beta = a.beta.value_or(0.0);
  if (a.auto_bounds || !a.alpha || !a.beta) {
    const auto b = compute_bounds(inst);
    if (a.auto_bounds || !a.alpha) alpha = b.alpha;
    if (a.auto_bounds || !a.beta) beta = b.beta;
  }
  const SpectralBox<double> box(alpha, beta);
  const auto rep = run_method(a.method, inst, box, a.opts);

  if (!a.trace.empty()) {
    io::TraceMeta meta{a.method, inst.n(), inst.rho(), alpha, beta, a.opts.eps, a.seed};
    io::write_trace(a.trace, meta, rep);
  }
  if (!a.dump_prefix.empty()) {
    io::write_matrix(a.dump_prefix + ".X", rep.x_star);
    io::write_matrix(a.dump_prefix + ".U", rep.u_star);
  }
  out << a.method << ' ' << inst.n() << ' ' << rep.iterations << ' ' << fixed(rep.primal_obj, 6) << ' '
      << fixed(rep.dual_obj, 6) << ' ' << io::format_double(rep.final_gap) << ' ' << fixed(rep.total_ms, 1) << ' '
      << to_string(rep.status) << '\n';
  return rep.status == SolveStatus::converged ? kOk : kMaxIter;
}

struct BenchArgs {
  std::vector<std::int64_t> n_list;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::string> methods = {"nsa", "sm", "vsm"};
  MethodOptions opts;
  double alpha = 0.1;
  double beta = 10.0;
  double rho = 0.5;
  std::string csv;
  int jobs = 1;
};

struct BenchRow {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::int64_t iters = -1;
  double obj = std::nan("");
  double gap = std::nan("");
  double ms = 0.0;
  std::string status;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.methods.empty()) {
    err << "bench: --methods must name at least one of sm, vsm, nsa\n";
    return kBadInput;
  }
  for (const auto& m : a.methods) {
    if (m != "sm" && m != "vsm" && m != "nsa") {
      err << "bench: unknown method '" << m << "'\n";
      return kBadInput;
    }
  }
  const SpectralBox<double> box(a.alpha, a.beta);

  std::vector<BenchRow> rows;
  for (auto n : a.n_list)
    for (auto seed : a.seeds)
      for (const auto& m : a.methods) {
        BenchRow row;
        row.n = n;
        row.seed = seed;
        row.method = m;
        rows.push_back(std::move(row));
      }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      try {
        GenParams<double> p;
        p.n = row.n;
        p.seed = row.seed;
        p.rho = a.rho;
        const auto inst = generate(p);
        const auto rep = run_method(row.method, inst, box, a.opts);
        row.iters = rep.iterations;
        row.obj = rep.primal_obj;
        row.gap = rep.final_gap;
        row.ms = rep.total_ms;
        row.status = to_string(rep.status);
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };
  const int jobs = std::max(1, a.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream table;
  table << "n,seed,method,iters,obj,gap,ms,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    table << r.n << ',' << r.seed << ',' << r.method << ',' << r.iters << ',' << io::format_double(r.obj) << ','
          << io::format_double(r.gap) << ',' << fixed(r.ms, 1) << ',' << status << '\n';
  }
  if (a.csv.empty()) {
    out << table.str();
  } else {
    std::ofstream os(a.csv);
    if (!os) {
      err << "bench: cannot open '" << a.csv << "' for writing\n";
      return kBadInput;
    }
    os << table.str();
    out << "wrote " << rows.size() << " rows to " << a.csv << '\n';
  }
  return kOk;
}

struct CheckArgs {
  std::uint64_t seed = 1;
  std::vector<std::int64_t> sizes = {2, 3, 4, 5};
  double perturb_grad = 0.0;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  checks::CheckOptions opts;
  opts.seed = a.seed;
  opts.sizes.assign(a.sizes.begin(), a.sizes.end());
  opts.perturb_grad = a.perturb_grad;
  const auto report = checks::run_self_checks(opts, out);
  out << (report.ok() ? "all suites passed" : "FAILED") << '\n';
  return report.ok() ? kOk : kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse inverse-covariance estimation by smooth minimization"};
  app.name("covsel");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance file");
  gen_cmd->add_option("--n", gen.n, "Dimension")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--density", gen.density, "Off-diagonal density of A")->capture_default_str();
  gen_cmd->add_option("--tau", gen.tau, "Weight of the uniform noise V")->capture_default_str();
  gen_cmd->add_option("--theta", gen.theta, "Minimum eigenvalue after the shift")->capture_default_str();
  gen_cmd->add_option("--rho", gen.rho, "Penalty weight stored in the file")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output instance file")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file");
  solve_cmd->add_option("--in", solve.in, "Instance file")->required();
  solve_cmd->add_option("--method", solve.method, "sm | vsm | nsa")
      ->check(CLI::IsMember({"sm", "vsm", "nsa"}))
      ->capture_default_str();
  solve_cmd->add_option("--eps", solve.opts.eps, "Target duality gap")->capture_default_str();
  solve_cmd->add_option("--alpha", solve.alpha, "Lower eigenvalue bound");
  solve_cmd->add_option("--beta", solve.beta, "Upper eigenvalue bound");
  solve_cmd->add_flag("--auto-bounds", solve.auto_bounds, "Derive [alpha, beta] from the data");
  solve_cmd->add_option("--max-iter", solve.opts.max_iter, "Iteration budget");
  solve_cmd->add_option("--trace", solve.trace, "Write a JSON trace to this file");
  solve_cmd->add_option("--vs1", solve.opts.vs1, "vsm escalation factor")->capture_default_str();
  solve_cmd->add_option("--vs2", solve.opts.vs2, "vsm shrink headroom")->capture_default_str();
  solve_cmd->add_option("--vs3", solve.opts.vs3, "vsm shrink trigger")->capture_default_str();
  solve_cmd->add_option("--termination", solve.opts.termination, "sm stopping test: canonical | cheap")
      ->check(CLI::IsMember({"canonical", "cheap"}))
      ->capture_default_str();
  solve_cmd->add_option("--dump-solution", solve.dump_prefix, "Write PREFIX.X and PREFIX.U");
  solve_cmd->add_option("--seed", solve.seed, "Seed recorded in the trace");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a matrix of generated instances and methods");
  bench_cmd->add_option("--n-list", bench.n_list, "Dimensions, comma separated")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seeds", bench.seeds, "Seeds, comma separated")->delimiter(',');
  bench_cmd->add_option("--methods", bench.methods, "Methods, comma separated")->delimiter(',')->expected(0, -1);
  bench_cmd->add_option("--eps", bench.opts.eps, "Target duality gap")->capture_default_str();
  bench_cmd->add_option("--alpha", bench.alpha)->capture_default_str();
  bench_cmd->add_option("--beta", bench.beta)->capture_default_str();
  bench_cmd->add_option("--rho", bench.rho)->capture_default_str();
  bench_cmd->add_option("--max-iter", bench.opts.max_iter, "Iteration budget per run");
  bench_cmd->add_option("--csv", bench.csv, "Write rows to this file instead of stdout");
  bench_cmd->add_option("--jobs", bench.jobs, "Parallel cells")->capture_default_str();

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Run the property self-check suites");
  check_cmd->add_option("--seed", check.seed)->capture_default_str();
  check_cmd->add_option("--sizes", check.sizes, "Dimensions for the suites")->delimiter(',')->check(CLI::PositiveNumber);
  check_cmd->add_option("--perturb-grad", check.perturb_grad)->group("");  // negative-control hook

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    const CLI::App* sub = nullptr;
    for (const auto* c : app.get_subcommands()) sub = c;
    err << (sub ? sub->help() : app.help());
    return kBadInput;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (solve_cmd->parsed()) return cmd_solve(solve, out);
    if (bench_cmd->parsed()) {
      if (bench_cmd->count("--methods") > 0 && bench.methods.empty()) {
        err << "bench: --methods must name at least one of sm, vsm, nsa\n";
        return kBadInput;
      }
      return cmd_bench(bench, out, err);
    }
    if (check_cmd->parsed()) return cmd_check(check, out);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kBadInput;
}

}  // namespace covsel::cli
