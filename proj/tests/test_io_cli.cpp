#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "covsel/io.hpp"
#include "test_util.hpp"

using namespace covsel;
using namespace covsel::testing;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli_run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("instance files round-trip bit for bit") {
  SplitMix64 rng(81);
  for (Index n = 1; n <= 7; ++n) {
    const Instance<double> inst(checks::random_psd(n, rng), 0.1 + rng.uniform01() / 3.0);
    std::stringstream ss;
    io::write_instance(ss, inst);
    const auto back = io::read_instance(ss);
    CHECK(back.rho() == inst.rho());
    CHECK(back.sigma() == inst.sigma());
  }
  const auto m = checks::random_symmetric(4, rng, -1e-300, 1e300);
  std::stringstream ms;
  io::write_matrix(ms, m);
  CHECK(io::read_matrix(ms) == m);
}

TEST_CASE("instance file layout") {
  std::stringstream ss;
  io::write_instance(ss, Instance<double>(sym({{1.0, 0.25}, {0.25, 2.0}}), 0.5));
  CHECK(ss.str() == "covsel-instance 1\n2\n0.5\n1 0.25\n0.25 2\n");
}

TEST_CASE("reading rejects malformed instance files") {
  auto read = [](const std::string& text) {
    std::istringstream is(text);
    return io::read_instance(is);
  };
  CHECK_THROWS_AS(read("covsel-matrix 1\n1\n0.5\n1\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n2\n0.5\n1 0\n0\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n2\n0.5\n1 0\n0.1 1\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n1\n0\n1\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n0\n0.5\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n1\n0.5\nabc\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n1\n0.5\n1 2\n"), InvalidInput);
  CHECK_THROWS_AS(read("covsel-instance 1\n2\n0.5\n1 0\n0 -1\n"), InvalidInput);
  CHECK_THROWS_AS(read(""), InvalidInput);

  // Tiny asymmetry is accepted and averaged away.
  const auto inst = read("covsel-instance 1\n2\n0.5\n1 0.1\n0.1000000001 1\n");
  CHECK(inst.sigma()(0, 1) == inst.sigma()(1, 0));
  CHECK(inst.sigma()(0, 1) == doctest::Approx(0.10000000005));
}

TEST_CASE("gen writes a deterministic instance file") {
  const auto dir = scratch_dir("gen");
  const auto a = (dir / "a.cov").string();
  const auto b = (dir / "b.cov").string();
  const auto r1 = cli_run({"gen", "--n", "50", "--seed", "7", "--out", a});
  REQUIRE(r1.code == cli::kOk);
  REQUIRE(cli_run({"gen", "--n", "50", "--seed", "7", "--out", b}).code == cli::kOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(r1.out.find("density=0.01 tau=0.15 theta=0.0001 rho=0.5 seed=7") != std::string::npos);
  CHECK(r1.out.find("lambda_min(sigma)=") != std::string::npos);

  const auto ls = lines(slurp(a));
  REQUIRE(ls.size() == 53);
  CHECK(ls[0] == "covsel-instance 1");
  CHECK(ls[1] == "50");
  CHECK(ls[2] == "0.5");
  const auto inst = io::read_instance(a);
  CHECK(inst.n() == 50);
  GenParams<double> p;
  p.seed = 7;
  CHECK(inst.sigma() == generate(p).sigma());

  CHECK(cli_run({"gen", "--n", "0", "--out", a}).code == cli::kBadInput);
  CHECK(cli_run({"gen", "--n", "5"}).code == cli::kBadInput);
  CHECK(cli_run({"gen", "--n", "5", "--density", "2", "--out", a}).code == cli::kBadInput);
  std::filesystem::remove_all(dir);
}

TEST_CASE("solve end to end with trace and solution dump") {
  const auto dir = scratch_dir("solve");
  const auto inst_path = (dir / "a.cov").string();
  REQUIRE(cli_run({"gen", "--n", "30", "--seed", "3", "--out", inst_path}).code == cli::kOk);

  const auto trace = (dir / "vsm.json").string();
  const auto prefix = (dir / "vsm").string();
  const auto rv = cli_run({"solve", "--in", inst_path, "--method", "vsm", "--alpha", "0.1", "--beta", "10", "--eps",
                           "0.1", "--trace", trace, "--dump-solution", prefix, "--seed", "3"});
  REQUIRE(rv.code == cli::kOk);
  CHECK(rv.out.rfind("vsm 30 ", 0) == 0);
  CHECK(rv.out.find("converged") != std::string::npos);

  const auto doc = nlohmann::json::parse(slurp(trace));
  CHECK(doc["method"] == "vsm");
  CHECK(doc["n"] == 30);
  CHECK(doc["seed"] == 3);
  CHECK(doc["status"] == "converged");
  CHECK(doc["alpha"] == 0.1);
  REQUIRE(!doc["iterations"].empty());
  const auto& last = doc["iterations"].back();
  CHECK(last["gap"].get<double>() <= 0.1);
  for (const char* key : {"k", "f_dual", "g_primal", "gap", "beta_hat", "restart_count", "wallclock_ms"})
    CHECK(last.contains(key));

  // Re-evaluating the certificate from the dumped solution reproduces the traced gap.
  const auto inst = io::read_instance(inst_path);
  const auto x = io::read_matrix(prefix + ".X");
  const auto u = io::read_matrix(prefix + ".U");
  const double gap = duality_gap(u, x, inst, 0.1, 10.0, 10.0);
  const double traced = last["gap"].get<double>();
  CHECK(std::abs(gap - traced) <= 1e-8 * std::max(1.0, std::abs(last["f_dual"].get<double>())));

  const auto rs = cli_run({"solve", "--in", inst_path, "--method", "sm", "--alpha", "0.1", "--beta", "10"});
  REQUIRE(rs.code == cli::kOk);
  auto primal = [](const std::string& line) {
    std::istringstream is(line);
    std::string method;
    double n = 0, iters = 0, obj = 0;
    is >> method >> n >> iters >> obj;
    return obj;
  };
  CHECK(std::abs(primal(rv.out) - primal(rs.out)) <= 0.2);

  const auto auto_box = cli_run({"solve", "--in", inst_path, "--method", "vsm", "--auto-bounds"});
  CHECK(auto_box.code == cli::kOk);

  const auto capped = cli_run({"solve", "--in", inst_path, "--method", "sm", "--alpha", "0.1", "--beta", "10",
                               "--max-iter", "3"});
  CHECK(capped.code == cli::kMaxIter);
  CHECK(capped.out.find("max_iter_reached") != std::string::npos);

  const auto missing = cli_run({"solve", "--method", "vsm"});
  CHECK(missing.code == cli::kBadInput);
  CHECK(missing.err.find("--in") != std::string::npos);
  CHECK(cli_run({"solve", "--in", (dir / "nope.cov").string()}).code == cli::kBadInput);
  CHECK(cli_run({"solve", "--in", inst_path, "--method", "foo"}).code == cli::kBadInput);
  CHECK(cli_run({"solve", "--in", inst_path, "--alpha", "2", "--beta", "1"}).code == cli::kBadInput);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bench rows and ordering") {
  const auto r = cli_run({"bench", "--n-list", "20,40", "--seeds", "1", "--methods", "sm,vsm", "--eps", "0.1",
                          "--alpha", "0.1", "--beta", "10", "--rho", "0.5"});
  REQUIRE(r.code == cli::kOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "n,seed,method,iters,obj,gap,ms,status");
  auto iters = [](const std::string& row) {
    std::vector<std::string> f;
    std::istringstream is(row);
    for (std::string c; std::getline(is, c, ',');) f.push_back(c);
    return std::stoll(f[3]);
  };
  CHECK(iters(ls[2]) < iters(ls[1]));
  CHECK(iters(ls[4]) < iters(ls[3]));
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i].find(",converged") != std::string::npos);

  const auto one = cli_run({"bench", "--n-list", "10", "--methods", "vsm"});
  CHECK(one.code == cli::kOk);
  CHECK(lines(one.out).size() == 2);

  CHECK(cli_run({"bench", "--n-list", "10", "--methods"}).code == cli::kBadInput);
  CHECK(cli_run({"bench", "--n-list", "10", "--methods", "foo"}).code == cli::kBadInput);
  CHECK(cli_run({"bench", "--methods", "sm"}).code == cli::kBadInput);

  const auto dir = scratch_dir("bench");
  const auto csv = (dir / "b.csv").string();
  const auto to_file = cli_run({"bench", "--n-list", "10", "--seeds", "1,2", "--methods", "sm", "--csv", csv, "--jobs", "2"});
  CHECK(to_file.code == cli::kOk);
  CHECK(lines(slurp(csv)).size() == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("check subcommand") {
  const auto ok = cli_run({"check", "--sizes", "2,3"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("oracle-vs-brute-force: 40/40 PASS") != std::string::npos);

  const auto bad = cli_run({"check", "--sizes", "2", "--perturb-grad", "0.01"});
  CHECK(bad.code == cli::kFailure);
  CHECK(bad.out.find("gradient: 0/10 FAIL") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(cli_run({}).code == cli::kBadInput);
  CHECK(cli_run({"frobnicate"}).code == cli::kBadInput);
  CHECK(cli_run({"--help"}).code == cli::kOk);
}
