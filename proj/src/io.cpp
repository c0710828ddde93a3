#include "covsel/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace covsel::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open '" + path + "' for reading");
  return is;
}

void expect_header(std::istream& is, const std::string& header) {
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto first = line.find_first_not_of(" \t");
    const auto last = line.find_last_not_of(" \t");
    if (line.substr(first, last - first + 1) != header) {
      throw InvalidInput("expected header '" + header + "', got '" + line + "'");
    }
    return;
  }
  throw InvalidInput("missing header '" + header + "'");
}

template <typename T>
T read_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw InvalidInput(std::string("unexpected end of input reading ") + what);
  std::istringstream ts(tok);
  T value{};
  ts >> value;
  if (!ts || !ts.eof()) throw InvalidInput(std::string("malformed ") + what + ": '" + tok + "'");
  return value;
}

void write_rows(std::ostream& os, const SymMatrix<double>& m) {
  for (Index i = 0; i < m.n(); ++i) {
    for (Index j = 0; j < m.n(); ++j) {
      if (j > 0) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

SymMatrix<double> read_rows(std::istream& is, Index n) {
  DenseMatrix<double> m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = read_token<double>(is, "matrix entry");
  std::string extra;
  if (is >> extra) throw InvalidInput("trailing data after matrix: '" + extra + "'");
  return SymMatrix<double>::from_dense_checked(m, kLoadAsymmetryTol);
}

Index read_dimension(std::istream& is) {
  const auto n = read_token<long long>(is, "dimension");
  if (n < 1) throw InvalidInput("dimension must be at least 1");
  return static_cast<Index>(n);
}

}  // namespace

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

void write_instance(std::ostream& os, const Instance<double>& inst) {
  os << kInstanceHeader << '\n' << inst.n() << '\n' << format_double(inst.rho()) << '\n';
  write_rows(os, inst.sigma());
}

void write_instance(const std::string& path, const Instance<double>& inst) {
  auto os = open_out(path);
  write_instance(os, inst);
  if (!os) throw InvalidInput("failed writing '" + path + "'");
}

Instance<double> read_instance(std::istream& is) {
  expect_header(is, kInstanceHeader);
  const Index n = read_dimension(is);
  const double rho = read_token<double>(is, "rho");
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  return Instance<double>(read_rows(is, n), rho);
}

Instance<double> read_instance(const std::string& path) {
  auto is = open_in(path);
  return read_instance(is);
}

void write_matrix(std::ostream& os, const SymMatrix<double>& m) {
  os << kMatrixHeader << '\n' << m.n() << '\n';
  write_rows(os, m);
}

void write_matrix(const std::string& path, const SymMatrix<double>& m) {
  auto os = open_out(path);
  write_matrix(os, m);
  if (!os) throw InvalidInput("failed writing '" + path + "'");
}

SymMatrix<double> read_matrix(std::istream& is) {
  expect_header(is, kMatrixHeader);
  return read_rows(is, read_dimension(is));
}

SymMatrix<double> read_matrix(const std::string& path) {
  auto is = open_in(path);
  return read_matrix(is);
}

nlohmann::json trace_to_json(const TraceMeta& meta, const SolveReport<double>& report) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& r : report.trace) {
    iterations.push_back({{"k", r.k},
                          {"f_dual", r.f_dual},
                          {"g_primal", r.g_primal},
                          {"gap", r.gap},
                          {"cheap_gap", r.cheap_gap},
                          {"beta_hat", r.beta_hat},
                          {"restart_count", r.restart_count},
                          {"wallclock_ms", r.wallclock_ms}});
  }
  nlohmann::json doc = {{"method", meta.method},
                        {"n", meta.n},
                        {"rho", meta.rho},
                        {"alpha", meta.alpha},
                        {"beta", meta.beta},
                        {"eps", meta.eps},
                        {"seed", nullptr},
                        {"iterations", std::move(iterations)},
                        {"status", to_string(report.status)},
                        {"total_ms", static_cast<std::int64_t>(report.total_ms + 0.5)},
                        {"primal_obj", report.primal_obj},
                        {"dual_obj", report.dual_obj}};
  if (meta.seed) doc["seed"] = *meta.seed;
  return doc;
}

void write_trace(const std::string& path, const TraceMeta& meta, const SolveReport<double>& report) {
  auto os = open_out(path);
  os << trace_to_json(meta, report).dump(2) << '\n';
  if (!os) throw InvalidInput("failed writing '" + path + "'");
}

}  // namespace covsel::io
