#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "covsel/problem.hpp"
#include "covsel/smacs.hpp"

namespace covsel::io {

// Instance file:
//   covsel-instance 1
//   <n>
//   <rho>
//   n rows of n whitespace-separated decimals (row-major sigma)
//
// Matrix file (solution dumps): same layout with header "covsel-matrix 1" and no rho line.
// All numbers are written with 17 significant digits.

inline constexpr const char* kInstanceHeader = "covsel-instance 1";
inline constexpr const char* kMatrixHeader = "covsel-matrix 1";

/// Asymmetry above this is rejected on load; smaller asymmetry is averaged away.
inline constexpr double kLoadAsymmetryTol = 1e-6;

std::string format_double(double x);

void write_instance(std::ostream& os, const Instance<double>& inst);
void write_instance(const std::string& path, const Instance<double>& inst);
Instance<double> read_instance(std::istream& is);
Instance<double> read_instance(const std::string& path);

void write_matrix(std::ostream& os, const SymMatrix<double>& m);
void write_matrix(const std::string& path, const SymMatrix<double>& m);
SymMatrix<double> read_matrix(std::istream& is);
SymMatrix<double> read_matrix(const std::string& path);

struct TraceMeta {
  std::string method;
  std::int64_t n = 0;
  double rho = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double eps = 0.0;
  std::optional<std::uint64_t> seed;
};

nlohmann::json trace_to_json(const TraceMeta& meta, const SolveReport<double>& report);
void write_trace(const std::string& path, const TraceMeta& meta, const SolveReport<double>& report);

}  // namespace covsel::io
