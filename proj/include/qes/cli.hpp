#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qes/error.hpp"

namespace qes::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kNumericalFailure = 1;
constexpr int kInputError = 2;

int exit_code_for(ErrorKind kind);

struct SolveConfig {
  std::string model = "qomm";
  std::string backend = "matrix";
  std::string matrix_path;
  std::string hamiltonian_path;
  std::string ansatz_path;
  std::string init;
  std::optional<long> p;
  double mu = 1.0;
  double mu1 = 1.0;
  std::vector<double> weights;  // wql1m; defaults to p, p-1, ..., 1
  std::string optimizer = "trust";
  double rhobeg = 1e-1;
  double rhoend = 1e-7;
  int max_iters = 600;
  std::uint64_t seed = 0;
  double grad_tol = 1e-6;
  int starts = 1;
  int jobs = 1;
  double start_spread = 0.1;
  double eig_tol = 1e-4;
  std::string out_path;  // empty: JSON to stdout
  bool csv = false;      // write <out stem>.csv beside the JSON
  bool timestamp = true;
};

struct ResourceConfig {
  std::string model = "qomm";
  long p = 1;
  std::optional<long> n_u;
  std::string hamiltonian_path;
};

int cmd_solve(const SolveConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify_landscape(const std::string& scenario_path, const std::string& out_path, std::ostream& out,
                         std::ostream& err);
int cmd_resource_count(const ResourceConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qes::cli
