#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qes/error.hpp"
#include "qes/linalg.hpp"
#include "qes/manifold.hpp"
#include "qes/models.hpp"
#include "qes/quantum.hpp"

namespace qes {

enum class Method { SIMPLEX, MODEL_TRUST_REGION, RIEMANNIAN_GD };
const char* to_string(Method m);

// Stagnated: RIEMANNIAN_GD line search can no longer resolve a decrease
// above rounding error.
enum class TerminalStatus { RadiusConverged, GradientConverged, Stagnated, MaxIters };
const char* to_string(TerminalStatus s);

struct OptimizerOptions {
  Method method = Method::MODEL_TRUST_REGION;
  double rho_begin = 1e-1;
  double rho_end = 1e-7;
  int max_iters = 600;
  std::uint64_t seed = 0;
  // RIEMANNIAN_GD: stop once ‖grad‖_F <= grad_tol * ‖A‖_F.
  double grad_tol = 1e-6;
  int max_backtracks = 50;
  // RIEMANNIAN_GD on qL1M: smoothing starts here and is divided by 10 per
  // stage down to ModelConfig::smoothing_delta.
  double smoothing_start = 1e-1;

  void validate() const;
};

constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double relative_objective_error = kNotRecorded;
  double orthogonality_error = kNotRecorded;
  double eigenvalue_rel_error = kNotRecorded;
  long evaluations = 0;
};

struct OptimizationTrace {
  std::vector<IterationRecord> records;
  TerminalStatus status = TerminalStatus::MaxIters;
  long evaluations = 0;
  int accepted_moves = 0;
};

// Carries the partial trace of an aborted run.
class OptimizationError : public Error {
 public:
  OptimizationError(ErrorKind kind, const std::string& what, OptimizationTrace trace)
      : Error(kind, what), trace_(std::move(trace)) {}
  const OptimizationTrace& trace() const { return trace_; }

 private:
  OptimizationTrace trace_;
};

using ScalarField = std::function<double(const RealVector&)>;
// Observers may fill the optional metrics of each record.
using ScalarObserver = std::function<void(IterationRecord&, const RealVector&)>;
using ObliqueObserver = std::function<void(IterationRecord&, const ComplexMatrix&)>;

struct ScalarResult {
  RealVector x;
  double value = 0.0;
  OptimizationTrace trace;
};

// SIMPLEX or MODEL_TRUST_REGION. Returns the lowest evaluated point.
ScalarResult minimize_scalar_field(const ScalarField& f, const RealVector& x0, const OptimizerOptions& opts,
                                   const ScalarObserver& observer = {});

struct ObliqueResult {
  ObliquePoint x;
  double value = 0.0;
  OptimizationTrace trace;
};

// RIEMANNIAN_GD uses tangent projection and column-normalization retraction
// with Barzilai-Borwein steps and Armijo backtracking; the derivative-free
// methods work on the chart X0 + dX followed by retraction.
ObliqueResult minimize_oblique(const ModelConfig& cfg, const HermitianOperator& a, const ObliquePoint& x0,
                               const OptimizerOptions& opts, const ObliqueObserver& observer = {});

enum class Backend { MATRIX, STATEVECTOR };

struct SolveProblem {
  Backend backend = Backend::MATRIX;
  ModelConfig cfg;
  // MATRIX backend.
  std::optional<HermitianOperator> matrix;
  Eigen::Index p = 1;
  // STATEVECTOR backend.
  std::optional<PauliHamiltonian> hamiltonian;
  std::vector<AnsatzCircuit> circuits;
  std::vector<std::string> initial_states;
  // Multi-start: run `starts` independent runs and keep the lowest objective.
  int starts = 1;
  int jobs = 1;
  // Statevector starts beyond the first draw parameters from N(0, nu^2);
  // the first start is all zeros.
  double start_spread = 0.1;
};

struct SolveResult {
  RealVector eigenvalues;   // Rayleigh-Ritz values, ascending
  ComplexMatrix vectors;    // Ritz vectors (columns)
  RealVector reference;     // lowest p eigenvalues of the dense oracle
  RealVector params;        // STATEVECTOR only
  ComplexMatrix x;          // final point (MATRIX) or final states (STATEVECTOR)
  OptimizationTrace trace;  // trace of the kept start
  double objective = 0.0;
  double reference_objective = 0.0;
  double shift = 0.0;       // qOMM shift applied to the operator
  double eig_rel_err = 0.0; // ‖lambda - lambda_ref‖_2 / ‖lambda_ref‖_2
  double objective_rel_err = 0.0;
  double ortho_err = 0.0;
  int kept_start = 0;
};

double eigenvalue_relative_error(const RealVector& values, const RealVector& reference);

SolveResult solve_eigenpairs(const SolveProblem& problem, const OptimizerOptions& opts);

}  // namespace qes
