#include <gtest/gtest.h>

#include <cmath>

#include "qes/error.hpp"
#include "qes/io.hpp"
#include "qes/landscape.hpp"
#include "qes/optimize.hpp"
#include "test_support.hpp"

using namespace qes;
using qes::testing::random_negative_definite;

namespace {

const std::string kData = QES_DATA_DIR;

OptimizerOptions gd_options(double grad_tol = 1e-9) {
  OptimizerOptions o;
  o.method = Method::RIEMANNIAN_GD;
  o.max_iters = 20000;
  o.grad_tol = grad_tol;
  return o;
}

double rosenbrock(const RealVector& x) {
  return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
}

void expect_identical(const OptimizationTrace& a, const OptimizationTrace& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.evaluations, b.evaluations);
  EXPECT_EQ(a.accepted_moves, b.accepted_moves);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].objective, b.records[i].objective);
    EXPECT_EQ(a.records[i].evaluations, b.records[i].evaluations);
  }
}

}  // namespace

TEST(Options, Validation) {
  OptimizerOptions o;
  EXPECT_NO_THROW(o.validate());
  o.rho_end = 1.0;
  EXPECT_THROW(o.validate(), Error);
  o = OptimizerOptions{};
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), Error);
}

TEST(ScalarField, QuadraticBothMethods) {
  RealVector c(4);
  c << 1.0, -2.0, 0.5, 3.0;
  const ScalarField f = [&](const RealVector& x) { return (x - c).squaredNorm(); };
  for (const Method m : {Method::MODEL_TRUST_REGION, Method::SIMPLEX}) {
    OptimizerOptions o;
    o.method = m;
    o.max_iters = 5000;
    const ScalarResult r = minimize_scalar_field(f, RealVector::Zero(4), o);
    EXPECT_LE((r.x - c).norm(), 1e-6) << to_string(m);
  }
}

TEST(ScalarField, RosenbrockTrustRegion) {
  RealVector x0(2);
  x0 << -1.2, 1.0;
  OptimizerOptions o;
  o.max_iters = 5000;
  o.rho_end = 1e-9;
  const ScalarResult r = minimize_scalar_field(rosenbrock, x0, o);
  EXPECT_LE(r.value, 1e-8);
  EXPECT_LE(r.trace.evaluations, 5000);
}

TEST(ScalarField, NonFiniteObjectiveAbortsWithTrace) {
  const ScalarField f = [](const RealVector& x) { return x(0) > 0.05 ? NAN : (x(0) - 1.0) * (x(0) - 1.0); };
  OptimizerOptions o;
  try {
    minimize_scalar_field(f, RealVector::Zero(1), o);
    FAIL();
  } catch (const OptimizationError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteObjective);
    EXPECT_GE(e.trace().evaluations, 1);
  }
}

TEST(ScalarField, DeterministicTraces) {
  RealVector x0(2);
  x0 << -1.2, 1.0;
  for (const Method m : {Method::MODEL_TRUST_REGION, Method::SIMPLEX}) {
    OptimizerOptions o;
    o.method = m;
    o.seed = 11;
    const ScalarResult a = minimize_scalar_field(rosenbrock, x0, o);
    const ScalarResult b = minimize_scalar_field(rosenbrock, x0, o);
    expect_identical(a.trace, b.trace);
    EXPECT_EQ(a.x, b.x);
  }
}

TEST(Oblique, QommReachesTraceOfLowestEigenvalues) {
  Rng rng(1);
  const HermitianOperator a = random_negative_definite(16, rng);
  ModelConfig cfg;
  const ObliqueResult r = minimize_oblique(cfg, a, random_oblique(16, 3, rng), gd_options());
  EXPECT_NEAR(r.value, eigh(a).values.head(3).sum(), 1e-8);
}

TEST(Oblique, QtpmOrthogonalityPlateau) {
  Rng rng(2);
  const HermitianOperator a = random_negative_definite(16, rng);
  ModelConfig cfg;
  cfg.model = Model::QTPM;
  cfg.mu = 2.0 * a.spectral_norm();
  const ObliqueResult r = minimize_oblique(cfg, a, random_oblique(16, 3, rng), gd_options(1e-10));
  const RealVector lowest = eigh(a).values.head(3);
  EXPECT_NEAR(orthogonality_error(r.x), qtpm_orthogonality_plateau(lowest, cfg.mu), 1e-6);
  EXPECT_NEAR(r.value - cfg.mu * 3.0 / 4.0, minimum_value(cfg, lowest), 1e-8 * a.frobenius_norm());
}

TEST(Oblique, Ql1mSmoothedPath) {
  Rng rng(3);
  const HermitianOperator a = random_negative_definite(16, rng);
  ModelConfig cfg;
  cfg.model = Model::QL1M;
  cfg.mu1 = 1.01 * 16.0 * 3.0 * a.spectral_norm();
  const ObliqueResult r = minimize_oblique(cfg, a, random_oblique(16, 3, rng), gd_options());
  EXPECT_NEAR(r.value, eigh(a).values.head(3).sum(), 1e-6);
  EXPECT_LE(orthogonality_error(r.x), 1e-6);
}

TEST(Oblique, StartAtMinimizerMakesNoMoves) {
  Rng rng(4);
  const HermitianOperator a = random_negative_definite(10, rng);
  ModelConfig cfg;
  const ObliquePoint x0 = build_qomm_minimizer(a, 3, random_unitary(3, rng));
  const ObliqueResult r = minimize_oblique(cfg, a, x0, gd_options(1e-8));
  EXPECT_EQ(r.trace.accepted_moves, 0);
  EXPECT_EQ(r.trace.status, TerminalStatus::GradientConverged);
}

TEST(Oblique, GradientDescentIsMonotoneProperty) {
  Rng rng(5);
  const Model models[] = {Model::QOMM, Model::QTPM, Model::QL1M, Model::WEIGHTED_QL1M};
  for (int trial = 0; trial < 12; ++trial) {
    const HermitianOperator a = random_negative_definite(8 + trial % 5, rng);
    ModelConfig cfg;
    cfg.model = models[trial % 4];
    cfg.mu = 2.0 * a.spectral_norm();
    cfg.mu1 = 40.0 * a.spectral_norm();
    cfg.weights = RealVector::LinSpaced(2, 2.0, 1.0);
    OptimizerOptions o = gd_options(1e-8);
    o.max_iters = 500;
    const ObliqueResult r = minimize_oblique(cfg, a, random_oblique(a.dim(), 2, rng), o);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
      ASSERT_LE(r.trace.records[i].objective, r.trace.records[i - 1].objective + 1e-12 * a.frobenius_norm())
          << to_string(cfg.model) << " record " << i;
      ASSERT_GE(r.trace.records[i].evaluations, r.trace.records[i - 1].evaluations);
    }
  }
}

TEST(Oblique, DeterministicTraces) {
  Rng rng(6);
  const HermitianOperator a = random_negative_definite(8, rng);
  const ObliquePoint x0 = random_oblique(8, 2, rng);
  ModelConfig cfg;
  cfg.model = Model::QTPM;
  cfg.mu = 20.0;
  for (const Method m : {Method::RIEMANNIAN_GD, Method::MODEL_TRUST_REGION}) {
    OptimizerOptions o;
    o.method = m;
    o.max_iters = 200;
    expect_identical(minimize_oblique(cfg, a, x0, o).trace, minimize_oblique(cfg, a, x0, o).trace);
  }
}

TEST(Oblique, EveryLocalMinimumIsGlobalProperty) {
  Rng rng(7);
  const HermitianOperator a = random_negative_definite(16, rng);
  const RealVector lowest = eigh(a).values.head(3);
  for (const Model m : {Model::QOMM, Model::QTPM}) {
    ModelConfig cfg;
    cfg.model = m;
    cfg.mu = 2.0 * a.spectral_norm();
    const double shift = m == Model::QTPM ? cfg.mu * 3.0 / 4.0 : 0.0;
    const double want = minimum_value(cfg, lowest);
    int hits = 0;
    for (int s = 0; s < 20; ++s) {
      const ObliqueResult r = minimize_oblique(cfg, a, random_oblique(16, 3, rng), gd_options());
      if (std::abs(r.value - shift - want) <= 1e-6 * std::abs(want)) ++hits;
    }
    EXPECT_EQ(hits, 20) << to_string(m);
  }
}

TEST(Solve, MatrixBackendMatchesEigh) {
  Rng rng(8);
  SolveProblem prob;
  prob.matrix = random_negative_definite(12, rng);
  prob.p = 3;
  const SolveResult r = solve_eigenpairs(prob, gd_options());
  const EigenDecomposition e = eigh(*prob.matrix);
  EXPECT_LE((r.eigenvalues - e.values.head(3)).cwiseAbs().maxCoeff(), 1e-8);
  for (int i = 0; i < 3; ++i) {
    const ComplexVector v = r.vectors.col(i);
    EXPECT_LE((prob.matrix->matrix() * v - r.eigenvalues(i) * v).norm(), 1e-6 * prob.matrix->frobenius_norm() * v.norm());
  }
}

TEST(Solve, SingleStateIsGroundStateSearch) {
  Rng rng(9);
  for (const Model m : {Model::QOMM, Model::QTPM, Model::QL1M}) {
    SolveProblem prob;
    prob.matrix = random_negative_definite(6, rng);
    prob.p = 1;
    prob.cfg.model = m;
    prob.cfg.mu = 20.0;
    prob.cfg.mu1 = 200.0;
    const SolveResult r = solve_eigenpairs(prob, gd_options());
    EXPECT_NEAR(r.eigenvalues(0), eigh(*prob.matrix).values(0), 1e-8) << to_string(m);
  }
}

TEST(Solve, StatevectorQtpmOnH2) {
  SolveProblem prob;
  prob.backend = Backend::STATEVECTOR;
  prob.hamiltonian = load_hamiltonian(kData + "/h2_sto3g_4q.json");
  prob.circuits = load_ansatz(kData + "/h2_uccsd_ansatz.json");
  prob.initial_states = {"1010", "0110", "1001"};
  prob.p = 3;
  prob.cfg.model = Model::QTPM;
  prob.cfg.mu = 1.0;
  const SolveResult r = solve_eigenpairs(prob, OptimizerOptions{});
  EXPECT_LE(r.eig_rel_err, 1e-4);
  EXPECT_NEAR(r.reference(0), -1.857275030202379, 1e-10);

  const SolveResult again = solve_eigenpairs(prob, OptimizerOptions{});
  expect_identical(r.trace, again.trace);
}
