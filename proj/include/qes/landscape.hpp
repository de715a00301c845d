#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qes/linalg.hpp"
#include "qes/manifold.hpp"
#include "qes/models.hpp"

namespace qes {

// One column of a block basis: either eigenvector `eig` of A (0-based,
// ascending order) or the unit combination wa*q_a + wb*q_b.
struct BasisColumn {
  int eig = -1;
  int mix_a = -1;
  int mix_b = -1;
  double wa = 0.0;
  double wb = 0.0;

  static BasisColumn eigenvector(int k) { return {k, -1, -1, 0.0, 0.0}; }
  static BasisColumn mix(int a, int b, double wa, double wb) { return {-1, a, b, wa, wb}; }
  bool is_mix() const { return eig < 0; }
};

struct Block {
  Eigen::Index p = 0;                // number of X columns in the block
  std::vector<BasisColumn> columns;  // r = columns.size() (ignored if basis set)
  ComplexMatrix basis;               // optional explicit n x r basis

  Eigen::Index rank() const { return basis.size() > 0 ? basis.cols() : static_cast<Eigen::Index>(columns.size()); }
};

struct BlockSpec {
  Model model = Model::QOMM;
  std::vector<Block> blocks;

  Eigen::Index total_p() const;
};

// X = U diag(sqrt(sigma2)) V*, with U n x p orthonormal and V p x p unitary.
// Columns of U beyond a block's rank carry sigma2 = 0.
struct Factorization {
  ComplexMatrix u;
  RealVector sigma2;
  ComplexMatrix v;
  std::vector<int> block_of;  // U column -> block index
};

struct StationaryCertificate {
  ObliquePoint x;
  RealVector d;  // diagonal of the multiplier matrix D
  double residual = 0.0;
  std::optional<Factorization> factors;
};

double verify_qomm_stationary(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& d);
double verify_qtpm_stationary(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& d, double mu);

StationaryCertificate build_qomm_stationary(const HermitianOperator& a, const BlockSpec& spec);
StationaryCertificate build_qtpm_stationary(const HermitianOperator& a, double mu, const BlockSpec& spec);

// Q_p V*.
ObliquePoint build_qomm_minimizer(const HermitianOperator& a, Eigen::Index p, const ComplexMatrix& v);
// Q_p S^{1/2} V* with S = I - (L_p - Lbar_p)/mu. When V does not put X on
// OB(n,p) it is replaced by G V with G from the unit-diagonal rotation of
// V S V*; for V = I this is schur_horn_unit_diag(diag S).
ObliquePoint build_qtpm_minimizer(const HermitianOperator& a, double mu, Eigen::Index p, const ComplexMatrix& v);
// Orthonormal minimizers of qL1M share the qOMM form.
ObliquePoint build_ql1m_minimizer(const HermitianOperator& a, Eigen::Index p, const ComplexMatrix& v);
// Ordered Q_p with per-column phases.
ObliquePoint build_weighted_ql1m_minimizer(const HermitianOperator& a, Eigen::Index p, const RealVector& phases);

// Same left singular vectors as X, squared singular values replaced by
// sigma_tilde_sq (descending-order pairing with the SVD of X; zeros appended
// for rank-deficient X).
struct PerturbResult {
  ObliquePoint x;
  double distance = 0.0;
};
PerturbResult oblique_perturb(const ObliquePoint& x, const RealVector& sigma_tilde_sq);
// Same construction on an explicit factorization.
PerturbResult oblique_perturb(const Factorization& f, const RealVector& sigma_tilde_sq);

enum class EscapeKind { Blend, Transfer, Swap };
const char* to_string(EscapeKind k);

struct EscapeResult {
  ObliquePoint x;
  EscapeKind kind = EscapeKind::Blend;
  double epsilon_used = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
  double distance = 0.0;
};

// Halves epsilon (up to 40 times) until the objective strictly decreases.
// Throws AlreadyMinimal at minimizers.
EscapeResult saddle_escape(Model model, const HermitianOperator& a, const StationaryCertificate& cert, double mu,
                           double epsilon = 1e-3);

ComplexVector descent_direction_ql1m(const ComplexMatrix& x, const ComplexVector& x0);

enum class PointClass { Minimizer, Saddle, NonStationary };
const char* to_string(PointClass c);

struct Classification {
  PointClass kind = PointClass::NonStationary;
  double stationarity = 0.0;      // relative tangent-gradient norm
  double subspace_distance = 0.0; // principal-angle distance to span(Q_p)
  double form_error = 0.0;        // distance to the model's closed form
};

constexpr double kClassifyTol = 1e-6;

// `param` is mu for qTPM and mu1 for the qL1M variants (unused otherwise).
// For the qL1M variants an orthonormal point spanning an invariant subspace
// other than the lowest one is reported as Saddle.
Classification classify_point(Model model, const HermitianOperator& a, const ComplexMatrix& x, double param);

}  // namespace qes
