#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

namespace qes {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Dense Hermitian matrix. The input is checked for Hermiticity and then
// symmetrized, so matrix() is exactly self-adjoint.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);
  static HermitianOperator from_real_diagonal(const RealVector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

  // Checked through eigh on every call; the operator caches nothing.
  bool is_negative_definite() const;
  double spectral_norm() const;
  double frobenius_norm() const { return m_.norm(); }

  // Upper Gershgorin bound on the spectrum.
  double gershgorin_upper() const;
  HermitianOperator shifted(double c) const;  // A - cI

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

EigenDecomposition eigh(const HermitianOperator& a);
// Same routine for a matrix already known to be Hermitian; only the lower
// triangle mirrored into the upper is trusted.
EigenDecomposition eigh(const ComplexMatrix& a);

struct SvdResult {
  ComplexMatrix u;     // n x r
  RealVector sigma;    // r, descending, strictly positive
  ComplexMatrix v;     // p x r
};

// Rank-revealing thin SVD: singular values below 1e-12 * sigma_max are dropped.
SvdResult svd(const ComplexMatrix& x);
// All min(n, p) singular values, descending, including zeros.
RealVector singular_values(const ComplexMatrix& x);

struct GeneralizedEigen {
  RealVector values;  // ascending
  ComplexMatrix r;    // C-orthonormal: R* C R = I
};

constexpr double kMetricConditionFloor = 1e-10;

GeneralizedEigen generalized_eigh(const ComplexMatrix& b, const ComplexMatrix& c);

bool is_strictly_majorized_by_ones(const RealVector& s);

// Unitary G with diag(G H G*) = 1 for Hermitian H of trace dim(H).
// Uses at most dim(H) - 1 plane rotations.
ComplexMatrix unit_diagonal_rotation(const ComplexMatrix& h);

// Same target, found by minimal-norm Newton steps from the identity. Returns
// nullopt when the iteration stalls (e.g. rows that need fixing do not
// couple through H).
std::optional<ComplexMatrix> unit_diagonal_rotation_near_identity(const ComplexMatrix& h);
ComplexMatrix schur_horn_unit_diag(const RealVector& s);

// Haar-distributed unitary via QR of a complex Gaussian matrix.
ComplexMatrix random_unitary(Eigen::Index n, Rng& rng);
ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
RealVector random_normal_vector(Eigen::Index n, Rng& rng);

// Orthonormal basis of the column span (via svd).
ComplexMatrix orthonormal_basis(const ComplexMatrix& x);
// Frobenius norm of the sines of the principal angles between the spans.
double subspace_distance(const ComplexMatrix& x, const ComplexMatrix& y);

bool all_finite(const ComplexMatrix& m);

}  // namespace qes
