#include "qes/manifold.hpp"

#include <cmath>
#include <string>

#include "qes/error.hpp"

namespace qes {

ObliquePoint::ObliquePoint(const ComplexMatrix& x, double tol) : x_(x) {
  if (!all_finite(x)) throw Error(ErrorKind::InvalidInput, "oblique point has non-finite entries");
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double nrm = x.col(j).norm();
    if (std::abs(nrm - 1.0) > tol)
      throw Error(ErrorKind::InvalidInput, "column " + std::to_string(j) + " has norm " + std::to_string(nrm));
  }
}

ObliquePoint retract(const ComplexMatrix& x) {
  if (!all_finite(x)) throw Error(ErrorKind::InvalidInput, "cannot retract non-finite matrix");
  ComplexMatrix y = x;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double nrm = y.col(j).norm();
    if (!(nrm > 0.0)) throw Error(ErrorKind::DegenerateColumn, "column " + std::to_string(j) + " is zero");
    // Leave exact unit columns bit-identical so retraction is idempotent.
    if (nrm != 1.0) y.col(j) /= nrm;
  }
  return ObliquePoint(y, 1e-12);
}

ComplexMatrix tangent_project(const ComplexMatrix& x, const ComplexMatrix& g) {
  if (x.rows() != g.rows() || x.cols() != g.cols())
    throw Error(ErrorKind::DimensionMismatch, "tangent_project shape mismatch");
  ComplexMatrix out = g;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double radial = x.col(j).dot(g.col(j)).real();
    out.col(j) -= radial * x.col(j);
  }
  return out;
}

ComplexMatrix tangent_project(const ObliquePoint& x, const ComplexMatrix& g) {
  return tangent_project(x.matrix(), g);
}

ObliquePoint random_oblique(Eigen::Index n, Eigen::Index p, Rng& rng) {
  if (n < 1 || p < 1) throw Error(ErrorKind::InvalidInput, "random_oblique needs n, p >= 1");
  return retract(random_gaussian(n, p, rng));
}

ObliquePoint random_oblique(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Rng rng(seed);
  return random_oblique(n, p, rng);
}

double orthogonality_error(const ComplexMatrix& x) {
  const Eigen::Index p = x.cols();
  return (x.adjoint() * x - ComplexMatrix::Identity(p, p)).norm();
}

}  // namespace qes
