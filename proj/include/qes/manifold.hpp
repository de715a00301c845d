#pragma once

#include <cstdint>

#include "qes/linalg.hpp"

namespace qes {

// Point on OB(n,p): an n x p complex matrix with unit-norm columns.
class ObliquePoint {
 public:
  ObliquePoint() = default;
  // Validates membership (|‖x_i‖ - 1| <= tol); use retract() to normalize.
  explicit ObliquePoint(const ComplexMatrix& x, double tol = 1e-12);

  const ComplexMatrix& matrix() const { return x_; }
  Eigen::Index rows() const { return x_.rows(); }
  Eigen::Index cols() const { return x_.cols(); }

 private:
  ComplexMatrix x_;
};

ObliquePoint retract(const ComplexMatrix& x);
ComplexMatrix tangent_project(const ObliquePoint& x, const ComplexMatrix& g);
ComplexMatrix tangent_project(const ComplexMatrix& x, const ComplexMatrix& g);
ObliquePoint random_oblique(Eigen::Index n, Eigen::Index p, std::uint64_t seed);
ObliquePoint random_oblique(Eigen::Index n, Eigen::Index p, Rng& rng);
double orthogonality_error(const ComplexMatrix& x);
inline double orthogonality_error(const ObliquePoint& x) { return orthogonality_error(x.matrix()); }

}  // namespace qes
