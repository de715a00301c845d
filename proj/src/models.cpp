#include "qes/models.hpp"

#include <cmath>

#include "qes/error.hpp"

namespace qes {

const char* to_string(Model m) {
  switch (m) {
    case Model::QOMM: return "qomm";
    case Model::QTPM: return "qtpm";
    case Model::QL1M: return "ql1m";
    case Model::WEIGHTED_QL1M: return "wql1m";
  }
  return "?";
}

Model parse_model(const std::string& s) {
  if (s == "qomm") return Model::QOMM;
  if (s == "qtpm") return Model::QTPM;
  if (s == "ql1m") return Model::QL1M;
  if (s == "wql1m") return Model::WEIGHTED_QL1M;
  throw Error(ErrorKind::InvalidInput, "unknown model '" + s + "'");
}

namespace {

void check_weights(const RealVector& w, Eigen::Index p) {
  if (w.size() != p) throw Error(ErrorKind::InvalidWeights, "weight count must equal p");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(w(i) > 0.0)) throw Error(ErrorKind::InvalidWeights, "weights must be positive");
    if (i > 0 && !(w(i) < w(i - 1))) throw Error(ErrorKind::InvalidWeights, "weights must be strictly decreasing");
  }
}

void check_shapes(const HermitianOperator& a, const ComplexMatrix& x) {
  if (x.rows() != a.dim()) throw Error(ErrorKind::DimensionMismatch, "X rows must equal dim(A)");
}

double offdiag_abs_sum(const ComplexMatrix& c, double delta) {
  double s = 0.0;
  for (Eigen::Index j = 1; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) s += delta > 0 ? std::sqrt(std::norm(c(i, j)) + delta * delta) : std::abs(c(i, j));
  return s;
}

// X S with S_ij = C_ij / |C_ij| (smoothed), zero diagonal.
ComplexMatrix l1_penalty_grad(const ComplexMatrix& x, double delta) {
  const ComplexMatrix c = x.adjoint() * x;
  const Eigen::Index p = c.cols();
  ComplexMatrix s = ComplexMatrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) {
      if (i == j) continue;
      const double m = delta > 0 ? std::sqrt(std::norm(c(i, j)) + delta * delta) : std::abs(c(i, j));
      if (m > 0) s(i, j) = c(i, j) / m;
    }
  return x * s;
}

}  // namespace

void ModelConfig::validate(Eigen::Index p) const {
  if (model == Model::QTPM && !(mu > 0)) throw Error(ErrorKind::InvalidInput, "mu must be positive");
  if ((model == Model::QL1M || model == Model::WEIGHTED_QL1M) && !(mu1 > 0))
    throw Error(ErrorKind::InvalidInput, "mu1 must be positive");
  if (model == Model::WEIGHTED_QL1M) check_weights(weights, p);
  if (!(smoothing_delta >= 0)) throw Error(ErrorKind::InvalidInput, "smoothing delta must be nonnegative");
}

double checked_real(cplx z, const char* what) {
  if (std::abs(z.imag()) > 1e-8 * std::abs(z.real()) + 1e-10)
    throw Error(ErrorKind::ImaginaryResidue,
                std::string(what) + " has imaginary part " + std::to_string(z.imag()));
  return z.real();
}

double qomm_value(const HermitianOperator& a, const ComplexMatrix& x) {
  check_shapes(a, x);
  const Eigen::Index p = x.cols();
  const ComplexMatrix b = x.adjoint() * a.matrix() * x;
  const ComplexMatrix c = x.adjoint() * x;
  return checked_real((2.0 * ComplexMatrix::Identity(p, p) - c).cwiseProduct(b.transpose()).sum(), "qOMM value");
}

ComplexMatrix qomm_grad(const HermitianOperator& a, const ComplexMatrix& x) {
  check_shapes(a, x);
  const ComplexMatrix ax = a.matrix() * x;
  return 2.0 * (2.0 * ax - ax * (x.adjoint() * x) - x * (x.adjoint() * ax));
}

double qtpm_value(const HermitianOperator& a, const ComplexMatrix& x, double mu) {
  check_shapes(a, x);
  const ComplexMatrix c = x.adjoint() * x;
  const double tr = checked_real((x.adjoint() * a.matrix() * x).trace(), "qTPM trace");
  return 0.5 * tr + 0.25 * mu * c.squaredNorm();
}

ComplexMatrix qtpm_grad(const HermitianOperator& a, const ComplexMatrix& x, double mu) {
  check_shapes(a, x);
  return a.matrix() * x + mu * x * (x.adjoint() * x);
}

double qtpm_penalty_value(const HermitianOperator& a, const ComplexMatrix& x, double mu) {
  check_shapes(a, x);
  const Eigen::Index p = x.cols();
  const double tr = checked_real((x.adjoint() * a.matrix() * x).trace(), "qTPM trace");
  return 0.5 * tr + 0.25 * mu * (x.adjoint() * x - ComplexMatrix::Identity(p, p)).squaredNorm();
}

double ql1m_smoothed_value(const HermitianOperator& a, const ComplexMatrix& x, double mu1, double delta) {
  check_shapes(a, x);
  const double tr = checked_real((x.adjoint() * a.matrix() * x).trace(), "qL1M trace");
  return tr + mu1 * offdiag_abs_sum(x.adjoint() * x, delta);
}

double ql1m_value(const HermitianOperator& a, const ComplexMatrix& x, double mu1) {
  return ql1m_smoothed_value(a, x, mu1, 0.0);
}

ComplexMatrix ql1m_subgrad(const HermitianOperator& a, const ComplexMatrix& x, double mu1, double delta) {
  check_shapes(a, x);
  return 2.0 * a.matrix() * x + mu1 * l1_penalty_grad(x, delta);
}

double weighted_ql1m_smoothed_value(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& w,
                                    double mu1, double delta) {
  check_shapes(a, x);
  check_weights(w, x.cols());
  const ComplexMatrix b = x.adjoint() * a.matrix() * x;
  cplx tr = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) tr += b(i, i) * w(i);
  return checked_real(tr, "weighted qL1M trace") + mu1 * offdiag_abs_sum(x.adjoint() * x, delta);
}

double weighted_ql1m_value(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& w, double mu1) {
  return weighted_ql1m_smoothed_value(a, x, w, mu1, 0.0);
}

ComplexMatrix weighted_ql1m_subgrad(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& w,
                                    double mu1, double delta) {
  check_shapes(a, x);
  check_weights(w, x.cols());
  return 2.0 * a.matrix() * x * w.cast<cplx>().asDiagonal() + mu1 * l1_penalty_grad(x, delta);
}

double slrp_value(const HermitianOperator& a, const ComplexMatrix& x, double mu) {
  check_shapes(a, x);
  const Eigen::Index n = a.dim();
  const ComplexMatrix target = ComplexMatrix::Identity(n, n) - a.matrix() / mu;
  return 0.25 * mu * (x * x.adjoint() - target).squaredNorm();
}

double model_value(const ModelConfig& cfg, const HermitianOperator& a, const ComplexMatrix& x) {
  switch (cfg.model) {
    case Model::QOMM: return qomm_value(a, x);
    case Model::QTPM: return qtpm_value(a, x, cfg.mu);
    case Model::QL1M: return ql1m_value(a, x, cfg.mu1);
    case Model::WEIGHTED_QL1M: return weighted_ql1m_value(a, x, cfg.weights, cfg.mu1);
  }
  return 0.0;
}

double model_smoothed_value(const ModelConfig& cfg, const HermitianOperator& a, const ComplexMatrix& x, double delta) {
  switch (cfg.model) {
    case Model::QL1M: return ql1m_smoothed_value(a, x, cfg.mu1, delta);
    case Model::WEIGHTED_QL1M: return weighted_ql1m_smoothed_value(a, x, cfg.weights, cfg.mu1, delta);
    default: return model_value(cfg, a, x);
  }
}

ComplexMatrix model_grad(const ModelConfig& cfg, const HermitianOperator& a, const ComplexMatrix& x, double delta) {
  switch (cfg.model) {
    case Model::QOMM: return qomm_grad(a, x);
    case Model::QTPM: return qtpm_grad(a, x, cfg.mu);
    case Model::QL1M: return ql1m_subgrad(a, x, cfg.mu1, delta);
    case Model::WEIGHTED_QL1M: return weighted_ql1m_subgrad(a, x, cfg.weights, cfg.mu1, delta);
  }
  return {};
}

double minimum_value(const ModelConfig& cfg, const RealVector& lowest) {
  switch (cfg.model) {
    case Model::QOMM:
    case Model::QL1M: return lowest.sum();
    case Model::QTPM: {
      const double mean = lowest.mean();
      const double p = static_cast<double>(lowest.size());
      return 0.5 * lowest.sum() + (p * mean * mean - lowest.squaredNorm()) / (4.0 * cfg.mu);
    }
    case Model::WEIGHTED_QL1M: return cfg.weights.dot(lowest);
  }
  return 0.0;
}

double qtpm_orthogonality_plateau(const RealVector& lowest, double mu) {
  return (lowest.array() - lowest.mean()).matrix().norm() / mu;
}

RealVector qtpm_minimizer_profile(const RealVector& lowest, double mu) {
  return (1.0 - (lowest.array() - lowest.mean()) / mu).matrix();
}

ShiftedOperator negative_definite_shift(const HermitianOperator& a) {
  if (a.is_negative_definite()) return {a, 0.0};
  const double c = a.gershgorin_upper() + 1.0;
  return {a.shifted(c), c};
}

}  // namespace qes
