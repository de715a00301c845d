#include "qes/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "qes/error.hpp"

namespace qes {

Eigen::Index BlockSpec::total_p() const {
  Eigen::Index p = 0;
  for (const auto& b : blocks) p += b.p;
  return p;
}

const char* to_string(EscapeKind k) {
  switch (k) {
    case EscapeKind::Blend: return "blend";
    case EscapeKind::Transfer: return "transfer";
    case EscapeKind::Swap: return "swap";
  }
  return "?";
}

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Minimizer: return "Minimizer";
    case PointClass::Saddle: return "Saddle";
    case PointClass::NonStationary: return "NonStationary";
  }
  return "?";
}

namespace {

double membership_violation(const ComplexMatrix& x) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) v += std::abs(x.col(j).norm() - 1.0);
  return v;
}

void check_multipliers(const ComplexMatrix& x, const RealVector& d) {
  if (d.size() != x.cols()) throw Error(ErrorKind::DimensionMismatch, "multiplier count must equal p");
}

// n x m orthonormal columns orthogonal to the orthonormal columns of q.
ComplexMatrix complement_basis(const ComplexMatrix& q, Eigen::Index m) {
  const Eigen::Index n = q.rows();
  if (q.cols() + m > n) throw Error(ErrorKind::InconsistentSpec, "not enough room to complete the basis");
  if (q.cols() == 0) return ComplexMatrix::Identity(n, n).leftCols(m);
  Eigen::HouseholderQR<ComplexMatrix> qr(q);
  const ComplexMatrix full = qr.householderQ() * ComplexMatrix::Identity(n, n);
  return full.middleCols(q.cols(), m);
}

// Completion of span(q) by the m lowest Ritz vectors of A on the orthogonal
// complement; these are eigenvectors of A whenever the complement is
// A-invariant.
ComplexMatrix compressed_completion(const HermitianOperator& a, const ComplexMatrix& q, Eigen::Index m) {
  if (m == 0) return ComplexMatrix(a.dim(), 0);
  const ComplexMatrix k = complement_basis(q, a.dim() - q.cols());
  const EigenDecomposition ed = eigh(ComplexMatrix(k.adjoint() * a.matrix() * k));
  return k * ed.vectors.leftCols(m);
}

ComplexMatrix resolve_basis(const Block& b, const EigenDecomposition& ed) {
  const Eigen::Index n = ed.vectors.rows();
  if (b.basis.size() > 0) {
    if (b.basis.rows() != n) throw Error(ErrorKind::InconsistentSpec, "block basis has wrong row count");
    return b.basis;
  }
  ComplexMatrix u(n, static_cast<Eigen::Index>(b.columns.size()));
  auto q = [&](int k) -> ComplexVector {
    if (k < 0 || k >= n) throw Error(ErrorKind::InconsistentSpec, "eigenvector index " + std::to_string(k) + " out of range");
    return ed.vectors.col(k);
  };
  for (std::size_t j = 0; j < b.columns.size(); ++j) {
    const BasisColumn& c = b.columns[j];
    if (!c.is_mix()) {
      u.col(j) = q(c.eig);
      continue;
    }
    if (c.mix_a == c.mix_b) throw Error(ErrorKind::InconsistentSpec, "mixed column needs two distinct eigenvectors");
    if (std::abs(c.wa * c.wa + c.wb * c.wb - 1.0) > 1e-12)
      throw Error(ErrorKind::InconsistentSpec, "mixing weights must satisfy wa^2 + wb^2 = 1");
    u.col(j) = c.wa * q(c.mix_a) + c.wb * q(c.mix_b);
  }
  return u;
}

struct ResolvedBlocks {
  std::vector<ComplexMatrix> bases;
  ComplexMatrix all;   // n x sum(r)
  RealVector rayleigh; // diag(U* A U)
  std::vector<bool> is_eigen;
};

ResolvedBlocks resolve_blocks(const HermitianOperator& a, const BlockSpec& spec, const EigenDecomposition& ed) {
  if (spec.blocks.empty()) throw Error(ErrorKind::InconsistentSpec, "spec has no blocks");
  ResolvedBlocks rb;
  Eigen::Index total_r = 0;
  for (const auto& b : spec.blocks) {
    const Eigen::Index r = b.rank();
    if (r < 1) throw Error(ErrorKind::InconsistentSpec, "block rank must be at least 1");
    if (r > b.p) throw Error(ErrorKind::InconsistentSpec, "block rank exceeds block size");
    rb.bases.push_back(resolve_basis(b, ed));
    total_r += r;
  }
  const Eigen::Index n = a.dim();
  if (spec.total_p() > n) throw Error(ErrorKind::InconsistentSpec, "p exceeds n");
  rb.all.resize(n, total_r);
  Eigen::Index off = 0;
  for (const auto& u : rb.bases) {
    rb.all.middleCols(off, u.cols()) = u;
    off += u.cols();
  }
  const double an = a.frobenius_norm();
  if ((rb.all.adjoint() * rb.all - ComplexMatrix::Identity(total_r, total_r)).norm() > 1e-10)
    throw Error(ErrorKind::InconsistentSpec, "block bases are not orthonormal");
  ComplexMatrix m = rb.all.adjoint() * a.matrix() * rb.all;
  rb.rayleigh = m.diagonal().real();
  m.diagonal().setZero();
  if (m.norm() > 1e-10 * an) throw Error(ErrorKind::InconsistentSpec, "block bases are not A-orthogonal");
  rb.is_eigen.resize(total_r);
  for (Eigen::Index j = 0; j < total_r; ++j) {
    const ComplexVector u = rb.all.col(j);
    rb.is_eigen[j] = (a.matrix() * u - rb.rayleigh(j) * u).norm() <= 1e-10 * an;
  }
  return rb;
}

struct BlockProfile {
  double d = 0.0;
  RealVector sigma2;  // length r
};

StationaryCertificate assemble(const HermitianOperator& a, const BlockSpec& spec, const ResolvedBlocks& rb,
                               const std::vector<BlockProfile>& prof) {
  const double an = a.frobenius_norm();
  for (std::size_t i = 0; i < prof.size(); ++i)
    for (std::size_t k = i + 1; k < prof.size(); ++k)
      if (std::abs(prof[i].d - prof[k].d) <= 1e-10 * std::max(1.0, an))
        throw Error(ErrorKind::InconsistentSpec, "blocks " + std::to_string(i) + " and " + std::to_string(k) +
                                                     " share the multiplier d = " + std::to_string(prof[i].d));
  const Eigen::Index n = a.dim();
  const Eigen::Index p = spec.total_p();
  const Eigen::Index total_r = rb.all.cols();
  const ComplexMatrix completion = compressed_completion(a, rb.all, p - total_r);

  Factorization f;
  f.u.resize(n, p);
  f.sigma2 = RealVector::Zero(p);
  f.v = ComplexMatrix::Zero(p, p);
  f.block_of.assign(p, 0);
  RealVector d(p);
  Eigen::Index col = 0, comp = 0;
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const Eigen::Index pi = spec.blocks[i].p;
    const Eigen::Index ri = rb.bases[i].cols();
    RealVector s = RealVector::Zero(pi);
    s.head(ri) = prof[i].sigma2;
    f.u.middleCols(col, ri) = rb.bases[i];
    f.u.middleCols(col + ri, pi - ri) = completion.middleCols(comp, pi - ri);
    comp += pi - ri;
    f.sigma2.segment(col, pi) = s;
    f.v.block(col, col, pi, pi) = schur_horn_unit_diag(s);
    d.segment(col, pi).setConstant(prof[i].d);
    for (Eigen::Index j = 0; j < pi; ++j) f.block_of[col + j] = static_cast<int>(i);
    col += pi;
  }
  const ComplexMatrix x = f.u * f.sigma2.cwiseSqrt().cast<cplx>().asDiagonal() * f.v.adjoint();
  StationaryCertificate cert{retract(x), d, 0.0, f};
  return cert;
}

}  // namespace

double verify_qomm_stationary(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& d) {
  check_multipliers(x, d);
  const ComplexMatrix ax = a.matrix() * x;
  const ComplexMatrix r =
      2.0 * ax - ax * (x.adjoint() * x) - x * (x.adjoint() * ax) + x * d.cast<cplx>().asDiagonal();
  return r.norm() + membership_violation(x);
}

double verify_qtpm_stationary(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& d, double mu) {
  check_multipliers(x, d);
  const ComplexMatrix r = a.matrix() * x + mu * x * (x.adjoint() * x) + x * d.cast<cplx>().asDiagonal();
  return r.norm() + membership_violation(x);
}

StationaryCertificate build_qomm_stationary(const HermitianOperator& a, const BlockSpec& spec) {
  if (!a.is_negative_definite()) throw Error(ErrorKind::NotNegativeDefinite, "qOMM landscape needs negative definite A");
  const EigenDecomposition ed = eigh(a);
  const ResolvedBlocks rb = resolve_blocks(a, spec, ed);
  std::vector<BlockProfile> prof;
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const Eigen::Index pi = spec.blocks[i].p;
    const Eigen::Index ri = rb.bases[i].cols();
    const RealVector at = rb.rayleigh.segment(off, ri);
    BlockProfile bp;
    bp.d = ri == pi ? 0.0 : 2.0 * static_cast<double>(pi - ri) / at.cwiseInverse().sum();
    bp.sigma2 = (1.0 + bp.d / 2.0 * at.cwiseInverse().array()).matrix();
    for (Eigen::Index j = 0; j < ri; ++j) {
      if (!rb.is_eigen[off + j] && std::abs(bp.sigma2(j) - 2.0) > 1e-10)
        throw Error(ErrorKind::InconsistentSpec, "non-eigenvector column in block " + std::to_string(i) +
                                                     " needs sigma^2 = 2, got " + std::to_string(bp.sigma2(j)));
    }
    prof.push_back(bp);
    off += ri;
  }
  StationaryCertificate cert = assemble(a, spec, rb, prof);
  cert.residual = verify_qomm_stationary(a, cert.x.matrix(), cert.d);
  return cert;
}

StationaryCertificate build_qtpm_stationary(const HermitianOperator& a, double mu, const BlockSpec& spec) {
  const EigenDecomposition ed = eigh(a);
  if (!(mu > std::abs(ed.values(0))))
    throw Error(ErrorKind::MuTooSmall, "mu must exceed |lambda_min(A)| = " + std::to_string(std::abs(ed.values(0))));
  const ResolvedBlocks rb = resolve_blocks(a, spec, ed);
  std::vector<BlockProfile> prof;
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const Eigen::Index pi = spec.blocks[i].p;
    const Eigen::Index ri = rb.bases[i].cols();
    for (Eigen::Index j = 0; j < ri; ++j)
      if (!rb.is_eigen[off + j]) throw Error(ErrorKind::InconsistentSpec, "qTPM blocks need eigenvector bases");
    const RealVector lam = rb.rayleigh.segment(off, ri);
    BlockProfile bp;
    bp.d = -(lam.sum() + mu * static_cast<double>(pi)) / static_cast<double>(ri);
    bp.sigma2 = (static_cast<double>(pi) / static_cast<double>(ri) - (lam.array() - lam.mean()) / mu).matrix();
    if (bp.sigma2.minCoeff() <= 0.0)
      throw Error(ErrorKind::InconsistentSpec, "block " + std::to_string(i) + " has a nonpositive sigma^2");
    prof.push_back(bp);
    off += ri;
  }
  StationaryCertificate cert = assemble(a, spec, rb, prof);
  cert.residual = verify_qtpm_stationary(a, cert.x.matrix(), cert.d, mu);
  return cert;
}

namespace {

void check_unitary(const ComplexMatrix& v, Eigen::Index p) {
  if (v.rows() != p || v.cols() != p) throw Error(ErrorKind::DimensionMismatch, "V must be p x p");
  if ((v.adjoint() * v - ComplexMatrix::Identity(p, p)).norm() > 1e-10)
    throw Error(ErrorKind::InvalidInput, "V is not unitary");
}

ComplexMatrix lowest_vectors(const HermitianOperator& a, Eigen::Index p, RealVector* values = nullptr) {
  if (p < 1 || p > a.dim()) throw Error(ErrorKind::InvalidInput, "p must lie in [1, n]");
  const EigenDecomposition ed = eigh(a);
  if (values) *values = ed.values.head(p);
  return ed.vectors.leftCols(p);
}

}  // namespace

ObliquePoint build_qomm_minimizer(const HermitianOperator& a, Eigen::Index p, const ComplexMatrix& v) {
  check_unitary(v, p);
  return retract(lowest_vectors(a, p) * v.adjoint());
}

ObliquePoint build_ql1m_minimizer(const HermitianOperator& a, Eigen::Index p, const ComplexMatrix& v) {
  return build_qomm_minimizer(a, p, v);
}

ObliquePoint build_weighted_ql1m_minimizer(const HermitianOperator& a, Eigen::Index p, const RealVector& phases) {
  if (phases.size() != p) throw Error(ErrorKind::DimensionMismatch, "need one phase per column");
  ComplexMatrix q = lowest_vectors(a, p);
  for (Eigen::Index j = 0; j < p; ++j) q.col(j) *= std::polar(1.0, phases(j));
  return retract(q);
}

ObliquePoint build_qtpm_minimizer(const HermitianOperator& a, double mu, Eigen::Index p, const ComplexMatrix& v_in) {
  check_unitary(v_in, p);
  RealVector lam;
  const ComplexMatrix q = lowest_vectors(a, p, &lam);
  const double lmin = eigh(a).values(0);
  if (!(mu > std::abs(lmin))) throw Error(ErrorKind::MuTooSmall, "mu must exceed |lambda_min(A)|");
  const RealVector s = qtpm_minimizer_profile(lam, mu);
  ComplexMatrix v = v_in;
  const ComplexMatrix h = v * s.cast<cplx>().asDiagonal() * v.adjoint();
  if ((h.diagonal().real().array() - 1.0).abs().maxCoeff() > 1e-10) v = unit_diagonal_rotation(h) * v;
  return retract(q * s.cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint());
}

PerturbResult oblique_perturb(const Factorization& f, const RealVector& sigma_tilde_sq) {
  const Eigen::Index k = f.sigma2.size();
  const Eigen::Index p = f.v.rows();
  if (sigma_tilde_sq.size() != k) throw Error(ErrorKind::DimensionMismatch, "profile length must match the factorization");
  if (sigma_tilde_sq.minCoeff() < -1e-12) throw Error(ErrorKind::MajorizationError, "profile has negative entries");
  if (std::abs(sigma_tilde_sq.sum() - f.sigma2.sum()) > 1e-10)
    throw Error(ErrorKind::MajorizationError, "profile must preserve the sum of squared singular values");
  RealVector padded = RealVector::Zero(p);
  padded.head(k) = sigma_tilde_sq.cwiseMax(0.0);
  const bool ones = (padded.array() - 1.0).abs().maxCoeff() <= 1e-12;
  if (!ones && !is_strictly_majorized_by_ones(padded))
    throw Error(ErrorKind::MajorizationError, "profile is not majorized by the ones vector");
  const RealVector st = sigma_tilde_sq.cwiseMax(0.0);
  const ComplexMatrix h = f.v * st.cast<cplx>().asDiagonal() * f.v.adjoint();
  const std::optional<ComplexMatrix> near = unit_diagonal_rotation_near_identity(h);
  const ComplexMatrix vt = (near ? *near : unit_diagonal_rotation(h)) * f.v;
  const ComplexMatrix x0 = f.u * f.sigma2.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() * f.v.adjoint();
  const ComplexMatrix x1 = f.u * st.cwiseSqrt().cast<cplx>().asDiagonal() * vt.adjoint();
  ObliquePoint xp = retract(x1);
  return {xp, (xp.matrix() - x0).norm()};
}

namespace {

// SVD of X with U completed by Ritz vectors of A on the complement (when
// an operator is given) or by an arbitrary orthonormal complement.
Factorization factor_point(const ComplexMatrix& x, const HermitianOperator* a) {
  const Eigen::Index n = x.rows(), p = x.cols();
  const Eigen::Index k = std::min(n, p);
  const SvdResult s = svd(x);
  const Eigen::Index r = s.sigma.size();
  Factorization f;
  f.u.resize(n, k);
  f.u.leftCols(r) = s.u;
  f.u.rightCols(k - r) = a ? compressed_completion(*a, s.u, k - r) : complement_basis(s.u, k - r);
  f.sigma2 = RealVector::Zero(k);
  f.sigma2.head(r) = s.sigma.cwiseAbs2();
  f.v.resize(p, k);
  f.v.leftCols(r) = s.v;
  f.v.rightCols(k - r) = complement_basis(s.v, k - r);
  f.block_of.assign(k, 0);
  return f;
}

}  // namespace

PerturbResult oblique_perturb(const ObliquePoint& x, const RealVector& sigma_tilde_sq) {
  return oblique_perturb(factor_point(x.matrix(), nullptr), sigma_tilde_sq);
}

EscapeResult saddle_escape(Model model, const HermitianOperator& a, const StationaryCertificate& cert, double mu,
                           double epsilon) {
  if (model != Model::QOMM && model != Model::QTPM)
    throw Error(ErrorKind::InvalidInput, "saddle_escape supports qOMM and qTPM");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidInput, "epsilon must lie in (0, 1)");
  const ComplexMatrix& x = cert.x.matrix();
  const Eigen::Index p = x.cols();
  const Factorization f = cert.factors ? *cert.factors : factor_point(x, &a);
  if (f.u.cols() != p) throw Error(ErrorKind::InvalidInput, "escape needs n >= p");

  auto value = [&](const ComplexMatrix& y) { return model == Model::QOMM ? qomm_value(a, y) : qtpm_value(a, y, mu); };
  const double f0 = value(x);
  const double scale = a.frobenius_norm() + (model == Model::QTPM ? mu : 0.0);
  const RealVector m = (f.u.adjoint() * a.matrix() * f.u).diagonal().real();
  const RealVector& s2 = f.sigma2;

  EscapeKind kind;
  Eigen::Index from = -1, to = -1;
  ComplexVector qhat;
  if (model == Model::QOMM && (s2.array() - 1.0).abs().maxCoeff() > 1e-8) {
    kind = EscapeKind::Blend;
  } else {
    RealVector c = m + mu * s2;
    if (model == Model::QTPM) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (s2(j) > 1e-12 && (from < 0 || c(j) > c(from))) from = j;
        if (to < 0 || c(j) < c(to)) to = j;
      }
      // Rank-deficient points transfer into a zero singular value, which
      // keeps the move within O(eps^{1/2}).
      // The pair must share support in V, otherwise restoring unit column
      // norms needs an O(1) rotation.
      double gain = 1e-8 * scale;
      Eigen::Index pf = -1, pt = -1;
      for (Eigen::Index t = 0; t < p; ++t) {
        if (s2(t) > 1e-12) continue;
        for (Eigen::Index j = 0; j < p; ++j) {
          if (s2(j) <= 1e-12 || c(j) - c(t) <= gain) continue;
          if (f.v.col(j).cwiseAbs().dot(f.v.col(t).cwiseAbs()) < 1e-6) continue;
          gain = c(j) - c(t);
          pf = j;
          pt = t;
        }
      }
      if (pf >= 0) {
        from = pf;
        to = pt;
      }
    }
    if (model == Model::QTPM && c(from) - c(to) > 1e-8 * scale) {
      kind = EscapeKind::Transfer;
    } else {
      // Full-rank point on an invariant subspace: swap toward a missing
      // low eigenvector.
      kind = EscapeKind::Swap;
      RealVector lam;
      const ComplexMatrix qp = lowest_vectors(a, p, &lam);
      const ComplexMatrix active = f.u;
      double best = 0.0;
      for (Eigen::Index t = 0; t < p; ++t) {
        const ComplexVector r = qp.col(t) - active * (active.adjoint() * qp.col(t));
        if (r.norm() > best + 1e-12) {
          best = r.norm();
          qhat = r / r.norm();
        }
      }
      if (best <= 1e-6) throw Error(ErrorKind::AlreadyMinimal, "point already matches the minimizer form");
      const double target = (qhat.adjoint() * a.matrix() * qhat)(0, 0).real();
      for (Eigen::Index j = 0; j < p; ++j)
        if (s2(j) > 1e-12 && (from < 0 || m(j) > m(from))) from = j;
      if (!(m(from) > target + 1e-12 * scale))
        throw Error(ErrorKind::AlreadyMinimal, "no eigenvector swap lowers the objective");
    }
  }

  double eps = epsilon;
  for (int attempt = 0; attempt < 40; ++attempt, eps *= 0.5) {
    ObliquePoint cand;
    double dist = 0.0;
    if (kind == EscapeKind::Blend) {
      const RealVector st = ((1.0 - eps) * s2.array() + eps).matrix();
      const PerturbResult pr = oblique_perturb(f, st);
      cand = pr.x;
      dist = pr.distance;
    } else if (kind == EscapeKind::Transfer) {
      if (s2(from) < eps) continue;
      RealVector st = s2;
      st(from) -= eps;
      st(to) += eps;
      const PerturbResult pr = oblique_perturb(f, st);
      cand = pr.x;
      dist = pr.distance;
    } else {
      ComplexMatrix u = f.u;
      u.col(from) = std::sqrt(1.0 - eps * eps) * f.u.col(from) + eps * qhat;
      const ComplexMatrix y = u * s2.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() * f.v.adjoint();
      cand = retract(y);
      dist = (cand.matrix() - x).norm();
    }
    const double f1 = value(cand.matrix());
    if (f1 < f0) return {cand, kind, eps, f0, f1, dist};
  }
  throw Error(ErrorKind::AlreadyMinimal, "no strict decrease found down to epsilon " + std::to_string(eps));
}

ComplexVector descent_direction_ql1m(const ComplexMatrix& x, const ComplexVector& x0) {
  if (x0.size() != x.rows()) throw Error(ErrorKind::DimensionMismatch, "x0 length must equal n");
  const ComplexMatrix q = orthonormal_basis(x);
  const ComplexVector s = q * (q.adjoint() * x0);
  const ComplexVector diff = s - x0;
  const double nrm = diff.norm();
  if (nrm <= 1e-10) throw Error(ErrorKind::SpanError, "x0 lies in span(X)");
  return diff / nrm;
}

Classification classify_point(Model model, const HermitianOperator& a, const ComplexMatrix& x, double param) {
  const Eigen::Index p = x.cols();
  if (x.rows() != a.dim()) throw Error(ErrorKind::DimensionMismatch, "X rows must equal dim(A)");
  const EigenDecomposition ed = eigh(a);
  const RealVector lam = ed.values.head(p);
  const ComplexMatrix qp = ed.vectors.leftCols(p);
  const double an = a.frobenius_norm();
  Classification out;
  out.subspace_distance = subspace_distance(x, qp);

  const double ortho = orthogonality_error(x) + membership_violation(x);
  // Invariant-subspace data of span(X).
  const ComplexMatrix w = orthonormal_basis(x);
  const bool full_rank = w.cols() == p;
  double invariance = std::numeric_limits<double>::infinity();
  double ritz_gap = std::numeric_limits<double>::infinity();
  ComplexMatrix b;
  if (full_rank) {
    b = w.adjoint() * a.matrix() * w;
    invariance = (a.matrix() * w - w * b).norm() / an;
    ritz_gap = (eigh(b).values - lam).cwiseAbs().maxCoeff() / an;
  }
  const double lowest_gap = std::max(invariance, ritz_gap);

  double form = std::numeric_limits<double>::infinity();
  switch (model) {
    case Model::QOMM:
    case Model::QL1M: form = std::max(ortho, lowest_gap); break;
    case Model::QTPM:
      if (full_rank) {
        ComplexMatrix target = ComplexMatrix::Identity(p, p) - (b - ComplexMatrix::Identity(p, p) * (b.trace() / double(p))) / param;
        form = std::max(lowest_gap, (x * x.adjoint() - w * target * w.adjoint()).norm());
      }
      break;
    case Model::WEIGHTED_QL1M: {
      double col = 0.0;
      for (Eigen::Index j = 0; j < p; ++j)
        col = std::max(col, (a.matrix() * x.col(j) - lam(j) * x.col(j)).norm() / an);
      form = std::max(ortho, col);
      break;
    }
  }
  out.form_error = form;

  // Stationarity.
  double stat = std::numeric_limits<double>::infinity();
  if (model == Model::QOMM) {
    stat = tangent_project(x, qomm_grad(a, x)).norm() / an;
  } else if (model == Model::QTPM) {
    stat = tangent_project(x, qtpm_grad(a, x, param)).norm() / (an + param);
  } else if (model == Model::QL1M) {
    stat = std::max(ortho, invariance);
  } else {
    double col = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const ComplexVector v = x.col(j);
      const cplx rq = v.dot(a.matrix() * v);
      col = std::max(col, (a.matrix() * v - rq * v).norm() / an);
    }
    stat = std::max(ortho, col);
  }
  out.stationarity = stat;

  if (form <= kClassifyTol)
    out.kind = PointClass::Minimizer;
  else if (stat <= kClassifyTol)
    out.kind = PointClass::Saddle;
  else
    out.kind = PointClass::NonStationary;
  return out;
}

}  // namespace qes
