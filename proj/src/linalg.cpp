#include "qes/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qes/error.hpp"

namespace qes {

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::InvalidInput, "operator must be a non-empty square matrix");
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "operator has non-finite entries");
  const double skew = (m - m.adjoint()).norm();
  if (skew > 1e-10 * std::max(1.0, m.norm()))
    throw Error(ErrorKind::InvalidInput, "operator is not Hermitian (skew norm " + std::to_string(skew) + ")");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::from_real_diagonal(const RealVector& d) {
  return HermitianOperator(d.cast<cplx>().asDiagonal().toDenseMatrix());
}

bool HermitianOperator::is_negative_definite() const { return eigh(*this).values.maxCoeff() < 0.0; }

double HermitianOperator::spectral_norm() const { return eigh(*this).values.cwiseAbs().maxCoeff(); }

double HermitianOperator::gershgorin_upper() const {
  double g = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    double r = m_(i, i).real();
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      if (j != i) r += std::abs(m_(i, j));
    g = std::max(g, r);
  }
  return g;
}

HermitianOperator HermitianOperator::shifted(double c) const {
  ComplexMatrix m = m_;
  m.diagonal().array() -= c;
  return HermitianOperator(m);
}

namespace {

// Cyclic complex Jacobi. Each rotation first removes the phase of a_pq, then
// applies the real symmetric Jacobi rotation.
EigenDecomposition jacobi_eigh(ComplexMatrix a) {
  const Eigen::Index n = a.rows();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-17 * scale) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx ph = std::conj(apq) / mag;  // e^{-i arg a_pq}
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G restricted to (p,q): [[c, s], [-s*ph, c*ph]].
        const cplx g00 = c, g01 = s, g10 = -s * ph, g11 = c * ph;
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g00 + akq * g10;
          a(k, q) = akp * g01 + akq * g11;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
          a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g00 + vkq * g10;
          v(k, q) = vkp * g01 + vkq * g11;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

// One-sided Jacobi on the columns of x (n >= p assumed). Returns W = X V with
// mutually orthogonal columns together with V.
void one_sided_jacobi(ComplexMatrix& w, ComplexMatrix& v) {
  const Eigen::Index p = w.cols();
  v = ComplexMatrix::Identity(p, p);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i < p - 1; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) {
        const double alpha = w.col(i).squaredNorm();
        const double beta = w.col(j).squaredNorm();
        const cplx gamma = w.col(i).dot(w.col(j));  // a_i^* a_j
        const double mag = std::abs(gamma);
        if (mag <= 1e-15 * std::sqrt(alpha * beta) || mag <= 1e-300) continue;
        rotated = true;
        const cplx ph = std::conj(gamma) / mag;
        const double zeta = (beta - alpha) / (2.0 * mag);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx g00 = c, g01 = s, g10 = -s * ph, g11 = c * ph;
        for (Eigen::Index k = 0; k < w.rows(); ++k) {
          const cplx wi = w(k, i), wj = w(k, j);
          w(k, i) = wi * g00 + wj * g10;
          w(k, j) = wi * g01 + wj * g11;
        }
        for (Eigen::Index k = 0; k < p; ++k) {
          const cplx vi = v(k, i), vj = v(k, j);
          v(k, i) = vi * g00 + vj * g10;
          v(k, j) = vi * g01 + vj * g11;
        }
      }
    }
    if (!rotated) break;
  }
}

struct FullSvd {
  ComplexMatrix u;
  RealVector sigma;
  ComplexMatrix v;
};

FullSvd full_svd(const ComplexMatrix& x) {
  if (!all_finite(x)) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
  const bool transpose = x.rows() < x.cols();
  ComplexMatrix w = transpose ? ComplexMatrix(x.adjoint()) : x;
  ComplexMatrix v;
  one_sided_jacobi(w, v);
  const Eigen::Index k = w.cols();
  RealVector norms(k);
  for (Eigen::Index j = 0; j < k; ++j) norms(j) = w.col(j).norm();
  std::vector<Eigen::Index> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return norms(a) > norms(b); });
  FullSvd out;
  out.sigma.resize(k);
  out.u.resize(w.rows(), k);
  out.v.resize(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = order[j];
    out.sigma(j) = norms(src);
    out.u.col(j) = norms(src) > 0 ? ComplexVector(w.col(src) / norms(src)) : ComplexVector::Zero(w.rows());
    out.v.col(j) = v.col(src);
  }
  if (transpose) std::swap(out.u, out.v);
  return out;
}

}  // namespace

EigenDecomposition eigh(const HermitianOperator& a) { return jacobi_eigh(a.matrix()); }

EigenDecomposition eigh(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "eigh needs a square matrix");
  if (!all_finite(a)) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
  ComplexMatrix h = a;
  h.triangularView<Eigen::StrictlyUpper>() = h.adjoint().triangularView<Eigen::StrictlyUpper>();
  h.diagonal() = h.diagonal().real().cast<cplx>();
  return jacobi_eigh(h);
}

SvdResult svd(const ComplexMatrix& x) {
  FullSvd f = full_svd(x);
  Eigen::Index r = 0;
  const double cut = f.sigma.size() > 0 ? 1e-12 * f.sigma(0) : 0.0;
  while (r < f.sigma.size() && f.sigma(r) > cut && f.sigma(r) > 0) ++r;
  return {f.u.leftCols(r), f.sigma.head(r), f.v.leftCols(r)};
}

RealVector singular_values(const ComplexMatrix& x) { return full_svd(x).sigma; }

GeneralizedEigen generalized_eigh(const ComplexMatrix& b, const ComplexMatrix& c) {
  if (b.rows() != b.cols() || c.rows() != c.cols() || b.rows() != c.rows())
    throw Error(ErrorKind::DimensionMismatch, "generalized_eigh needs square B, C of equal size");
  const HermitianOperator hb(b);
  const HermitianOperator hc(c);
  const RealVector cv = eigh(hc).values;
  const double lmax = cv.maxCoeff();
  const double lmin = cv.minCoeff();
  if (!(lmax > 0.0) || lmin < kMetricConditionFloor * lmax)
    throw Error(ErrorKind::IllConditionedMetric,
                "metric eigenvalue ratio " + std::to_string(lmin / lmax) + " below threshold");
  Eigen::LLT<ComplexMatrix> llt(hc.matrix());
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::IllConditionedMetric, "metric is not positive definite");
  const ComplexMatrix l = llt.matrixL();
  // M = L^{-1} B L^{-*}
  ComplexMatrix tmp = l.triangularView<Eigen::Lower>().solve(hb.matrix());
  ComplexMatrix m = l.triangularView<Eigen::Lower>().solve(ComplexMatrix(tmp.adjoint()));
  const EigenDecomposition ed = eigh(ComplexMatrix(0.5 * (m + m.adjoint())));
  GeneralizedEigen out;
  out.values = ed.values;
  out.r = l.adjoint().triangularView<Eigen::Upper>().solve(ed.vectors);
  return out;
}

bool is_strictly_majorized_by_ones(const RealVector& s) {
  const Eigen::Index m = s.size();
  if (m == 0) return false;
  if (std::abs(s.sum() - static_cast<double>(m)) > 1e-10) return false;
  if ((s.array() - 1.0).abs().maxCoeff() <= 1e-12) return false;
  std::vector<double> v(s.data(), s.data() + m);
  std::sort(v.begin(), v.end());
  double partial = 0.0;
  for (Eigen::Index k = 1; k < m; ++k) {
    partial += v[k - 1];
    if (!(partial < static_cast<double>(k) - 1e-12)) return false;
  }
  return true;
}

ComplexMatrix unit_diagonal_rotation(const ComplexMatrix& h_in) {
  const Eigen::Index p = h_in.rows();
  ComplexMatrix h = h_in;
  ComplexMatrix g = ComplexMatrix::Identity(p, p);
  std::vector<bool> done(p, false);
  constexpr double tol = 1e-14;
  for (Eigen::Index step = 0; step < p; ++step) {
    Eigen::Index i = -1, j = -1;
    double worst_hi = tol, worst_lo = tol;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (done[k]) continue;
      const double d = h(k, k).real() - 1.0;
      if (d > worst_hi) { worst_hi = d; i = k; }
      if (-d > worst_lo) { worst_lo = -d; j = k; }
    }
    if (i < 0 || j < 0) break;
    const double a = h(i, i).real();
    const double b = h(j, j).real();
    const cplx hij = h(i, j);
    // With e = hij/|hij| the new (i,i) entry is
    // m + half cos(2t) + |hij| sin(2t); solve for the smallest |t| pinning
    // either row to one.
    const cplx e = std::abs(hij) > 0 ? hij / std::abs(hij) : cplx(1.0);
    const double m = 0.5 * (a + b), half = 0.5 * (a - b);
    const double rho = std::hypot(half, std::abs(hij));
    const double phi = std::atan2(std::abs(hij), half);
    double theta = 0.0, best = INFINITY;
    bool pin_i = true;
    for (const bool pi_row : {true, false}) {
      const double target = pi_row ? 1.0 : a + b - 1.0;
      const double ac = std::acos(std::clamp((target - m) / rho, -1.0, 1.0));
      for (const double two_t : {phi + ac, phi - ac}) {
        const double t = std::remainder(two_t, 2.0 * M_PI) / 2.0;
        if (std::abs(t) < best) {
          best = std::abs(t);
          theta = t;
          pin_i = pi_row;
        }
      }
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // Rows i, j of the embedded rotation: [c, s e], [-s conj(e), c].
    const cplx r00 = c, r01 = s * e, r10 = -s * std::conj(e), r11 = c;
    for (Eigen::Index k = 0; k < p; ++k) {
      const cplx hik = h(i, k), hjk = h(j, k);
      h(i, k) = r00 * hik + r01 * hjk;
      h(j, k) = r10 * hik + r11 * hjk;
      const cplx gik = g(i, k), gjk = g(j, k);
      g(i, k) = r00 * gik + r01 * gjk;
      g(j, k) = r10 * gik + r11 * gjk;
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      const cplx hki = h(k, i), hkj = h(k, j);
      h(k, i) = hki * std::conj(r00) + hkj * std::conj(r01);
      h(k, j) = hki * std::conj(r10) + hkj * std::conj(r11);
    }
    done[pin_i ? i : j] = true;
  }
  return g;
}

std::optional<ComplexMatrix> unit_diagonal_rotation_near_identity(const ComplexMatrix& h_in) {
  const Eigen::Index p = h_in.rows();
  const Eigen::Index pairs = p * (p - 1) / 2;
  ComplexMatrix g = ComplexMatrix::Identity(p, p);
  ComplexMatrix h = h_in;
  double dev = (h.diagonal().real().array() - 1.0).abs().maxCoeff();
  for (int it = 0; it < 50 && dev > 1e-13; ++it) {
    // Jacobian of diag(K h - h K) in the real and imaginary parts of K_ij, i < j.
    RealMatrix jac = RealMatrix::Zero(p, 2 * pairs);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j, col += 2) {
        const cplx hji = h(j, i);
        jac(i, col) = 2.0 * hji.real();
        jac(j, col) = -2.0 * hji.real();
        jac(i, col + 1) = -2.0 * hji.imag();
        jac(j, col + 1) = 2.0 * hji.imag();
      }
    }
    const RealVector r = RealVector::Ones(p) - h.diagonal().real();
    const RealVector step = jac.completeOrthogonalDecomposition().solve(r);
    ComplexMatrix k = ComplexMatrix::Zero(p, p);
    col = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j, col += 2) {
        k(i, j) = cplx(step(col), step(col + 1));
        k(j, i) = -std::conj(k(i, j));
      }
    }
    // Cayley transform keeps the update exactly unitary.
    const ComplexMatrix id = ComplexMatrix::Identity(p, p);
    const ComplexMatrix c = (id - 0.5 * k).partialPivLu().solve(id + 0.5 * k);
    const ComplexMatrix h_next = c * h * c.adjoint();
    const double dev_next = (h_next.diagonal().real().array() - 1.0).abs().maxCoeff();
    if (!(dev_next < 0.5 * dev)) return std::nullopt;
    g = c * g;
    h = h_next;
    dev = dev_next;
  }
  if (dev > 1e-12) return std::nullopt;
  return g;
}

ComplexMatrix schur_horn_unit_diag(const RealVector& s) {
  const Eigen::Index p = s.size();
  if (p == 0) throw Error(ErrorKind::InvalidInput, "empty profile");
  if (s.minCoeff() < -1e-12) throw Error(ErrorKind::MajorizationError, "profile has negative entries");
  if (std::abs(s.sum() - static_cast<double>(p)) > 1e-10)
    throw Error(ErrorKind::MajorizationError, "profile does not sum to its length");
  const bool ones = (s.array() - 1.0).abs().maxCoeff() <= 1e-12;
  if (!ones && !is_strictly_majorized_by_ones(s))
    throw Error(ErrorKind::MajorizationError, "profile is not strictly majorized by the ones vector");
  if (ones) return ComplexMatrix::Identity(p, p);
  return unit_diagonal_rotation(s.cast<cplx>().asDiagonal().toDenseMatrix());
}

RealVector random_normal_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RealVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

ComplexMatrix random_unitary(Eigen::Index n, Rng& rng) {
  const ComplexMatrix z = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

ComplexMatrix orthonormal_basis(const ComplexMatrix& x) { return svd(x).u; }

double subspace_distance(const ComplexMatrix& x, const ComplexMatrix& y) {
  const ComplexMatrix qx = orthonormal_basis(x);
  const ComplexMatrix qy = orthonormal_basis(y);
  if (qx.cols() != qy.cols()) return std::numeric_limits<double>::infinity();
  return (qx - qy * (qy.adjoint() * qx)).norm();
}

}  // namespace qes
