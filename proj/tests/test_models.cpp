#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qes/error.hpp"
#include "qes/manifold.hpp"
#include "qes/models.hpp"
#include "test_support.hpp"

using namespace qes;
using qes::testing::random_hermitian;
using qes::testing::random_negative_definite;

namespace {

HermitianOperator diag321() {
  RealVector d(3);
  d << -3.0, -2.0, -1.0;
  return HermitianOperator::from_real_diagonal(d);
}

ComplexMatrix unit(Eigen::Index n, Eigen::Index k) {
  ComplexMatrix e = ComplexMatrix::Zero(n, 1);
  e(k, 0) = 1.0;
  return e;
}

double directional_fd(const std::function<double(const ComplexMatrix&)>& f, const ComplexMatrix& x,
                      const ComplexMatrix& d, double h) {
  return (f(x + h * d) - f(x - h * d)) / (2.0 * h);
}

double directional(const ComplexMatrix& g, const ComplexMatrix& d) {
  return g.cwiseProduct(d.conjugate()).sum().real();
}

}  // namespace

TEST(ModelConfig, Validation) {
  ModelConfig c;
  c.model = Model::QTPM;
  c.mu = 0.0;
  EXPECT_THROW(c.validate(2), Error);
  c.model = Model::WEIGHTED_QL1M;
  c.mu1 = 1.0;
  c.weights = RealVector::Ones(2);
  try {
    c.validate(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidWeights);
  }
  c.weights = RealVector(2);
  c.weights << 2.0, 1.0;
  EXPECT_NO_THROW(c.validate(2));
  EXPECT_EQ(parse_model("wql1m"), Model::WEIGHTED_QL1M);
  EXPECT_THROW(parse_model("omm"), Error);
}

TEST(Qomm, OrthonormalEigenvectorsGiveEigenvalueSum) {
  const HermitianOperator a = diag321();
  ComplexMatrix x(3, 2);
  x << unit(3, 0), unit(3, 2);
  EXPECT_DOUBLE_EQ(qomm_value(a, x), -4.0);
}

TEST(Qomm, SingleColumnIsRayleighQuotient) {
  Rng rng(1);
  const HermitianOperator a = random_hermitian(6, rng);
  const ComplexMatrix x = random_oblique(6, 1, rng).matrix();
  EXPECT_NEAR(qomm_value(a, x), (x.adjoint() * a.matrix() * x)(0, 0).real(), 1e-13);
}

TEST(Qomm, MinimizerIsStationary) {
  Rng rng(2);
  const HermitianOperator a = random_negative_definite(8, rng);
  const EigenDecomposition e = eigh(a);
  const ComplexMatrix x = e.vectors.leftCols(3) * random_unitary(3, rng).adjoint();
  EXPECT_LE(tangent_project(x, qomm_grad(a, x)).norm(), 1e-10 * a.frobenius_norm());
}

TEST(Qtpm, Examples) {
  RealVector d(1);
  d << -2.0;
  const HermitianOperator a = HermitianOperator::from_real_diagonal(d);
  EXPECT_DOUBLE_EQ(qtpm_value(a, ComplexMatrix::Identity(1, 1), 4.0), 0.0);

  // Ordered-spectrum minimizer of diag(-3,-2,-1), p = 2, mu = 4.
  const HermitianOperator b = diag321();
  ModelConfig cfg;
  cfg.model = Model::QTPM;
  cfg.mu = 4.0;
  RealVector lowest(2);
  lowest << -3.0, -2.0;
  EXPECT_NEAR(minimum_value(cfg, lowest), -2.53125, 1e-15);
  // S = I - (L - mean)/mu = diag(1.125, 0.875); a unit-diagonal rotation puts
  // it on OB(3,2).
  RealVector s = qtpm_minimizer_profile(lowest, 4.0);
  EXPECT_NEAR(s(0), 1.125, 1e-15);
  EXPECT_NEAR(s(1), 0.875, 1e-15);
  const ComplexMatrix v = schur_horn_unit_diag(s);
  const ComplexMatrix x = ComplexMatrix::Identity(3, 2) * s.cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint();
  const ObliquePoint xp(x, 1e-12);
  EXPECT_NEAR(qtpm_penalty_value(b, x, 4.0), -2.53125, 1e-12);
  EXPECT_NEAR(qtpm_value(b, x, 4.0), -0.53125, 1e-12);
  EXPECT_NEAR(orthogonality_error(xp), qtpm_orthogonality_plateau(lowest, 4.0), 1e-12);
  EXPECT_NEAR(qtpm_orthogonality_plateau(lowest, 4.0), std::sqrt(0.5) / 4.0, 1e-15);
}

TEST(Qtpm, PenaltyFormDiffersByConstantOnOblique) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const HermitianOperator a = random_hermitian(7, rng);
    const Eigen::Index p = 1 + trial % 4;
    const ComplexMatrix x = random_oblique(7, p, rng).matrix();
    const double mu = 0.5 + trial % 3;
    ASSERT_NEAR(qtpm_value(a, x, mu) - qtpm_penalty_value(a, x, mu), 0.25 * mu * static_cast<double>(p), 1e-10);
  }
}

TEST(Ql1m, Examples) {
  const HermitianOperator a = diag321();
  ComplexMatrix x(3, 2);
  x << unit(3, 0), (unit(3, 0) + unit(3, 1)) / std::sqrt(2.0);
  EXPECT_NEAR(ql1m_value(a, x, 96.0), -5.5 + 96.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ql1m_value(a, x, 96.0), 62.38225099390856, 1e-11);
  ComplexMatrix q(3, 2);
  q << unit(3, 1), unit(3, 2);
  EXPECT_DOUBLE_EQ(ql1m_value(a, q, 96.0), -3.0);
}

TEST(Ql1m, SubgradientAtZeroOffDiagonalIsTraceGradient) {
  const HermitianOperator a = diag321();
  const ComplexMatrix q = ComplexMatrix::Identity(3, 2);
  EXPECT_LE((ql1m_subgrad(a, q, 5.0, 0.0) - 2.0 * a.matrix() * q).norm(), 1e-15);
}

TEST(WeightedQl1m, Examples) {
  const HermitianOperator a = diag321();
  RealVector w(2);
  w << 2.0, 1.0;
  ComplexMatrix q(3, 2);
  q << unit(3, 0), unit(3, 1);
  EXPECT_DOUBLE_EQ(weighted_ql1m_value(a, q, w, 1.0), -8.0);
  ComplexMatrix swapped(3, 2);
  swapped << unit(3, 1), unit(3, 0);
  EXPECT_DOUBLE_EQ(weighted_ql1m_value(a, swapped, w, 1.0), -7.0);
  RealVector bad(2);
  bad << 1.0, 1.0;
  EXPECT_THROW(weighted_ql1m_value(a, q, bad, 1.0), Error);
}

TEST(WeightedQl1m, NearUnitWeightsApproachQl1m) {
  Rng rng(4);
  const HermitianOperator a = random_hermitian(6, rng);
  const ComplexMatrix x = random_oblique(6, 3, rng).matrix();
  RealVector w(3);
  const double eps = 1e-9;
  w << 1.0 + 2 * eps, 1.0 + eps, 1.0;
  EXPECT_NEAR(weighted_ql1m_value(a, x, w, 2.0), ql1m_value(a, x, 2.0), 1e-7);
}

TEST(Slrp, ZeroPointAndConstantGapProperty) {
  Rng rng(5);
  const HermitianOperator a = random_hermitian(6, rng);
  const double mu = 3.0;
  const ComplexMatrix shifted = ComplexMatrix::Identity(6, 6) - a.matrix() / mu;
  EXPECT_NEAR(slrp_value(a, ComplexMatrix::Zero(6, 2), mu), 0.25 * mu * shifted.squaredNorm(), 1e-12);
  double lo = INFINITY, hi = -INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix x = random_gaussian(6, 2, rng);
    const double gap = qtpm_penalty_value(a, x, mu) - slrp_value(a, x, mu);
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
  }
  const double scale = std::max(1.0, 0.25 * mu * shifted.squaredNorm());
  EXPECT_LE(hi - lo, 1e-9 * scale);
}

TEST(Models, PermutationInvarianceProperty) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const HermitianOperator a = random_hermitian(5, rng);
    const ComplexMatrix x = random_gaussian(5, 4, rng);
    std::vector<int> perm(4);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ComplexMatrix xp(5, 4);
    for (int j = 0; j < 4; ++j) xp.col(j) = x.col(perm[static_cast<std::size_t>(j)]);
    ASSERT_NEAR(qomm_value(a, xp), qomm_value(a, x), 1e-10 * std::max(1.0, std::abs(qomm_value(a, x))));
    ASSERT_NEAR(qtpm_value(a, xp, 2.0), qtpm_value(a, x, 2.0), 1e-10 * std::max(1.0, std::abs(qtpm_value(a, x, 2.0))));
    ASSERT_NEAR(ql1m_value(a, xp, 3.0), ql1m_value(a, x, 3.0), 1e-12 * std::max(1.0, std::abs(ql1m_value(a, x, 3.0))));
  }
}

TEST(Models, RightUnitaryInvarianceProperty) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const HermitianOperator a = random_hermitian(6, rng);
    const ComplexMatrix x = random_gaussian(6, 3, rng);
    const ComplexMatrix xv = x * random_unitary(3, rng);
    const double s = std::max(1.0, std::pow(x.norm(), 4) * a.frobenius_norm());
    ASSERT_NEAR(qomm_value(a, xv), qomm_value(a, x), 1e-10 * s);
    ASSERT_NEAR(qtpm_value(a, xv, 1.5), qtpm_value(a, x, 1.5), 1e-10 * s);
  }
}

TEST(Models, GradientCentralDifferenceProperty) {
  Rng rng(8);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 3 + trial % 6, p = 1 + trial % 3;
    const HermitianOperator a = random_hermitian(n, rng);
    const ComplexMatrix x = random_gaussian(n, p, rng);
    const ComplexMatrix d = random_gaussian(n, p, rng);
    const double mu = 1.7, mu1 = 2.3, delta = 1e-2;
    RealVector w(p);
    for (Eigen::Index j = 0; j < p; ++j) w(j) = static_cast<double>(p - j);

    auto check = [&](const char* name, const std::function<double(const ComplexMatrix&)>& f, const ComplexMatrix& g) {
      const double an = directional(g, d);
      const double fd = directional_fd(f, x, d, h);
      ASSERT_LE(std::abs(fd - an), 1e-5 * std::abs(an)) << name << " trial " << trial;
    };
    check("qomm", [&](const ComplexMatrix& y) { return qomm_value(a, y); }, qomm_grad(a, x));
    check("qtpm", [&](const ComplexMatrix& y) { return qtpm_value(a, y, mu); }, qtpm_grad(a, x, mu));
    check("ql1m", [&](const ComplexMatrix& y) { return ql1m_smoothed_value(a, y, mu1, delta); },
          ql1m_subgrad(a, x, mu1, delta));
    check("wql1m", [&](const ComplexMatrix& y) { return weighted_ql1m_smoothed_value(a, y, w, mu1, delta); },
          weighted_ql1m_subgrad(a, x, w, mu1, delta));
  }
}

TEST(MinimumValue, MatchesMinimizerValuesProperty) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const HermitianOperator a = random_negative_definite(10, rng);
    const Eigen::Index p = 1 + trial % 5;
    const EigenDecomposition e = eigh(a);
    const RealVector lowest = e.values.head(p);
    const ComplexMatrix v = random_unitary(p, rng);
    const ComplexMatrix x = e.vectors.leftCols(p) * v.adjoint();
    ModelConfig cfg;
    cfg.model = Model::QOMM;
    ASSERT_NEAR(qomm_value(a, x), minimum_value(cfg, lowest), 1e-10 * a.frobenius_norm());
    cfg.model = Model::QL1M;
    ASSERT_NEAR(ql1m_value(a, x, 5.0), lowest.sum(), 1e-10 * a.frobenius_norm());
    cfg.model = Model::QTPM;
    cfg.mu = 2.0 * a.spectral_norm();
    const RealVector s = qtpm_minimizer_profile(lowest, cfg.mu);
    const ComplexMatrix y = e.vectors.leftCols(p) * s.cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint();
    ASSERT_NEAR(qtpm_penalty_value(a, y, cfg.mu), minimum_value(cfg, lowest), 1e-10 * a.frobenius_norm());
  }
}

TEST(NegativeDefiniteShift, ShiftsOnlyWhenNeeded) {
  Rng rng(10);
  const HermitianOperator nd = random_negative_definite(5, rng);
  EXPECT_EQ(negative_definite_shift(nd).shift, 0.0);
  const HermitianOperator h = random_hermitian(5, rng);
  const ShiftedOperator s = negative_definite_shift(h);
  EXPECT_GT(s.shift, eigh(h).values.maxCoeff());
  EXPECT_TRUE(s.op.is_negative_definite());
  EXPECT_LE((eigh(s.op).values.array() + s.shift - eigh(h).values.array()).abs().maxCoeff(), 1e-10);
}

TEST(CheckedReal, RejectsLargeImaginaryPart) {
  EXPECT_DOUBLE_EQ(checked_real(cplx(2.0, 1e-12), "x"), 2.0);
  try {
    checked_real(cplx(1.0, 1e-3), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ImaginaryResidue);
  }
}
