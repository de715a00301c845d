#include "qes/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>

namespace qes {

const char* to_string(Method m) {
  switch (m) {
    case Method::SIMPLEX: return "SIMPLEX";
    case Method::MODEL_TRUST_REGION: return "MODEL_TRUST_REGION";
    case Method::RIEMANNIAN_GD: return "RIEMANNIAN_GD";
  }
  return "?";
}

const char* to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::RadiusConverged: return "RadiusConverged";
    case TerminalStatus::GradientConverged: return "GradientConverged";
    case TerminalStatus::Stagnated: return "Stagnated";
    case TerminalStatus::MaxIters: return "MaxIters";
  }
  return "?";
}

void OptimizerOptions::validate() const {
  if (!(rho_end > 0.0 && rho_end < rho_begin)) throw Error(ErrorKind::InvalidInput, "need 0 < rho_end < rho_begin");
  if (max_iters < 1) throw Error(ErrorKind::InvalidInput, "max_iters must be at least 1");
  if (!(grad_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "grad_tol must be positive");
  if (max_backtracks < 1) throw Error(ErrorKind::InvalidInput, "max_backtracks must be at least 1");
}

namespace {

// Counts evaluations and remembers the best point seen.
class Evaluator {
 public:
  explicit Evaluator(const ScalarField& f) : f_(f) {}

  double operator()(const RealVector& x) {
    const double v = f_(x);
    ++count_;
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteObjective, "objective returned a non-finite value");
    if (count_ == 1 || v < best_value_) {
      best_value_ = v;
      best_x_ = x;
    }
    return v;
  }

  long count() const { return count_; }
  const RealVector& best_x() const { return best_x_; }
  double best_value() const { return best_value_; }

 private:
  const ScalarField& f_;
  long count_ = 0;
  RealVector best_x_;
  double best_value_ = 0.0;
};

// Adaptive Nelder-Mead (parameters scaled with the dimension).
void nelder_mead(Evaluator& eval, const RealVector& x0, const OptimizerOptions& opts, OptimizationTrace& trace,
                 const ScalarObserver& observer) {
  const Eigen::Index n = x0.size();
  const double nd = static_cast<double>(std::max<Eigen::Index>(n, 1));
  const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gamma = 0.75 - 1.0 / (2.0 * nd), delta = 1.0 - 1.0 / nd;
  std::vector<RealVector> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += opts.rho_begin;
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
  std::vector<Eigen::Index> order(n + 1);
  for (int it = 1;; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    const Eigen::Index best = order.front(), worst = order.back(), second = order[n > 0 ? n - 1 : 0];
    double diameter = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i) diameter = std::max(diameter, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
    if (diameter <= opts.rho_end) {
      trace.status = TerminalStatus::RadiusConverged;
      return;
    }
    if (it > opts.max_iters) {
      trace.status = TerminalStatus::MaxIters;
      return;
    }
    RealVector centroid = RealVector::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= nd;
    const RealVector xr = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < vals[best]) {
      const RealVector xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) { pts[worst] = xe; vals[worst] = fe; }
      else { pts[worst] = xr; vals[worst] = fr; }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else if (fr < vals[worst]) {
      const RealVector xc = centroid + gamma * (xr - centroid);
      const double fc = eval(xc);
      if (fc <= fr) { pts[worst] = xc; vals[worst] = fc; }
      else shrink = true;
    } else {
      const RealVector xc = centroid - gamma * (centroid - pts[worst]);
      const double fc = eval(xc);
      if (fc < vals[worst]) { pts[worst] = xc; vals[worst] = fc; }
      else shrink = true;
    }
    if (shrink) {
      for (Eigen::Index i = 0; i <= n; ++i) {
        if (i == best) continue;
        pts[i] = pts[best] + delta * (pts[i] - pts[best]);
        vals[i] = eval(pts[i]);
      }
    }
    ++trace.accepted_moves;
    IterationRecord rec;
    rec.iter = it;
    rec.objective = eval.best_value();
    rec.evaluations = eval.count();
    if (observer) observer(rec, eval.best_x());
    trace.records.push_back(rec);
  }
}

// min g.s + s'Bs/2 subject to ‖s‖ <= radius, via the eigendecomposition of B
// and bisection on the secular equation.
RealVector trust_region_step(const RealVector& g, const RealMatrix& b, double radius) {
  const Eigen::Index n = g.size();
  const EigenDecomposition ed = eigh(ComplexMatrix(b.cast<cplx>()));
  const RealMatrix q = ed.vectors.real();
  const RealVector lam = ed.values;
  const RealVector gt = q.transpose() * g;
  auto step = [&](double shift) {
    RealVector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = -gt(i) / (lam(i) + shift);
    return s;
  };
  const double lmin = lam.minCoeff();
  if (lmin > 0.0) {
    const RealVector s = step(0.0);
    if (s.norm() <= radius) return q * s;
  }
  double lo = std::max(0.0, -lmin);
  const double tiny = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  lo += tiny;
  if (step(lo).norm() <= radius) {
    // Hard case: fill the remaining length along the lowest eigenvector.
    RealVector s = step(lo);
    const double rem = radius * radius - s.squaredNorm();
    if (lmin < 0.0 && rem > 0.0) s(0) += std::sqrt(rem);
    return q * s;
  }
  double hi = lo + std::max(1.0, gt.norm() / radius);
  while (step(hi).norm() > radius) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-14 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (step(mid).norm() > radius) lo = mid;
    else hi = mid;
  }
  return q * step(hi);
}

// Quadratic-model trust region: central-difference gradient, model Hessian
// seeded from the difference diagonal and refined by damped BFGS.
// A stalled trust region is re-examined with a full finite-difference
// Hessian; a clearly negative eigenvalue yields a descent move along its
// eigenvector.
constexpr int kMaxCurvatureChecks = 20;
constexpr Eigen::Index kMaxCurvatureCheckDim = 200;

std::optional<RealVector> negative_curvature_move(Evaluator& eval, const RealVector& x, double fx, double step) {
  const Eigen::Index n = x.size();
  const double h = 1e-3;
  RealMatrix hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    RealVector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    hess(i, i) = (eval(xp) - 2.0 * fx + eval(xm)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      RealVector pp = x, pm = x, mp = x, mm = x;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      hess(i, j) = hess(j, i) = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * h * h);
    }
  }
  const EigenDecomposition e = eigh(ComplexMatrix(hess.cast<cplx>()));
  const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  if (!(e.values(0) < -1e-4 * scale)) return std::nullopt;
  const RealVector v = e.vectors.col(0).real().normalized();
  for (double t = step; t >= 1e-6; t *= 0.5) {
    for (const double sign : {1.0, -1.0}) {
      const RealVector xt = x + sign * t * v;
      if (eval(xt) < fx) return xt;
    }
  }
  return std::nullopt;
}

void model_trust_region(Evaluator& eval, const RealVector& x0, const OptimizerOptions& opts,
                        OptimizationTrace& trace, const ScalarObserver& observer) {
  const Eigen::Index n = x0.size();
  RealVector x = x0;
  double fx = eval(x);
  double radius = opts.rho_begin;
  const double radius_max = std::max(1.0, 1e3 * opts.rho_begin);
  RealMatrix b;
  RealVector g_prev, x_prev;
  bool have_prev = false;
  int curvature_checks = 0;
  for (int it = 1;; ++it) {
    if (radius <= opts.rho_end) {
      if (curvature_checks < kMaxCurvatureChecks && n <= kMaxCurvatureCheckDim && it <= opts.max_iters) {
        ++curvature_checks;
        const std::optional<RealVector> xn = negative_curvature_move(eval, x, fx, opts.rho_begin);
        if (xn) {
          x = *xn;
          fx = eval(x);
          radius = opts.rho_begin;
          b.resize(0, 0);
          have_prev = false;
          ++trace.accepted_moves;
          IterationRecord rec;
          rec.iter = it;
          rec.objective = fx;
          rec.evaluations = eval.count();
          if (observer) observer(rec, x);
          trace.records.push_back(rec);
          continue;
        }
      }
      trace.status = TerminalStatus::RadiusConverged;
      return;
    }
    if (it > opts.max_iters) {
      trace.status = TerminalStatus::MaxIters;
      return;
    }
    const double h = std::clamp(0.1 * radius, 1e-7, 1e-4);
    RealVector g(n), diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      RealVector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fp = eval(xp), fm = eval(xm);
      g(i) = (fp - fm) / (2.0 * h);
      diag(i) = (fp - 2.0 * fx + fm) / (h * h);
    }
    if (b.size() == 0) {
      b = diag.cwiseAbs().cwiseMax(1e-6).asDiagonal();
    } else if (have_prev) {
      const RealVector s = x - x_prev;
      const RealVector y = g - g_prev;
      const RealVector bs = b * s;
      const double sbs = s.dot(bs);
      const double sy = s.dot(y);
      if (sbs > 1e-300 && s.norm() > 0) {
        // Powell damping keeps the update positive definite.
        const double theta = sy >= 0.2 * sbs ? 1.0 : 0.8 * sbs / (sbs - sy);
        const RealVector r = theta * y + (1.0 - theta) * bs;
        const double sr = s.dot(r);
        if (sr > 1e-300) b += r * r.transpose() / sr - bs * bs.transpose() / sbs;
      }
    }
    have_prev = false;
    const RealVector s = trust_region_step(g, b, radius);
    const double snorm = s.norm();
    const double pred = -(g.dot(s) + 0.5 * s.dot(b * s));
    const RealVector xt = x + s;
    const double ft = eval(xt);
    const double rho = pred > 0.0 ? (fx - ft) / pred : (ft < fx ? 1.0 : -1.0);
    if (rho > 0.1 && ft < fx) {
      x_prev = x;
      g_prev = g;
      have_prev = true;
      x = xt;
      fx = ft;
      ++trace.accepted_moves;
      // Interior steps pull the radius down to the step length so that
      // converging Newton steps drive it to rho_end.
      if (rho > 0.75 && snorm >= 0.9 * radius) radius = std::min(2.0 * radius, radius_max);
      else if (snorm < 0.9 * radius) radius = std::min(radius, 2.0 * snorm);
    } else {
      radius = 0.25 * std::min(radius, snorm);
      b = diag.cwiseAbs().cwiseMax(1e-6).asDiagonal();
    }
    IterationRecord rec;
    rec.iter = it;
    rec.objective = fx;
    rec.evaluations = eval.count();
    if (observer) observer(rec, x);
    trace.records.push_back(rec);
  }
}

}  // namespace

ScalarResult minimize_scalar_field(const ScalarField& f, const RealVector& x0, const OptimizerOptions& opts,
                                   const ScalarObserver& observer) {
  opts.validate();
  if (opts.method == Method::RIEMANNIAN_GD)
    throw Error(ErrorKind::InvalidInput, "RIEMANNIAN_GD needs an oblique problem");
  Evaluator eval(f);
  OptimizationTrace trace;
  try {
    if (opts.method == Method::SIMPLEX) nelder_mead(eval, x0, opts, trace, observer);
    else model_trust_region(eval, x0, opts, trace, observer);
  } catch (const Error& e) {
    trace.evaluations = eval.count();
    if (e.kind() == ErrorKind::NonFiniteObjective) throw OptimizationError(e.kind(), e.what(), trace);
    throw;
  }
  trace.evaluations = eval.count();
  return {eval.best_x(), eval.best_value(), trace};
}

namespace {

ComplexMatrix unpack_chart(const RealVector& v, Eigen::Index n, Eigen::Index p) {
  ComplexMatrix d(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) d(i, j) = cplx(v(2 * (j * n + i)), v(2 * (j * n + i) + 1));
  return d;
}

// One Barzilai-Borwein descent run with Armijo backtracking. Returns true
// once the Riemannian gradient norm is at most `tol`.
struct DescentPhase {
  std::function<double(const ComplexMatrix&)> value;
  std::function<ComplexMatrix(const ComplexMatrix&)> rgrad;
  std::function<ComplexMatrix(const ComplexMatrix&)> retract;
  double tol = 0.0;
};

TerminalStatus descend(ComplexMatrix& x, double& fx, const DescentPhase& ph, double an, const OptimizerOptions& opts, int& it,
             long& evals, OptimizationTrace& trace, const ObliqueObserver& observer) {
  auto value = [&](const ComplexMatrix& y) {
    ++evals;
    const double v = ph.value(y);
    if (!std::isfinite(v)) {
      trace.evaluations = evals;
      throw OptimizationError(ErrorKind::NonFiniteObjective, "non-finite objective", trace);
    }
    return v;
  };
  const double inv_an = 1.0 / std::max(an, 1e-300);
  fx = value(x);
  ComplexMatrix r = ph.rgrad(x);
  ComplexMatrix x_old, r_old;
  bool have_old = false;
  double step = inv_an;
  while (true) {
    const double rn = r.norm();
    if (rn <= ph.tol) return TerminalStatus::GradientConverged;
    if (it >= opts.max_iters) return TerminalStatus::MaxIters;
    if (have_old) {
      const ComplexMatrix s = x - x_old;
      const ComplexMatrix y = r - r_old;
      const double sy = std::abs(s.cwiseProduct(y.conjugate()).sum().real());
      const double yy = y.squaredNorm();
      if (sy > 0 && yy > 0) step = std::clamp(sy / yy, 1e-12 * inv_an, 1e12 * inv_an);
    }
    double alpha = step;
    ComplexMatrix xn;
    double fn = 0.0;
    for (int bt = 0;; ++bt) {
      if (bt >= opts.max_backtracks) {
        // A full step that could only gain a few hundred ulps of the
        // objective means the iteration has hit the rounding floor.
        if (step * rn * rn <= 1e3 * std::numeric_limits<double>::epsilon() * std::max(std::abs(fx), an))
          return TerminalStatus::Stagnated;
        trace.evaluations = evals;
        throw OptimizationError(ErrorKind::LineSearchFailure,
                                "no sufficient decrease after " + std::to_string(bt) + " backtracks", trace);
      }
      xn = ph.retract(x - alpha * r);
      fn = value(xn);
      if (fn <= fx - 1e-4 * alpha * rn * rn) break;
      alpha *= 0.5;
    }
    x_old = x;
    r_old = r;
    have_old = true;
    x = xn;
    fx = fn;
    r = ph.rgrad(x);
    ++it;
    ++trace.accepted_moves;
    IterationRecord rec;
    rec.iter = it;
    rec.objective = fx;
    rec.orthogonality_error = orthogonality_error(x);
    rec.evaluations = evals;
    if (observer) observer(rec, x);
    trace.records.push_back(rec);
  }
}

// X (X*X)^{-1/2}; empty when X is numerically rank deficient.
std::optional<ComplexMatrix> lowdin(const ComplexMatrix& x) {
  const EigenDecomposition e = eigh(ComplexMatrix(x.adjoint() * x));
  if (!(e.values(0) > 1e-8 * e.values(e.values.size() - 1))) return std::nullopt;
  const RealVector inv_sqrt = e.values.cwiseSqrt().cwiseInverse();
  return ComplexMatrix(x * e.vectors * inv_sqrt.cast<cplx>().asDiagonal() * e.vectors.adjoint());
}

ObliqueResult riemannian_gd(const ModelConfig& cfg, const HermitianOperator& a, const ObliquePoint& x0,
                            const OptimizerOptions& opts, const ObliqueObserver& observer) {
  const double an = a.frobenius_norm();
  const double tol = opts.grad_tol * an;
  const bool smoothed = cfg.model == Model::QL1M || cfg.model == Model::WEIGHTED_QL1M;
  const auto retract_ob = [](const ComplexMatrix& y) { return retract(y).matrix(); };
  OptimizationTrace trace;
  ComplexMatrix x = x0.matrix();
  long evals = 0;
  int it = 0;
  double fx = 0.0;

  if (!smoothed) {
    DescentPhase ph{[&](const ComplexMatrix& y) { return model_value(cfg, a, y); },
                    [&](const ComplexMatrix& y) { return tangent_project(y, model_grad(cfg, a, y, 0.0)); },
                    retract_ob, tol};
    trace.status = descend(x, fx, ph, an, opts, it, evals, trace, observer);
    trace.evaluations = evals;
    return {ObliquePoint(x, 1e-10), model_value(cfg, a, x), trace};
  }

  // qL1M: delta-continuation on the smoothed objective. Each stage is solved
  // loosely, then the point is orthonormalized; if that lowers the exact
  // objective, the remaining work is smooth descent of tr(X*AXW) over
  // orthonormal X, where the off-diagonal penalty vanishes identically.
  std::vector<double> deltas;
  for (double d = std::max(opts.smoothing_start, cfg.smoothing_delta); d > cfg.smoothing_delta * (1 + 1e-12); d /= 10.0)
    deltas.push_back(d);
  deltas.push_back(cfg.smoothing_delta);
  const Eigen::Index p = x.cols();
  const RealVector w = cfg.model == Model::WEIGHTED_QL1M ? cfg.weights : RealVector::Ones(p);
  const ComplexMatrix wd = w.cast<cplx>().asDiagonal();
  const DescentPhase polish{
      [&](const ComplexMatrix& y) { return model_value(cfg, a, y); },
      [&](const ComplexMatrix& y) {
        const ComplexMatrix g = 2.0 * a.matrix() * y * wd;
        const ComplexMatrix yg = y.adjoint() * g;
        return ComplexMatrix(g - 0.5 * y * (yg + yg.adjoint()));
      },
      [&](const ComplexMatrix& y) {
        const std::optional<ComplexMatrix> q = lowdin(y);
        if (!q) throw Error(ErrorKind::DegenerateColumn, "orthonormalization failed");
        return *q;
      },
      tol};
  trace.status = TerminalStatus::MaxIters;
  for (std::size_t stage = 0; stage < deltas.size(); ++stage) {
    const double delta = deltas[stage];
    const bool last = stage + 1 == deltas.size();
    DescentPhase ph{[&](const ComplexMatrix& y) { return model_smoothed_value(cfg, a, y, delta); },
                    [&](const ComplexMatrix& y) { return tangent_project(y, model_grad(cfg, a, y, delta)); },
                    retract_ob, last ? tol : std::max(tol, delta * an)};
    const TerminalStatus st = descend(x, fx, ph, an, opts, it, evals, trace, observer);
    if (last) trace.status = st;
    if (it >= opts.max_iters) break;
    const std::optional<ComplexMatrix> q = lowdin(x);
    if (q && model_value(cfg, a, *q) <= model_value(cfg, a, x)) {
      x = *q;
      trace.status = descend(x, fx, polish, an, opts, it, evals, trace, observer);
      break;
    }
    if (last) break;
  }
  trace.evaluations = evals;
  return {ObliquePoint(x, 1e-10), model_value(cfg, a, x), trace};
}

}  // namespace

ObliqueResult minimize_oblique(const ModelConfig& cfg, const HermitianOperator& a, const ObliquePoint& x0,
                               const OptimizerOptions& opts, const ObliqueObserver& observer) {
  opts.validate();
  cfg.validate(x0.cols());
  if (x0.rows() != a.dim()) throw Error(ErrorKind::DimensionMismatch, "X0 rows must equal dim(A)");
  if (opts.method == Method::RIEMANNIAN_GD) return riemannian_gd(cfg, a, x0, opts, observer);

  const Eigen::Index n = x0.rows(), p = x0.cols();
  const ComplexMatrix base = x0.matrix();
  auto point = [&](const RealVector& v) { return retract(base + unpack_chart(v, n, p)).matrix(); };
  const ScalarField f = [&](const RealVector& v) { return model_value(cfg, a, point(v)); };
  ScalarObserver obs = [&](IterationRecord& rec, const RealVector& v) {
    const ComplexMatrix x = point(v);
    rec.orthogonality_error = orthogonality_error(x);
    if (observer) observer(rec, x);
  };
  ScalarResult r = minimize_scalar_field(f, RealVector::Zero(2 * n * p), opts, obs);
  const ComplexMatrix x = point(r.x);
  return {ObliquePoint(x, 1e-10), r.value, r.trace};
}

double eigenvalue_relative_error(const RealVector& values, const RealVector& reference) {
  if (values.size() != reference.size()) throw Error(ErrorKind::DimensionMismatch, "eigenvalue count mismatch");
  return (values - reference).norm() / reference.norm();
}

namespace {

// Objective in the form the minimum-value formulas use: qTPM on unit columns
// drops its constant mu p / 4.
double comparable_objective(const ModelConfig& cfg, double value, Eigen::Index p) {
  return cfg.model == Model::QTPM ? value - 0.25 * cfg.mu * static_cast<double>(p) : value;
}

double relative_gap(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

SolveResult solve_matrix(const SolveProblem& prob, const OptimizerOptions& opts, std::uint64_t seed) {
  const HermitianOperator& a0 = *prob.matrix;
  const Eigen::Index p = prob.p;
  if (p < 1 || p > a0.dim()) throw Error(ErrorKind::InvalidInput, "p must lie in [1, n]");
  SolveResult res;
  HermitianOperator a = a0;
  if (prob.cfg.model == Model::QOMM) {
    const ShiftedOperator s = negative_definite_shift(a0);
    a = s.op;
    res.shift = s.shift;
  }
  const RealVector lowest = eigh(a0).values.head(p);
  res.reference = lowest;
  res.reference_objective = minimum_value(prob.cfg, (lowest.array() - res.shift).matrix());
  auto observer = [&](IterationRecord& rec, const ComplexMatrix& x) {
    rec.relative_objective_error = relative_gap(comparable_objective(prob.cfg, rec.objective, p), res.reference_objective);
    try {
      const GeneralizedEigen ge = generalized_eigh(x.adjoint() * a0.matrix() * x, x.adjoint() * x);
      rec.eigenvalue_rel_error = eigenvalue_relative_error(ge.values, lowest);
    } catch (const Error&) {
      rec.eigenvalue_rel_error = kNotRecorded;
    }
  };
  const ObliquePoint x0 = random_oblique(a0.dim(), p, seed);
  ObliqueResult r = minimize_oblique(prob.cfg, a, x0, opts, observer);
  const ComplexMatrix& x = r.x.matrix();
  const GeneralizedEigen ge = generalized_eigh(x.adjoint() * a0.matrix() * x, x.adjoint() * x);
  res.eigenvalues = ge.values;
  res.vectors = x * ge.r;
  res.x = x;
  res.trace = std::move(r.trace);
  res.objective = r.value;
  res.eig_rel_err = eigenvalue_relative_error(res.eigenvalues, lowest);
  res.objective_rel_err = relative_gap(comparable_objective(prob.cfg, r.value, p), res.reference_objective);
  res.ortho_err = orthogonality_error(x);
  return res;
}

SolveResult solve_statevector(const SolveProblem& prob, const OptimizerOptions& opts, std::uint64_t seed,
                              bool zero_start) {
  const PauliHamiltonian& h0 = *prob.hamiltonian;
  h0.validate();
  const auto p = static_cast<Eigen::Index>(prob.initial_states.size());
  if (p < 1) throw Error(ErrorKind::InvalidInput, "need at least one initial state");
  SolveResult res;
  PauliHamiltonian h = h0;
  if (prob.cfg.model == Model::QOMM) {
    const ShiftedOperator s = negative_definite_shift(hamiltonian_matrix(h0));
    if (s.shift != 0.0) h = h0.shifted(s.shift);
    res.shift = s.shift;
  }
  const std::vector<std::uint64_t> basis = reachable_basis(h0, prob.circuits, prob.initial_states);
  if (static_cast<Eigen::Index>(basis.size()) < p)
    throw Error(ErrorKind::InvalidInput, "reachable subspace is smaller than p");
  const RealVector lowest = restricted_spectrum(h0, basis).head(p);
  res.reference = lowest;
  res.reference_objective = minimum_value(prob.cfg, (lowest.array() - res.shift).matrix());

  const int np = total_params(prob.circuits, prob.initial_states.size());
  RealVector theta0 = RealVector::Zero(np);
  if (!zero_start) {
    Rng rng(seed);
    theta0 = prob.start_spread * random_normal_vector(np, rng);
  }
  const ScalarField f = [&](const RealVector& t) {
    return vqe_objective(prob.cfg, h, prob.circuits, prob.initial_states, t);
  };
  ScalarObserver observer = [&](IterationRecord& rec, const RealVector& t) {
    const std::vector<QuantumState> states = prepare_states(prob.circuits, prob.initial_states, t);
    ComplexMatrix c(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) c(i, j) = overlap(states[i], states[j]);
    rec.orthogonality_error = (c - ComplexMatrix::Identity(p, p)).norm();
    rec.relative_objective_error = relative_gap(comparable_objective(prob.cfg, rec.objective, p), res.reference_objective);
    try {
      rec.eigenvalue_rel_error = eigenvalue_relative_error(rayleigh_ritz(states, h0).values, lowest);
    } catch (const Error&) {
      rec.eigenvalue_rel_error = kNotRecorded;
    }
  };
  ScalarResult r = minimize_scalar_field(f, theta0, opts, observer);
  const std::vector<QuantumState> states = prepare_states(prob.circuits, prob.initial_states, r.x);
  const RitzResult rr = rayleigh_ritz(states, h0);
  res.eigenvalues = rr.values;
  res.vectors = ritz_vectors(states, rr.r);
  res.params = r.x;
  res.x.resize(states[0].amplitudes.size(), p);
  for (Eigen::Index j = 0; j < p; ++j) res.x.col(j) = states[j].amplitudes;
  res.trace = std::move(r.trace);
  res.objective = r.value;
  res.eig_rel_err = eigenvalue_relative_error(res.eigenvalues, lowest);
  res.objective_rel_err = relative_gap(comparable_objective(prob.cfg, r.value, p), res.reference_objective);
  res.ortho_err = orthogonality_error(res.x);
  return res;
}

}  // namespace

SolveResult solve_eigenpairs(const SolveProblem& problem, const OptimizerOptions& opts) {
  opts.validate();
  if (problem.starts < 1) throw Error(ErrorKind::InvalidInput, "starts must be at least 1");
  if (problem.backend == Backend::MATRIX && !problem.matrix)
    throw Error(ErrorKind::InvalidInput, "matrix backend needs an operator");
  if (problem.backend == Backend::STATEVECTOR && !problem.hamiltonian)
    throw Error(ErrorKind::InvalidInput, "statevector backend needs a Hamiltonian");
  auto run = [&](int k) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(k);
    return problem.backend == Backend::MATRIX ? solve_matrix(problem, opts, seed)
                                              : solve_statevector(problem, opts, seed, k == 0);
  };
  std::vector<SolveResult> results(static_cast<std::size_t>(problem.starts));
  const int jobs = std::max(1, problem.jobs);
  for (int first = 0; first < problem.starts; first += jobs) {
    std::vector<std::future<SolveResult>> batch;
    for (int k = first; k < std::min(problem.starts, first + jobs); ++k)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run, k));
    for (int k = first; k < std::min(problem.starts, first + jobs); ++k) results[k] = batch[k - first].get();
  }
  int best = 0;
  for (int k = 1; k < problem.starts; ++k)
    if (results[k].objective < results[best].objective) best = k;
  SolveResult out = std::move(results[best]);
  out.kept_start = best;
  return out;
}

}  // namespace qes
