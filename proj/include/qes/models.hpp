#pragma once

#include <string>

#include "qes/linalg.hpp"

namespace qes {

enum class Model { QOMM, QTPM, QL1M, WEIGHTED_QL1M };

const char* to_string(Model m);
Model parse_model(const std::string& s);  // "qomm" | "qtpm" | "ql1m" | "wql1m"

struct ModelConfig {
  Model model = Model::QOMM;
  double mu = 1.0;
  double mu1 = 1.0;
  RealVector weights;            // WEIGHTED_QL1M only
  double smoothing_delta = 1e-8;

  void validate(Eigen::Index p) const;
};

// Model values use the tr((2I - X*X) X*AX) style formulas directly; the
// gradients follow the convention d f(X)[D] = Re tr(G* D).
double qomm_value(const HermitianOperator& a, const ComplexMatrix& x);
ComplexMatrix qomm_grad(const HermitianOperator& a, const ComplexMatrix& x);

double qtpm_value(const HermitianOperator& a, const ComplexMatrix& x, double mu);
ComplexMatrix qtpm_grad(const HermitianOperator& a, const ComplexMatrix& x, double mu);
double qtpm_penalty_value(const HermitianOperator& a, const ComplexMatrix& x, double mu);

double ql1m_value(const HermitianOperator& a, const ComplexMatrix& x, double mu1);
// Off-diagonal |z| replaced by sqrt(|z|^2 + delta^2).
double ql1m_smoothed_value(const HermitianOperator& a, const ComplexMatrix& x, double mu1, double delta);
ComplexMatrix ql1m_subgrad(const HermitianOperator& a, const ComplexMatrix& x, double mu1, double delta);

double weighted_ql1m_value(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& w, double mu1);
double weighted_ql1m_smoothed_value(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& w,
                                    double mu1, double delta);
ComplexMatrix weighted_ql1m_subgrad(const HermitianOperator& a, const ComplexMatrix& x, const RealVector& w,
                                    double mu1, double delta);

// Shifted symmetric low-rank product form (mu/4) ‖XX* - (I - A/mu)‖_F^2.
double slrp_value(const HermitianOperator& a, const ComplexMatrix& x, double mu);

// Dispatch on the config. The smoothed variants coincide with the exact ones
// for qOMM and qTPM.
double model_value(const ModelConfig& cfg, const HermitianOperator& a, const ComplexMatrix& x);
double model_smoothed_value(const ModelConfig& cfg, const HermitianOperator& a, const ComplexMatrix& x, double delta);
ComplexMatrix model_grad(const ModelConfig& cfg, const HermitianOperator& a, const ComplexMatrix& x, double delta);

// Value shared by every local minimizer, from the p lowest eigenvalues. The
// qTPM entry is the penalty form tr(L)/2 + tr(Lbar^2 - L^2)/(4 mu); add
// mu p / 4 for qtpm_value on OB(n,p).
double minimum_value(const ModelConfig& cfg, const RealVector& lowest);
// ‖X*X - I‖_F at a qTPM minimizer: ‖L - Lbar‖_F / mu.
double qtpm_orthogonality_plateau(const RealVector& lowest, double mu);
// Squared singular values diag(I - (L - Lbar)/mu) of a qTPM minimizer.
RealVector qtpm_minimizer_profile(const RealVector& lowest, double mu);

// Imaginary part check shared by the trace-valued objectives.
double checked_real(cplx z, const char* what);

struct ShiftedOperator {
  HermitianOperator op;  // A - shift * I
  double shift = 0.0;
};

// Returns A unchanged when already negative definite, else A - (g + 1) I with
// g the Gershgorin upper bound.
ShiftedOperator negative_definite_shift(const HermitianOperator& a);

}  // namespace qes
