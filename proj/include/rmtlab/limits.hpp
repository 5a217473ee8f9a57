#pragma once

#include <Eigen/Dense>
#include <string>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/entry_law.hpp"
#include "rmtlab/hermitian_matrix.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

// Reading of the rank-one fluctuation law in the real field: whether the
// entry-law part of the limit carries the sqrt(2) diagonal scaling of the
// real Wigner convention (TheoremTwoOne) or the bare entry law (TheoremOne).
// Simulation matches the sqrt(2) reading, which is the default everywhere;
// both are implemented so the discrepancy stays visible. The complex field
// is unaffected (diagonal entries follow mu either way).
enum class RealDiagConvention { TheoremOne, TheoremTwoOne };

inline double mu_diag_scale(RealDiagConvention c, EnsembleField f) {
  if (f == EnsembleField::ComplexHermitian) return 1.0;
  return c == RealDiagConvention::TheoremTwoOne ? std::sqrt(2.0) : 1.0;
}

// Fluctuation limit law of the rescaled outlier eigenvalues of one spike.
struct LimitLaw {
  enum class Kind { ConvolutionMuGauss, GuoeEigenvalues, FrameVEigenvalues };
  Kind kind = Kind::ConvolutionMuGauss;

  // ConvolutionMuGauss: mu_scale * X + N(0, gauss_variance), X ~ law.
  EntryLaw law;
  double gauss_variance = 0.0;
  double mu_scale = 1.0;

  // GuoeEigenvalues: eigenvalues of the kdim x kdim Gaussian ensemble with
  // off-diagonal E|H_pl|^2 = tau (diagonal variance (t/2) tau).
  int kdim = 0;
  double tau = 0.0;
  EnsembleField field = EnsembleField::RealSymmetric;

  // FrameVEigenvalues: eigenvalues of U* (W_K + H_K) U.
  Eigen::MatrixXcd frame;  // K x k, orthonormal columns
  double theta = 0.0;      // spike; sigma comes from law

  std::string describe() const;
};

// X + G with X ~ law, G ~ N(0, v) independent.
double sample_convolution_law(const EntryLaw& law, double v, RngStream& rng);

// mu_scale * X + G; the sqrt(2) real-field diagonal reading uses scale
// sqrt(2).
double sample_convolution_scaled(const EntryLaw& law, double mu_scale,
                                 double v, RngStream& rng);

// Gaussian ensemble with off-diagonal E|H_pl|^2 = tau: real symmetric has
// N(0, 2 tau) diagonal and N(0, tau) off-diagonal; complex Hermitian has
// N(0, tau) real diagonal and independent N(0, tau/2) real and imaginary
// off-diagonal parts.
HermitianMatrix sample_guoe(int kdim, double tau, EnsembleField field,
                            RngStream& rng);

// Centered Gaussian self-adjoint matrix with diagonal variance v_pp and
// off-diagonal E|H_pl|^2 = v_pl.
HermitianMatrix sample_gaussian_profile(int K, double v_pp, double v_pl,
                                        EnsembleField field, RngStream& rng);

// Eigenvalues (descending) of U* (W + H) U for given draws; the sampling
// entry point below feeds it, tests can pass fixed matrices.
Eigen::VectorXd limit_v_eigenvalues(const Eigen::MatrixXcd& U,
                                    const HermitianMatrix& W,
                                    const HermitianMatrix& H);

// One draw of the frame limit: W_K a raw Wigner matrix of the entry law, H_K
// Gaussian with the (v_pp, v_pl) profile of the spike.
Eigen::VectorXd sample_limit_V_case_a(const Eigen::MatrixXcd& U,
                                      const EntryLaw& law, double theta,
                                      EnsembleField field, RngStream& rng);

// Draw from any LimitLaw; ConvolutionMuGauss yields one value, the matrix
// laws yield kdim (or frame columns) descending eigenvalues.
Eigen::VectorXd sample_limit_eigs(const LimitLaw& law, RngStream& rng);

// Closed-form entry variances E|V_pq|^2 of the frame limit V = U* (W + H) U.
// Each upper-triangle source entry is independent, so the variance is a
// quadratic form in the frame coefficients; the real field keeps the E[X^2]
// cross term, the complex field drops it (E[X^2] = 0 entrywise).
Eigen::MatrixXd limit_v_entry_variances(const Eigen::MatrixXcd& U,
                                        const EntryLaw& law, double theta,
                                        EnsembleField field);

// One finite-N draw of the k_j x k_j V statistic of the target spike:
//   V = U* [ W_head + (Y G(rho) Y* - (N-k) (sigma^2/theta) I) / sqrt(N) ] U
// restricted to the spike's coordinate block, G the resolvent of the
// deformed minor at rho_theta. pole = true flags a draw where rho fell
// inside the minor spectrum (to be discarded and logged by callers).
struct EmpiricalVDraw {
  bool pole = false;
  HermitianMatrix V;
};

EmpiricalVDraw empirical_V_finite_N(const SpikeSpec& spec, const EntryLaw& law,
                                    EnsembleField field, Eigen::Index N,
                                    int target_spike, RngStream& rng);

}  // namespace rmtlab
