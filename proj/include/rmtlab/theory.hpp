#pragma once

#include <Eigen/Dense>

#include "rmtlab/hermitian_matrix.hpp"

namespace rmtlab {

// Closed forms for the spiked Wigner model. Conventions:
//   sigma^2 = entry variance, m4 = fourth moment of the entry law,
//   t = 4 (real symmetric) or 2 (complex Hermitian).
// All outlier formulas require |theta| > sigma.

// Outlier location theta + sigma^2 / theta.
double rho_theta(double theta, double sigma);

// Fluctuation scale theta^2 / (theta^2 - sigma^2).
double c_theta(double theta, double sigma);

// Gaussian variance in the rank-one fluctuation law:
//   (t/4) (m4 - 3 sigma^4) / theta^2 + (t/2) sigma^4 / (theta^2 - sigma^2).
double v_theta(double theta, double sigma, double m4, int t);

// Variance profile of the Gaussian matrix entering the frame limit:
// diagonal v_pp (equals v_theta), off-diagonal v_pl = sigma^4/(theta^2-sigma^2).
struct HVarianceProfile {
  double v_pp = 0.0;
  double v_pl = 0.0;
};
HVarianceProfile h_variance_profile(double theta, double sigma, double m4,
                                    int t);

// Scale of the Gaussian-ensemble limit for delocalized frames:
//   tau = theta^2 sigma^2 / (theta^2 - sigma^2) = sigma^2 + v_pl.
double guoe_tau(double theta, double sigma);

// Semicircle density on [-2 sigma, 2 sigma].
double semicircle_density(double x, double sigma);

// Limits of the resolvent statistics of the undeformed minor at rho_theta:
//   normalized trace 1/theta, trace of the square 1/(theta^2 - sigma^2),
//   mean squared diagonal 1/theta^2.
struct ResolventLimitValues {
  double stieltjes1 = 0.0;
  double stieltjes2 = 0.0;
  double diag2_limit = 0.0;
};
ResolventLimitValues resolvent_limits(double theta, double sigma);

// Everything above for one (theta, sigma, m4, t).
struct TheoryValues {
  double theta = 0.0, sigma = 0.0, m4 = 0.0;
  int t = 4;
  double rho = 0.0, c = 0.0, v = 0.0, tau_guoe = 0.0;
  double h_vpp = 0.0, h_vpl = 0.0;
  double stieltjes1 = 0.0, stieltjes2 = 0.0, diag2_limit = 0.0;
};
TheoryValues theory_values(double theta, double sigma, double m4, int t);

// Covariance of the centered sesquilinear forms
//   (1/sqrt(N)) (X(l)* A Y(l) - rho(l) Tr A),  l = 1..K,
// assembled from the entry cross-moments and the limiting trace data of A:
//   omega  = lim (1/N) sum_i a_ii^2
//   tr2n   = lim (1/N) Tr A^2
//   tr2tn  = lim (1/N) Tr A A^T
// B = B1 + B2 + B3 with
//   B1(l,l') = omega * (E[xbar_l y_l xbar_l' y_l'] - rho(l) rho(l'))
//   B2(l,l') = (tr2n  - omega) * E[xbar_l y_l'] E[xbar_l' y_l]
//   B3(l,l') = (tr2tn - omega) * E[xbar_l xbar_l'] E[y_l y_l']
struct SesquilinearMoments {
  double omega = 0.0;
  double tr2n = 0.0;
  double tr2tn = 0.0;
  Eigen::VectorXd rho;    // rho(l) = E[xbar_l y_l]
  Eigen::MatrixXd xy;     // E[xbar_l y_l']
  Eigen::MatrixXd xx;     // E[xbar_l xbar_l']
  Eigen::MatrixXd yy;     // E[y_l y_l']
  Eigen::MatrixXd xyxy;   // E[xbar_l y_l xbar_l' y_l']
};

struct SesquilinearCovariance {
  double omega = 0.0, tr2n = 0.0, tr2tn = 0.0;
  Eigen::MatrixXd B1, B2, B3, B;
};

// Throws NumericError if the assembled B is not positive semidefinite
// within tolerance.
SesquilinearCovariance sesquilinear_covariance(const SesquilinearMoments& in);

}  // namespace rmtlab
