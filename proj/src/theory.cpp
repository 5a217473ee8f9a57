#include "rmtlab/theory.hpp"

#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

void check_supercritical(double theta, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sigma must be positive and finite");
  }
  if (!std::isfinite(theta) || std::abs(theta) <= sigma) {
    throw ParameterError("outlier formulas require |theta| > sigma");
  }
}

void check_moments(double sigma, double m4, int t) {
  if (t != 2 && t != 4) {
    throw ParameterError("field parameter t must be 2 or 4");
  }
  if (!(m4 >= sigma * sigma * sigma * sigma)) {
    throw ParameterError("fourth moment below sigma^4 is not a moment");
  }
}

}  // namespace

// Defined for any theta != 0; at |theta| = sigma it lands exactly on the
// bulk edge +-2 sigma, strictly outside only when |theta| > sigma.
double rho_theta(double theta, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sigma must be positive and finite");
  }
  if (!std::isfinite(theta) || theta == 0.0) {
    throw ParameterError("rho_theta requires theta != 0");
  }
  return theta + sigma * sigma / theta;
}

double c_theta(double theta, double sigma) {
  check_supercritical(theta, sigma);
  const double t2 = theta * theta;
  return t2 / (t2 - sigma * sigma);
}

double v_theta(double theta, double sigma, double m4, int t) {
  check_supercritical(theta, sigma);
  check_moments(sigma, m4, t);
  const double t2 = theta * theta;
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  return (t / 4.0) * (m4 - 3.0 * s4) / t2 + (t / 2.0) * s4 / (t2 - s2);
}

HVarianceProfile h_variance_profile(double theta, double sigma, double m4,
                                    int t) {
  check_supercritical(theta, sigma);
  check_moments(sigma, m4, t);
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  HVarianceProfile p;
  p.v_pp = v_theta(theta, sigma, m4, t);
  p.v_pl = s4 / (theta * theta - s2);
  return p;
}

double guoe_tau(double theta, double sigma) {
  check_supercritical(theta, sigma);
  const double t2 = theta * theta;
  const double s2 = sigma * sigma;
  return t2 * s2 / (t2 - s2);
}

double semicircle_density(double x, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sigma must be positive and finite");
  }
  const double s2 = sigma * sigma;
  const double disc = 4.0 * s2 - x * x;
  if (disc <= 0.0) return 0.0;
  return std::sqrt(disc) / (2.0 * std::numbers::pi * s2);
}

ResolventLimitValues resolvent_limits(double theta, double sigma) {
  check_supercritical(theta, sigma);
  const double t2 = theta * theta;
  const double s2 = sigma * sigma;
  ResolventLimitValues r;
  r.stieltjes1 = 1.0 / theta;
  r.stieltjes2 = 1.0 / (t2 - s2);
  r.diag2_limit = 1.0 / t2;
  return r;
}

TheoryValues theory_values(double theta, double sigma, double m4, int t) {
  TheoryValues tv;
  tv.theta = theta;
  tv.sigma = sigma;
  tv.m4 = m4;
  tv.t = t;
  tv.rho = rho_theta(theta, sigma);
  tv.c = c_theta(theta, sigma);
  tv.v = v_theta(theta, sigma, m4, t);
  tv.tau_guoe = guoe_tau(theta, sigma);
  const HVarianceProfile p = h_variance_profile(theta, sigma, m4, t);
  tv.h_vpp = p.v_pp;
  tv.h_vpl = p.v_pl;
  const ResolventLimitValues r = resolvent_limits(theta, sigma);
  tv.stieltjes1 = r.stieltjes1;
  tv.stieltjes2 = r.stieltjes2;
  tv.diag2_limit = r.diag2_limit;
  return tv;
}

SesquilinearCovariance sesquilinear_covariance(const SesquilinearMoments& in) {
  const Eigen::Index K = in.rho.size();
  if (K < 1) throw ParameterError("sesquilinear moments are empty");
  auto square = [K](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != K || m.cols() != K) {
      throw ParameterError(std::string("moment matrix ") + name +
                           " has wrong shape");
    }
  };
  square(in.xy, "xy");
  square(in.xx, "xx");
  square(in.yy, "yy");
  square(in.xyxy, "xyxy");

  SesquilinearCovariance out;
  out.omega = in.omega;
  out.tr2n = in.tr2n;
  out.tr2tn = in.tr2tn;
  out.B1.resize(K, K);
  out.B2.resize(K, K);
  out.B3.resize(K, K);
  for (Eigen::Index l = 0; l < K; ++l) {
    for (Eigen::Index m = 0; m < K; ++m) {
      out.B1(l, m) = in.omega * (in.xyxy(l, m) - in.rho(l) * in.rho(m));
      out.B2(l, m) = (in.tr2n - in.omega) * in.xy(l, m) * in.xy(m, l);
      out.B3(l, m) = (in.tr2tn - in.omega) * in.xx(l, m) * in.yy(l, m);
    }
  }
  out.B = out.B1 + out.B2 + out.B3;

  // Covariances are symmetric and positive semidefinite; fail loudly if the
  // supplied moments are inconsistent.
  const double scale = std::max(1.0, out.B.cwiseAbs().maxCoeff());
  if ((out.B - out.B.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericError("sesquilinear covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (out.B + out.B.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw NumericError("sesquilinear covariance is not positive semidefinite");
  }
  return out;
}

}  // namespace rmtlab
