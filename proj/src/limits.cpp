#include "rmtlab/limits.hpp"

#include <cmath>
#include <cstdio>

#include "rmtlab/errors.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/theory.hpp"

namespace rmtlab {

std::string LimitLaw::describe() const {
  char buf[160];
  switch (kind) {
    case Kind::ConvolutionMuGauss:
      std::snprintf(buf, sizeof buf, "convolution(mu=%s, mu_scale=%.6g, v=%.6g)",
                    law.name.c_str(), mu_scale, gauss_variance);
      break;
    case Kind::GuoeEigenvalues:
      std::snprintf(buf, sizeof buf, "gaussian_ensemble(k=%d, tau=%.6g, %s)",
                    kdim, tau, field_name(field));
      break;
    case Kind::FrameVEigenvalues:
      std::snprintf(buf, sizeof buf,
                    "frame_v(K=%ld, k=%ld, theta=%.6g, mu=%s, %s)",
                    static_cast<long>(frame.rows()),
                    static_cast<long>(frame.cols()), theta, law.name.c_str(),
                    field_name(field));
      break;
  }
  return buf;
}

double sample_convolution_law(const EntryLaw& law, double v, RngStream& rng) {
  return sample_convolution_scaled(law, 1.0, v, rng);
}

double sample_convolution_scaled(const EntryLaw& law, double mu_scale,
                                 double v, RngStream& rng) {
  if (!(v >= 0.0)) throw ParameterError("gaussian variance must be >= 0");
  if (!(mu_scale > 0.0)) throw ParameterError("mu scale must be positive");
  return mu_scale * sample_entry(law, rng) + sample_gaussian(0.0, v, rng);
}

HermitianMatrix sample_guoe(int kdim, double tau, EnsembleField field,
                            RngStream& rng) {
  if (kdim < 1) throw ParameterError("ensemble dimension must be >= 1");
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  return sample_gaussian_profile(
      kdim, 0.5 * field_t(field) * tau, tau, field, rng);
}

HermitianMatrix sample_gaussian_profile(int K, double v_pp, double v_pl,
                                        EnsembleField field, RngStream& rng) {
  if (K < 1) throw ParameterError("profile dimension must be >= 1");
  if (!(v_pp >= 0.0) || !(v_pl >= 0.0)) {
    throw ParameterError("variance profile must be nonnegative");
  }
  const double sd_pp = std::sqrt(v_pp);
  if (field == EnsembleField::RealSymmetric) {
    const double sd_pl = std::sqrt(v_pl);
    Eigen::MatrixXd H(K, K);
    for (int j = 0; j < K; ++j) {
      for (int i = 0; i < j; ++i) {
        H(i, j) = sd_pl * rng.next_gaussian();
        H(j, i) = H(i, j);
      }
      H(j, j) = sd_pp * rng.next_gaussian();
    }
    return hermitian_unchecked(std::move(H));
  }
  const double sd_half = std::sqrt(0.5 * v_pl);
  Eigen::MatrixXcd H(K, K);
  for (int j = 0; j < K; ++j) {
    for (int i = 0; i < j; ++i) {
      const double re = sd_half * rng.next_gaussian();
      const double im = sd_half * rng.next_gaussian();
      H(i, j) = std::complex<double>(re, im);
      H(j, i) = std::conj(H(i, j));
    }
    H(j, j) = std::complex<double>(sd_pp * rng.next_gaussian(), 0.0);
  }
  return hermitian_unchecked(std::move(H));
}

Eigen::VectorXd limit_v_eigenvalues(const Eigen::MatrixXcd& U,
                                    const HermitianMatrix& W,
                                    const HermitianMatrix& H) {
  const Eigen::Index K = U.rows(), k = U.cols();
  if (W.dim() != K || H.dim() != K) {
    throw ParameterError("frame and matrix dimensions differ");
  }
  if ((U.adjoint() * U - Eigen::MatrixXcd::Identity(k, k))
          .cwiseAbs()
          .maxCoeff() > 1e-10) {
    throw ParameterError("frame columns must be orthonormal");
  }
  Eigen::MatrixXcd V =
      U.adjoint() * (W.to_complex() + H.to_complex()) * U;
  V = 0.5 * (V + V.adjoint().eval());
  return eigenvalues_sorted(HermitianMatrix::from_upper(std::move(V))).values;
}

Eigen::VectorXd sample_limit_V_case_a(const Eigen::MatrixXcd& U,
                                      const EntryLaw& law, double theta,
                                      EnsembleField field, RngStream& rng) {
  const int K = static_cast<int>(U.rows());
  const HVarianceProfile prof =
      h_variance_profile(theta, law.sigma, law.m4, field_t(field));
  const HermitianMatrix W = sample_wigner(K, field, law, rng);
  const HermitianMatrix H =
      sample_gaussian_profile(K, prof.v_pp, prof.v_pl, field, rng);
  return limit_v_eigenvalues(U, W, H);
}

Eigen::VectorXd sample_limit_eigs(const LimitLaw& law, RngStream& rng) {
  switch (law.kind) {
    case LimitLaw::Kind::ConvolutionMuGauss: {
      Eigen::VectorXd v(1);
      v[0] = sample_convolution_scaled(law.law, law.mu_scale,
                                       law.gauss_variance, rng);
      return v;
    }
    case LimitLaw::Kind::GuoeEigenvalues:
      return eigenvalues_sorted(
                 sample_guoe(law.kdim, law.tau, law.field, rng))
          .values;
    case LimitLaw::Kind::FrameVEigenvalues:
      return sample_limit_V_case_a(law.frame, law.law, law.theta, law.field,
                                   rng);
  }
  throw ParameterError("corrupt limit law kind");
}

Eigen::MatrixXd limit_v_entry_variances(const Eigen::MatrixXcd& U,
                                        const EntryLaw& law, double theta,
                                        EnsembleField field) {
  const Eigen::Index K = U.rows(), k = U.cols();
  if ((U.adjoint() * U - Eigen::MatrixXcd::Identity(k, k))
          .cwiseAbs()
          .maxCoeff() > 1e-10) {
    throw ParameterError("frame columns must be orthonormal");
  }
  const int t = field_t(field);
  const HVarianceProfile prof =
      h_variance_profile(theta, law.sigma, law.m4, t);
  const bool real = field == EnsembleField::RealSymmetric;
  // Source entry moments of W + H.
  const double diag_var = (real ? 2.0 : 1.0) * law.sigma2 + prof.v_pp;
  const double off_abs2 = law.sigma2 + prof.v_pl;  // E|X|^2
  const double off_sq = real ? off_abs2 : 0.0;     // E[X^2]

  Eigen::MatrixXd out(k, k);
  for (Eigen::Index p = 0; p < k; ++p) {
    for (Eigen::Index q = 0; q < k; ++q) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < K; ++i) {
        sum += diag_var * std::norm(std::conj(U(i, p)) * U(i, q));
      }
      for (Eigen::Index i = 0; i < K; ++i) {
        for (Eigen::Index l = i + 1; l < K; ++l) {
          const std::complex<double> a = std::conj(U(i, p)) * U(l, q);
          const std::complex<double> b = std::conj(U(l, p)) * U(i, q);
          sum += (std::norm(a) + std::norm(b)) * off_abs2 +
                 2.0 * (a * std::conj(b)).real() * off_sq;
        }
      }
      out(p, q) = sum;
    }
  }
  return out;
}

namespace {

// Per-field body of the finite-N V statistic. Scalar is double or
// std::complex<double>.
template <class Mat, class GetMat>
EmpiricalVDraw empirical_v_impl(const SpikeSpec& spec, const EntryLaw& law,
                                EnsembleField field, Eigen::Index N,
                                int target_spike, RngStream& rng,
                                const GetMat& get) {
  const double sigma = law.sigma;
  const Spike& target = spec.spikes[static_cast<std::size_t>(target_spike)];
  const double theta = target.theta;
  const double rho = rho_theta(theta, sigma);
  const int k = spec.frame_total(sigma);

  const HermitianMatrix Wfull = sample_wigner(N, field, law, rng);
  BlockSplit blocks = split_blocks(Wfull, k);
  const Eigen::Index n_minor = N - k;
  const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(N));

  // Deformed minor: subcritical spike blocks shifted into minor coordinates.
  Mat S = (-inv_root_n) * get(blocks.minor);
  S.diagonal().array() += typename Mat::Scalar(rho);  // S = rho I - M_minor
  if (spec.frame_dim_total() > k) {
    SpikeSpec tail;
    for (const Spike& s : spec.spikes) {
      if (!(s.theta > sigma)) tail.spikes.push_back(s);
    }
    const SpikeModel sub = build_spike_frame(tail, n_minor, field);
    S -= get(sub.deformation);
  }

  Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) {
    return EmpiricalVDraw{true, HermitianMatrix()};
  }

  const Mat& Y = std::get<Mat>(blocks.coupling);  // k x (N-k)
  const Mat Z = llt.solve(Mat(Y.adjoint()));
  Mat Q = Y * Z;  // Y G(rho) Y*
  Q = Mat(0.5 * (Q + Q.adjoint().eval()));

  Mat B = get(blocks.head) +
          inv_root_n *
              (Q - (static_cast<double>(n_minor) * sigma * sigma / theta) *
                       Mat::Identity(k, k));

  // Restrict to the target spike's coordinate block and conjugate by its
  // frame columns.
  int offset = 0;
  for (int j = 0; j < target_spike; ++j) {
    offset += spec.spikes[static_cast<std::size_t>(j)].frame_dim();
  }
  const int K = target.frame_dim();
  SpikeSpec one;
  one.spikes.push_back(target);
  const SpikeModel tm = build_spike_frame(one, K, field);
  const Eigen::MatrixXcd U = tm.frame.blocks.front().columns;

  Eigen::MatrixXcd Vc = U.adjoint() *
                        B.block(offset, offset, K, K).template cast<std::complex<double>>() *
                        U;
  Vc = 0.5 * (Vc + Vc.adjoint().eval());
  if (field == EnsembleField::RealSymmetric) {
    return EmpiricalVDraw{
        false, HermitianMatrix::from_upper(Eigen::MatrixXd(Vc.real()))};
  }
  return EmpiricalVDraw{false,
                        HermitianMatrix::from_upper(std::move(Vc))};
}

}  // namespace

EmpiricalVDraw empirical_V_finite_N(const SpikeSpec& spec, const EntryLaw& law,
                                    EnsembleField field, Eigen::Index N,
                                    int target_spike, RngStream& rng) {
  spec.validate();
  if (target_spike < 0 ||
      target_spike >= static_cast<int>(spec.spikes.size())) {
    throw ParameterError("target spike index out of range");
  }
  const Spike& target = spec.spikes[static_cast<std::size_t>(target_spike)];
  if (!(target.theta > law.sigma)) {
    throw ParameterError("target spike must satisfy theta > sigma");
  }
  if (spec.frame_dim_total() > N) {
    throw ParameterError("spike frames exceed matrix dimension");
  }
  if (field == EnsembleField::RealSymmetric) {
    return empirical_v_impl<Eigen::MatrixXd>(
        spec, law, field, N, target_spike, rng,
        [](const HermitianMatrix& h) -> const Eigen::MatrixXd& {
          return h.real();
        });
  }
  return empirical_v_impl<Eigen::MatrixXcd>(
      spec, law, field, N, target_spike, rng,
      [](const HermitianMatrix& h) -> const Eigen::MatrixXcd& {
        return h.complex();
      });
}

}  // namespace rmtlab
