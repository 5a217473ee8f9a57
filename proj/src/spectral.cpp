#include "rmtlab/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmtlab/errors.hpp"
#include "rmtlab/theory.hpp"

namespace rmtlab {

namespace {

Eigen::VectorXd descending(const Eigen::VectorXd& ascending) {
  return ascending.reverse();
}

}  // namespace

SpectralSample eigenvalues_sorted(const HermitianMatrix& M) {
  // Eigen's tridiagonalization path measures faster than LAPACK divide and
  // conquer when only eigenvalues are needed.
  return M.visit([](const auto& m) {
    using Mat = std::decay_t<decltype(m)>;
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericError("eigenvalue computation failed to converge");
    }
    return SpectralSample{descending(es.eigenvalues())};
  });
}

EigenSystem eigensystem_sorted(const HermitianMatrix& M) {
  const Eigen::Index n = M.dim();
  EigenSystem out;
  Eigen::VectorXd w(n);
  if (M.is_real()) {
    Eigen::MatrixXd a = M.real();  // overwritten with eigenvectors
    const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L',
                                    static_cast<lapack_int>(n), a.data(),
                                    static_cast<lapack_int>(n), w.data());
    if (info != 0) throw NumericError("dsyevd failed");
    out.values = descending(w);
    Eigen::MatrixXd v(n, n);
    for (Eigen::Index j = 0; j < n; ++j) v.col(j) = a.col(n - 1 - j);
    out.vectors = std::move(v);
  } else {
    Eigen::MatrixXcd a = M.complex();
    const int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
        reinterpret_cast<lapack_complex_double*>(a.data()),
        static_cast<lapack_int>(n), w.data());
    if (info != 0) throw NumericError("zheevd failed");
    out.values = descending(w);
    Eigen::MatrixXcd v(n, n);
    for (Eigen::Index j = 0; j < n; ++j) v.col(j) = a.col(n - 1 - j);
    out.vectors = std::move(v);
  }
  return out;
}

FluctuationRecord rescale_fluctuations(const SpectralSample& sample,
                                       const SpikeSpec& spec, double sigma,
                                       int N, long replication) {
  spec.validate();
  if (N < 1) throw ParameterError("N must be positive");
  FluctuationRecord rec;
  rec.replication = replication;
  rec.N = N;
  const double root_n = std::sqrt(static_cast<double>(N));
  int rank = 0;  // eigenvalue rank owned by the next supercritical spike
  for (std::size_t j = 0; j < spec.spikes.size(); ++j) {
    const Spike& s = spec.spikes[j];
    if (!(s.theta > sigma)) break;  // ordered: the rest are subcritical
    if (rank + s.multiplicity > sample.values.size()) {
      throw ParameterError("sample has fewer eigenvalues than spike ranks");
    }
    SpikeFluctuation f;
    f.spike_index = static_cast<int>(j);
    f.theta = s.theta;
    const double rho = rho_theta(s.theta, sigma);
    const double c = c_theta(s.theta, sigma);
    f.lambda = sample.values.segment(rank, s.multiplicity);
    f.xi = c * root_n * (f.lambda.array() - rho).matrix();
    rec.spikes.push_back(std::move(f));
    rank += s.multiplicity;
  }
  return rec;
}

OutlierCount count_outliers(const SpectralSample& sample, double sigma,
                            double delta) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(delta >= 0.0)) throw ParameterError("delta must be >= 0");
  const double edge = 2.0 * sigma + delta;
  OutlierCount c;
  for (Eigen::Index i = 0; i < sample.values.size(); ++i) {
    if (sample.values[i] > edge) ++c.upper;
    if (sample.values[i] < -edge) ++c.lower;
  }
  return c;
}

double default_outlier_delta(const SpikeSpec& spec, double sigma) {
  double rho_min = std::numeric_limits<double>::infinity();
  for (const Spike& s : spec.spikes) {
    if (s.theta > sigma) rho_min = std::min(rho_min, rho_theta(s.theta, sigma));
  }
  if (!std::isfinite(rho_min)) {
    throw ParameterError("no supercritical spike: delta has no default");
  }
  return (rho_min - 2.0 * sigma) / 4.0;
}

ResolventTraces resolvent_traces(const HermitianMatrix& M, double rho) {
  const Eigen::Index n = M.dim();
  if (n < 1) throw ParameterError("empty matrix has no resolvent");
  const EigenSystem es = eigensystem_sorted(M);
  const double top = es.values[0];
  if (!(rho > top) || rho - top < 1e-10 * std::max(1.0, std::abs(rho))) {
    throw PoleError("resolvent point is inside or touching the spectrum");
  }
  const Eigen::ArrayXd w = 1.0 / (rho - es.values.array());
  ResolventTraces out;
  out.tr1 = w.sum() / static_cast<double>(n);
  out.tr2 = w.square().sum() / static_cast<double>(n);
  // G_ii = sum_m |V_im|^2 w_m.
  Eigen::VectorXd gdiag(n);
  if (std::holds_alternative<Eigen::MatrixXd>(es.vectors)) {
    const auto& v = std::get<Eigen::MatrixXd>(es.vectors);
    gdiag = v.array().square().matrix() * w.matrix();
  } else {
    const auto& v = std::get<Eigen::MatrixXcd>(es.vectors);
    gdiag = v.cwiseAbs2() * w.matrix();
  }
  out.diag2 = gdiag.squaredNorm() / static_cast<double>(n);
  return out;
}

}  // namespace rmtlab
