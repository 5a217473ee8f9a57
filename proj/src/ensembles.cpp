#include "rmtlab/ensembles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rmtlab {

namespace {

constexpr double kFrameTol = 1e-12;

// Orthonormal DCT-II frame on K points: column 0 is constant 1/sqrt(K),
// column p >= 1 is sqrt(2/K) cos(pi (2i+1) p / (2K)). Every entry is bounded
// by sqrt(2/K) <= 2/sqrt(K).
Eigen::MatrixXd dct_frame(int K) {
  Eigen::MatrixXd C(K, K);
  const double norm0 = 1.0 / std::sqrt(static_cast<double>(K));
  const double norm = std::sqrt(2.0 / static_cast<double>(K));
  for (int i = 0; i < K; ++i) C(i, 0) = norm0;
  for (int p = 1; p < K; ++p) {
    for (int i = 0; i < K; ++i) {
      C(i, p) = norm * std::cos(std::numbers::pi * (2 * i + 1) * p /
                                (2.0 * static_cast<double>(K)));
    }
  }
  return C;
}

bool is_real_matrix(const Eigen::MatrixXcd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j).imag() != 0.0) return false;
    }
  }
  return true;
}

// Complete K x k orthonormal columns to a K x K unitary whose leading k
// columns are exactly the input.
Eigen::MatrixXcd complete_frame(const Eigen::MatrixXcd& U) {
  const Eigen::Index K = U.rows(), k = U.cols();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(U);
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd full(K, K);
  full.leftCols(k) = U;
  full.rightCols(K - k) = Q.rightCols(K - k);
  if ((full.adjoint() * full - Eigen::MatrixXcd::Identity(K, K)).norm() >
      kFrameTol * std::sqrt(static_cast<double>(K))) {
    throw ParameterError("frame completion failed: columns not orthonormal");
  }
  return full;
}

}  // namespace

int Spike::frame_dim() const {
  switch (geometry) {
    case SpikeGeometry::Canonical:
      return multiplicity;
    case SpikeGeometry::SpreadUniform:
      return spread_dim;
    case SpikeGeometry::ExplicitFrame:
      return static_cast<int>(frame.rows());
  }
  return 0;
}

void SpikeSpec::validate() const {
  double prev = std::numeric_limits<double>::infinity();
  for (const Spike& s : spikes) {
    if (!std::isfinite(s.theta) || s.theta == 0.0) {
      throw ParameterError("spike theta must be finite and nonzero");
    }
    if (!(s.theta < prev)) {
      throw ParameterError("spike thetas must be strictly decreasing");
    }
    prev = s.theta;
    if (s.multiplicity < 1) {
      throw ParameterError("spike multiplicity must be >= 1");
    }
    switch (s.geometry) {
      case SpikeGeometry::Canonical:
        break;
      case SpikeGeometry::SpreadUniform:
        if (s.spread_dim < s.multiplicity) {
          throw ParameterError(
              "spread spike needs spread_dim >= multiplicity");
        }
        break;
      case SpikeGeometry::ExplicitFrame: {
        if (s.frame.rows() < s.frame.cols() ||
            s.frame.cols() != s.multiplicity) {
          throw ParameterError(
              "explicit frame must be K x k with K >= k = multiplicity");
        }
        const Eigen::Index k = s.frame.cols();
        if ((s.frame.adjoint() * s.frame -
             Eigen::MatrixXcd::Identity(k, k))
                .cwiseAbs()
                .maxCoeff() > kFrameTol) {
          throw ParameterError("explicit frame columns must be orthonormal");
        }
        break;
      }
    }
  }
}

int SpikeSpec::total_multiplicity() const {
  int n = 0;
  for (const Spike& s : spikes) n += s.multiplicity;
  return n;
}

int SpikeSpec::frame_dim_total() const {
  int n = 0;
  for (const Spike& s : spikes) n += s.frame_dim();
  return n;
}

int SpikeSpec::supercritical_count(double sigma) const {
  int n = 0;
  for (const Spike& s : spikes) {
    if (s.theta > sigma) ++n;
  }
  return n;
}

int SpikeSpec::k_plus_sigma(double sigma) const {
  int n = 0;
  for (const Spike& s : spikes) {
    if (s.theta > sigma) n += s.multiplicity;
  }
  return n;
}

int SpikeSpec::frame_total(double sigma) const {
  int n = 0;
  for (const Spike& s : spikes) {
    if (s.theta > sigma) n += s.frame_dim();
  }
  return n;
}

Eigen::MatrixXcd SpikeFrame::unitary(double sigma) const {
  int k = 0;
  for (const SpikeFrameBlock& b : blocks) {
    if (b.theta > sigma) k += b.K;
  }
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(k, k);
  for (const SpikeFrameBlock& b : blocks) {
    if (b.theta > sigma) {
      U.block(b.offset, b.offset, b.K, b.K) = b.completion;
    }
  }
  return U;
}

HermitianMatrix sample_wigner(Eigen::Index N, EnsembleField field,
                              const EntryLaw& law, RngStream& rng) {
  if (N < 1) throw ParameterError("wigner dimension must be >= 1");
  if (field == EnsembleField::RealSymmetric) {
    Eigen::MatrixXd W(N, N);
    const double root2 = std::sqrt(2.0);
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        W(i, j) = sample_entry(law, rng);
        W(j, i) = W(i, j);
      }
      W(j, j) = root2 * sample_entry(law, rng);
    }
    return hermitian_unchecked(std::move(W));
  }
  Eigen::MatrixXcd W(N, N);
  const double invroot2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double re = invroot2 * sample_entry(law, rng);
      const double im = invroot2 * sample_entry(law, rng);
      W(i, j) = std::complex<double>(re, im);
      W(j, i) = std::conj(W(i, j));
    }
    W(j, j) = std::complex<double>(sample_entry(law, rng), 0.0);
  }
  return hermitian_unchecked(std::move(W));
}

SpikeModel build_spike_frame(const SpikeSpec& spec, Eigen::Index N,
                             EnsembleField field) {
  spec.validate();
  const int ktot = spec.frame_dim_total();
  if (ktot > N) {
    throw ParameterError("spike frame dimensions exceed matrix dimension");
  }

  SpikeFrame frame;
  frame.dim = N;
  bool all_real = true;
  int offset = 0;
  for (const Spike& s : spec.spikes) {
    SpikeFrameBlock b;
    b.offset = offset;
    b.K = s.frame_dim();
    b.k = s.multiplicity;
    b.theta = s.theta;
    switch (s.geometry) {
      case SpikeGeometry::Canonical:
        b.completion =
            Eigen::MatrixXd::Identity(b.K, b.K).cast<std::complex<double>>();
        b.columns = b.completion.leftCols(b.k);
        b.real = true;
        break;
      case SpikeGeometry::SpreadUniform: {
        Eigen::MatrixXcd C = dct_frame(b.K).cast<std::complex<double>>();
        b.completion = C;
        b.columns = C.leftCols(b.k);
        b.real = true;
        break;
      }
      case SpikeGeometry::ExplicitFrame:
        b.columns = s.frame;
        b.completion = complete_frame(s.frame);
        b.real = is_real_matrix(s.frame);
        break;
    }
    if (!b.real) all_real = false;
    frame.blocks.push_back(std::move(b));
    offset += frame.blocks.back().K;
  }

  if (field == EnsembleField::RealSymmetric && !all_real) {
    throw ParameterError(
        "complex explicit frame is not valid in the real symmetric field");
  }

  // A = sum over spikes of theta * U U* on the spike's coordinate block.
  HermitianMatrix A = HermitianMatrix::zero(N, field);
  if (field == EnsembleField::RealSymmetric) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N, N);
    for (const SpikeFrameBlock& b : frame.blocks) {
      const Eigen::MatrixXd cols = b.columns.real();
      Eigen::MatrixXd blk = b.theta * (cols * cols.transpose());
      blk = 0.5 * (blk + blk.transpose().eval());
      a.block(b.offset, b.offset, b.K, b.K) = blk;
    }
    A = HermitianMatrix::from_upper(std::move(a));
  } else {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
    for (const SpikeFrameBlock& b : frame.blocks) {
      Eigen::MatrixXcd blk = b.theta * (b.columns * b.columns.adjoint());
      blk = 0.5 * (blk + blk.adjoint().eval());
      a.block(b.offset, b.offset, b.K, b.K) = blk;
    }
    A = HermitianMatrix::from_upper(std::move(a));
  }
  return SpikeModel{std::move(A), std::move(frame)};
}

HermitianMatrix assemble_deformed(const HermitianMatrix& W,
                                  const HermitianMatrix& A) {
  if (W.dim() != A.dim()) {
    throw ParameterError("wigner and deformation dimensions differ");
  }
  if (W.is_real() != A.is_real()) {
    throw ParameterError("wigner and deformation fields differ");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(W.dim()));
  if (W.is_real()) {
    return hermitian_unchecked(
        Eigen::MatrixXd(scale * W.real() + A.real()));
  }
  return hermitian_unchecked(
      Eigen::MatrixXcd(scale * W.complex() + A.complex()));
}

BlockSplit split_blocks(const HermitianMatrix& M, Eigen::Index k) {
  const Eigen::Index N = M.dim();
  if (k <= 0 || k >= N) throw ParameterError("split point out of range");
  BlockSplit out;
  if (M.is_real()) {
    const Eigen::MatrixXd& m = M.real();
    out.head = hermitian_unchecked(Eigen::MatrixXd(m.topLeftCorner(k, k)));
    out.minor = hermitian_unchecked(
        Eigen::MatrixXd(m.bottomRightCorner(N - k, N - k)));
    out.coupling = Eigen::MatrixXd(m.topRightCorner(k, N - k));
  } else {
    const Eigen::MatrixXcd& m = M.complex();
    out.head = hermitian_unchecked(Eigen::MatrixXcd(m.topLeftCorner(k, k)));
    out.minor = hermitian_unchecked(
        Eigen::MatrixXcd(m.bottomRightCorner(N - k, N - k)));
    out.coupling = Eigen::MatrixXcd(m.topRightCorner(k, N - k));
  }
  return out;
}

}  // namespace rmtlab
