#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/spectral.hpp"

using namespace rmtlab;
using std::complex;

namespace {

Spike canonical_spike(double theta, int k) {
  Spike s;
  s.theta = theta;
  s.multiplicity = k;
  s.geometry = SpikeGeometry::Canonical;
  return s;
}

Spike spread_spike(double theta, int k, int K) {
  Spike s;
  s.theta = theta;
  s.multiplicity = k;
  s.geometry = SpikeGeometry::SpreadUniform;
  s.spread_dim = K;
  return s;
}

Spike explicit_spike(double theta, Eigen::MatrixXcd frame) {
  Spike s;
  s.theta = theta;
  s.multiplicity = static_cast<int>(frame.cols());
  s.geometry = SpikeGeometry::ExplicitFrame;
  s.frame = std::move(frame);
  return s;
}

// Semicircle CDF on [-2 sigma, 2 sigma].
double semicircle_cdf(double x, double sigma) {
  const double e = 2.0 * sigma;
  if (x <= -e) return 0.0;
  if (x >= e) return 1.0;
  const double s2 = sigma * sigma;
  return 0.5 + x * std::sqrt(4.0 * s2 - x * x) / (4.0 * std::acos(-1.0) * s2) +
         std::asin(x / e) / std::acos(-1.0);
}

}  // namespace

TEST_CASE("canonical deformation is a diagonal embedding") {
  SpikeSpec spec;
  spec.spikes.push_back(canonical_spike(2.0, 1));
  const SpikeModel model =
      build_spike_frame(spec, 5, EnsembleField::RealSymmetric);
  const Eigen::MatrixXd& A = model.deformation.real();
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(5, 5);
  expect(0, 0) = 2.0;
  CHECK((A - expect).norm() == doctest::Approx(0.0));
  REQUIRE(model.frame.blocks.size() == 1);
  CHECK(model.frame.blocks[0].K == 1);
  CHECK(model.frame.blocks[0].columns(0, 0) == complex<double>(1.0, 0.0));
}

TEST_CASE("spread deformation is theta times a flat rank one projector") {
  SpikeSpec spec;
  spec.spikes.push_back(spread_spike(3.0, 1, 4));
  const SpikeModel model =
      build_spike_frame(spec, 8, EnsembleField::RealSymmetric);
  const Eigen::MatrixXd& A = model.deformation.real();
  // First frame column is constant 1/sqrt(4), so every block entry is
  // exactly 3 * (1/2) * (1/2).
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(A(i, j) == 0.75);
    }
  }
  CHECK(A.bottomRightCorner(4, 4).norm() == 0.0);
  const Eigen::VectorXd ev = eigenvalues_sorted(model.deformation).values;
  CHECK(ev(0) == doctest::Approx(3.0).epsilon(1e-12));
  for (int i = 1; i < 8; ++i) CHECK(std::abs(ev(i)) < 1e-12);
}

TEST_CASE("multiplicities produce repeated deformation eigenvalues") {
  SpikeSpec spec;
  spec.spikes.push_back(canonical_spike(3.0, 1));
  spec.spikes.push_back(canonical_spike(2.0, 2));
  const SpikeModel model =
      build_spike_frame(spec, 6, EnsembleField::ComplexHermitian);
  const Eigen::VectorXd ev = eigenvalues_sorted(model.deformation).values;
  CHECK(ev(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ev(2) == doctest::Approx(2.0).epsilon(1e-12));
  for (int i = 3; i < 6; ++i) CHECK(std::abs(ev(i)) < 1e-12);
}

TEST_CASE("spike spec bookkeeping") {
  SpikeSpec spec;
  spec.spikes.push_back(spread_spike(3.0, 2, 5));
  spec.spikes.push_back(canonical_spike(0.5, 1));
  spec.validate();
  CHECK(spec.total_multiplicity() == 3);
  CHECK(spec.frame_dim_total() == 6);
  CHECK(spec.supercritical_count(1.0) == 1);
  CHECK(spec.k_plus_sigma(1.0) == 2);
  CHECK(spec.frame_total(1.0) == 5);
  CHECK(spec.supercritical_count(0.1) == 2);
  CHECK(spec.frame_total(0.1) == 6);
}

TEST_CASE("spike spec validation rejects malformed input") {
  {
    SpikeSpec spec;
    spec.spikes.push_back(canonical_spike(2.0, 1));
    spec.spikes.push_back(canonical_spike(2.0, 1));  // not strictly decreasing
    CHECK_THROWS_AS(spec.validate(), ParameterError);
  }
  {
    SpikeSpec spec;
    spec.spikes.push_back(canonical_spike(1.0, 1));
    spec.spikes.push_back(canonical_spike(2.0, 1));  // increasing
    CHECK_THROWS_AS(spec.validate(), ParameterError);
  }
  {
    SpikeSpec spec;
    spec.spikes.push_back(canonical_spike(0.0, 1));  // zero theta
    CHECK_THROWS_AS(spec.validate(), ParameterError);
  }
  {
    SpikeSpec spec;
    spec.spikes.push_back(canonical_spike(2.0, 0));  // empty multiplicity
    CHECK_THROWS_AS(spec.validate(), ParameterError);
  }
  {
    SpikeSpec spec;
    spec.spikes.push_back(spread_spike(2.0, 3, 2));  // K < k
    CHECK_THROWS_AS(spec.validate(), ParameterError);
  }
  {
    Eigen::MatrixXcd f(3, 1);
    f << 1.1, 0.0, 0.0;  // column norm != 1
    SpikeSpec spec;
    spec.spikes.push_back(explicit_spike(2.0, f));
    CHECK_THROWS_AS(spec.validate(), ParameterError);
  }
  {
    // Orthonormal within 1e-12 passes.
    Eigen::MatrixXcd f(2, 1);
    f << complex<double>(std::sqrt(0.5), 0.0),
        complex<double>(0.0, std::sqrt(0.5));
    SpikeSpec spec;
    spec.spikes.push_back(explicit_spike(2.0, f));
    spec.validate();
  }
  {
    // Total frame dimension exceeding N is rejected at build time.
    SpikeSpec spec;
    spec.spikes.push_back(spread_spike(2.0, 1, 10));
    CHECK_THROWS_AS(build_spike_frame(spec, 8, EnsembleField::RealSymmetric),
                    ParameterError);
  }
}

TEST_CASE("frames are orthonormal and spread frames are delocalized") {
  SpikeSpec spec;
  spec.spikes.push_back(spread_spike(3.0, 2, 9));
  spec.spikes.push_back(canonical_spike(2.0, 1));
  const SpikeModel model =
      build_spike_frame(spec, 30, EnsembleField::RealSymmetric);
  for (const SpikeFrameBlock& b : model.frame.blocks) {
    const Eigen::MatrixXcd gram =
        b.columns.adjoint() * b.columns -
        Eigen::MatrixXcd::Identity(b.k, b.k);
    CHECK(gram.cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXcd ugram =
        b.completion.adjoint() * b.completion -
        Eigen::MatrixXcd::Identity(b.K, b.K);
    CHECK(ugram.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b.completion.leftCols(b.k) - b.columns).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));
  }
  const SpikeFrameBlock& spread = model.frame.blocks[0];
  CHECK(spread.columns.cwiseAbs().maxCoeff() <= 2.0 / 3.0 + 1e-15);  // 2/sqrt(K)

  const Eigen::MatrixXcd U = model.frame.unitary(1.0);
  REQUIRE(U.rows() == spec.frame_total(1.0));
  CHECK((U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  // Conjugation diagonalizes the supercritical corner of the deformation.
  const Eigen::Index f = U.rows();
  const Eigen::MatrixXcd corner =
      model.deformation.to_complex().topLeftCorner(f, f);
  const Eigen::MatrixXcd D = U.adjoint() * corner * U;
  // Per block: theta on the leading multiplicity coordinates, zero on the
  // completion directions; the canonical block contributes its own theta.
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(f);
  expect(0) = 3.0;
  expect(1) = 3.0;
  expect(9) = 2.0;
  CHECK((D - expect.asDiagonal().toDenseMatrix().cast<complex<double>>())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("wigner entry conventions carry the forced variances") {
  const EntryLaw law = make_entry_law(LawKind::Gaussian, 1.0);
  {
    RngStream rng(21, 0);
    std::vector<double> diag, off;
    for (int rep = 0; rep < 100; ++rep) {
      const HermitianMatrix W =
          sample_wigner(100, EnsembleField::RealSymmetric, law, rng);
      const Eigen::MatrixXd& m = W.real();
      for (int j = 0; j < 100; ++j) {
        diag.push_back(m(j, j));
        for (int i = 0; i < j; ++i) off.push_back(m(i, j));
      }
      CHECK((m - m.transpose()).norm() == doctest::Approx(0.0));
    }
    double dv = 0.0, ov = 0.0;
    for (double x : diag) dv += x * x;
    for (double x : off) ov += x * x;
    dv /= static_cast<double>(diag.size());
    ov /= static_cast<double>(off.size());
    CHECK(dv == doctest::Approx(2.0).epsilon(0.05));   // sqrt(2) X on the diagonal
    CHECK(ov == doctest::Approx(1.0).epsilon(0.01));
  }
  {
    RngStream rng(22, 0);
    std::vector<double> diag;
    double abs2 = 0.0;
    complex<double> sq(0.0, 0.0);
    long nf = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const HermitianMatrix W =
          sample_wigner(100, EnsembleField::ComplexHermitian, law, rng);
      const Eigen::MatrixXcd& m = W.complex();
      CHECK((m - m.adjoint()).norm() == doctest::Approx(0.0));
      for (int j = 0; j < 100; ++j) {
        CHECK(m(j, j).imag() == 0.0);
        diag.push_back(m(j, j).real());
        for (int i = 0; i < j; ++i) {
          abs2 += std::norm(m(i, j));
          sq += m(i, j) * m(i, j);
          ++nf;
        }
      }
    }
    double dv = 0.0;
    for (double x : diag) dv += x * x;
    dv /= static_cast<double>(diag.size());
    abs2 /= static_cast<double>(nf);
    sq /= static_cast<double>(nf);
    CHECK(dv == doctest::Approx(1.0).epsilon(0.05));   // diagonal is one raw draw
    CHECK(abs2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(sq) < 0.01);                        // E[W^2] = 0 off diagonal
  }
}

TEST_CASE("wigner draw order is columns left to right, top to diagonal") {
  const EntryLaw law = make_entry_law(LawKind::Gaussian, 1.0);
  {
    RngStream rng(5, 3);
    const HermitianMatrix W =
        sample_wigner(2, EnsembleField::RealSymmetric, law, rng);
    RngStream ref(5, 3);
    const double d0 = sample_entry(law, ref);
    const double d1 = sample_entry(law, ref);
    const double d2 = sample_entry(law, ref);
    const Eigen::MatrixXd& m = W.real();
    CHECK(m(0, 0) == std::sqrt(2.0) * d0);
    CHECK(m(0, 1) == d1);
    CHECK(m(1, 0) == d1);
    CHECK(m(1, 1) == std::sqrt(2.0) * d2);
  }
  {
    RngStream rng(5, 4);
    const HermitianMatrix W =
        sample_wigner(2, EnsembleField::ComplexHermitian, law, rng);
    RngStream ref(5, 4);
    const double d0 = sample_entry(law, ref);
    const double re = sample_entry(law, ref);
    const double im = sample_entry(law, ref);
    const double d3 = sample_entry(law, ref);
    const Eigen::MatrixXcd& m = W.complex();
    CHECK(m(0, 0) == complex<double>(d0, 0.0));
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(m(0, 1) == complex<double>(re * inv, im * inv));
    CHECK(m(1, 1) == complex<double>(d3, 0.0));
  }
  {
    // A one-dimensional real Wigner matrix is a single scaled draw.
    RngStream rng(9, 0);
    const HermitianMatrix W =
        sample_wigner(1, EnsembleField::RealSymmetric, law, rng);
    RngStream ref(9, 0);
    CHECK(W.real()(0, 0) == std::sqrt(2.0) * sample_entry(law, ref));
  }
  {
    // Identical stream state reproduces the matrix bit for bit.
    RngStream r1(31, 7), r2(31, 7);
    const HermitianMatrix a =
        sample_wigner(40, EnsembleField::ComplexHermitian, law, r1);
    const HermitianMatrix b =
        sample_wigner(40, EnsembleField::ComplexHermitian, law, r2);
    CHECK((a.complex() - b.complex()).norm() == 0.0);
  }
}

TEST_CASE("deformed assembly is W over sqrt(N) plus A") {
  SpikeSpec spec;
  spec.spikes.push_back(canonical_spike(1.0, 1));
  const SpikeModel model =
      build_spike_frame(spec, 4, EnsembleField::RealSymmetric);
  const HermitianMatrix W =
      hermitian_unchecked(Eigen::MatrixXd(4.0 * Eigen::MatrixXd::Identity(4, 4)));
  const HermitianMatrix M = assemble_deformed(W, model.deformation);
  const Eigen::MatrixXd& m = M.real();
  CHECK(m(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  for (int i = 1; i < 4; ++i) {
    CHECK(m(i, i) == doctest::Approx(2.0).epsilon(1e-15));
  }
  CHECK(m.norm() == doctest::Approx(std::sqrt(9.0 + 3 * 4.0)).epsilon(1e-15));

  const HermitianMatrix W3 = HermitianMatrix::zero(3, EnsembleField::RealSymmetric);
  CHECK_THROWS_AS(assemble_deformed(W3, model.deformation), ParameterError);
  const HermitianMatrix Wc = HermitianMatrix::zero(4, EnsembleField::ComplexHermitian);
  CHECK_THROWS_AS(assemble_deformed(Wc, model.deformation), ParameterError);
}

TEST_CASE("block split is exact and reassembles bit for bit") {
  {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 3.0;
    const HermitianMatrix M = hermitian_unchecked(m);
    const BlockSplit s = split_blocks(M, 1);
    CHECK(s.head.real()(0, 0) == 1.0);
    CHECK(s.minor.real()(0, 0) == 3.0);
    CHECK(std::get<Eigen::MatrixXd>(s.coupling)(0, 0) == 2.0);
  }
  {
    const EntryLaw law = make_entry_law(LawKind::UniformSymmetric, 1.0);
    RngStream rng(8, 1);
    const HermitianMatrix M =
        sample_wigner(7, EnsembleField::ComplexHermitian, law, rng);
    const BlockSplit s = split_blocks(M, 2);
    CHECK(s.head.dim() == 2);
    CHECK(s.minor.dim() == 5);
    CHECK(!s.head.is_real());
    const auto& c = std::get<Eigen::MatrixXcd>(s.coupling);
    Eigen::MatrixXcd re(7, 7);
    re.topLeftCorner(2, 2) = s.head.complex();
    re.topRightCorner(2, 5) = c;
    re.bottomLeftCorner(5, 2) = c.adjoint();
    re.bottomRightCorner(5, 5) = s.minor.complex();
    CHECK((re - M.complex()).norm() == 0.0);
  }
  {
    const HermitianMatrix M = HermitianMatrix::zero(3, EnsembleField::RealSymmetric);
    CHECK_THROWS_AS(split_blocks(M, 0), ParameterError);
    CHECK_THROWS_AS(split_blocks(M, 3), ParameterError);
  }
}

TEST_CASE("deformed spectrum tracks the semicircle in bulk") {
  SpikeSpec spec;
  spec.spikes.push_back(canonical_spike(2.0, 1));
  const Eigen::Index N = 2000;
  const SpikeModel model =
      build_spike_frame(spec, N, EnsembleField::RealSymmetric);
  const EntryLaw law = make_entry_law(LawKind::Rademacher, 1.0);
  RngStream rng(61, 0);
  const HermitianMatrix W =
      sample_wigner(N, EnsembleField::RealSymmetric, law, rng);
  const HermitianMatrix M = assemble_deformed(W, model.deformation);
  const Eigen::VectorXd ev = eigenvalues_sorted(M).values;
  // One-sample KS against the semicircle CDF; the lone outlier and edge
  // effects are O(1/N) and stay far below the band.
  double d = 0.0;
  const double n = static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double x = ev(N - 1 - i);  // ascending
    const double F = semicircle_cdf(x, 1.0);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
  }
  CHECK(d < 0.05);
  // The outlier sits at rho within bulk fluctuations.
  CHECK(ev(0) == doctest::Approx(2.5).epsilon(0.05));
}
