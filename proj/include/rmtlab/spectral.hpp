#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/hermitian_matrix.hpp"

namespace rmtlab {

// Eigenvalues in descending order.
struct SpectralSample {
  Eigen::VectorXd values;
};

SpectralSample eigenvalues_sorted(const HermitianMatrix& M);

// Full eigendecomposition, values descending, vectors in matching column
// order.
struct EigenSystem {
  Eigen::VectorXd values;
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> vectors;
};

EigenSystem eigensystem_sorted(const HermitianMatrix& M);

// Rescaled outlier fluctuations for one spike: lambda are the eigenvalues at
// the spike's ranks, xi = c_theta * sqrt(N) * (lambda - rho_theta).
struct SpikeFluctuation {
  int spike_index = 0;
  double theta = 0.0;
  Eigen::VectorXd lambda;
  Eigen::VectorXd xi;
};

struct FluctuationRecord {
  long replication = 0;
  int N = 0;
  std::vector<SpikeFluctuation> spikes;  // spikes with theta > sigma only
};

// Ranks are assigned top-down: spike j with theta_j > sigma owns the
// eigenvalue ranks following the multiplicities of the larger spikes.
FluctuationRecord rescale_fluctuations(const SpectralSample& sample,
                                       const SpikeSpec& spec, double sigma,
                                       int N, long replication = 0);

struct OutlierCount {
  int upper = 0;  // eigenvalues > 2 sigma + delta
  int lower = 0;  // eigenvalues < -(2 sigma + delta)
};

OutlierCount count_outliers(const SpectralSample& sample, double sigma,
                            double delta);

// Default separation: a quarter of the gap between the lowest supercritical
// outlier location and the bulk edge.
double default_outlier_delta(const SpikeSpec& spec, double sigma);

// Normalized resolvent statistics of (rho I - M)^{-1}:
//   tr1 = (1/n) Tr G, tr2 = (1/n) Tr G^2, diag2 = (1/n) sum_i G_ii^2.
// Computed from the eigendecomposition, never by matrix inversion. Throws
// PoleError when rho is inside or numerically touching the spectrum.
struct ResolventTraces {
  double tr1 = 0.0;
  double tr2 = 0.0;
  double diag2 = 0.0;
};

ResolventTraces resolvent_traces(const HermitianMatrix& M, double rho);

}  // namespace rmtlab
