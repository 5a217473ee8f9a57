#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "rmtlab/entry_law.hpp"
#include "rmtlab/hermitian_matrix.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

enum class SpikeGeometry { Canonical, SpreadUniform, ExplicitFrame };

// One deformation eigenvalue theta with multiplicity k_j, realized on a block
// of K_j >= k_j canonical coordinates:
//   Canonical:     K_j = k_j, eigenvectors are canonical basis vectors.
//   SpreadUniform: K_j = spread_dim; eigenvectors are the leading k_j columns
//                  of the orthonormal DCT frame on K_j points, so every entry
//                  is O(1/sqrt(K_j)) (delocalized).
//   ExplicitFrame: caller-supplied K_j x k_j matrix with orthonormal columns.
struct Spike {
  double theta = 0.0;
  int multiplicity = 1;
  SpikeGeometry geometry = SpikeGeometry::Canonical;
  int spread_dim = 0;       // K_j for SpreadUniform
  Eigen::MatrixXcd frame;   // K_j x k_j for ExplicitFrame

  int frame_dim() const;    // K_j
};

// Ordered spike list; theta strictly decreasing is required so eigenvalue
// ranks map to spikes unambiguously.
struct SpikeSpec {
  std::vector<Spike> spikes;

  void validate() const;
  int total_multiplicity() const;
  int frame_dim_total() const;
  // Spikes with theta > sigma (the ones generating upper-edge outliers) form
  // a prefix of the ordered list.
  int supercritical_count(double sigma) const;
  int k_plus_sigma(double sigma) const;   // sum of their multiplicities
  int frame_total(double sigma) const;    // sum of their K_j: the split point
};

struct SpikeFrameBlock {
  int offset = 0;  // first canonical coordinate of this spike's block
  int K = 0;
  int k = 0;
  double theta = 0.0;
  bool real = true;
  Eigen::MatrixXcd columns;     // K x k, orthonormal columns
  Eigen::MatrixXcd completion;  // K x K unitary; leading k columns == columns
};

struct SpikeFrame {
  std::vector<SpikeFrameBlock> blocks;  // one per spike, in spec order
  Eigen::Index dim = 0;                 // ambient N

  // Block-diagonal unitary over the supercritical blocks (theta > sigma);
  // conjugating the leading corner of the deformation by it diagonalizes it.
  Eigen::MatrixXcd unitary(double sigma) const;
};

struct SpikeModel {
  HermitianMatrix deformation;  // A_N
  SpikeFrame frame;
};

// Wigner matrix with raw (unnormalized) entries. Real symmetric: diagonal
// sqrt(2)*X and off-diagonal X with X ~ mu i.i.d. Complex Hermitian:
// diagonal X real, off-diagonal (X + iY)/sqrt(2). Under either field the
// diagonal variance is the off-diagonal E|.|^2 times the GOE/GUE factor.
// Draw order is fixed (columns left to right, within a column top to
// diagonal) so sequences are reproducible.
HermitianMatrix sample_wigner(Eigen::Index N, EnsembleField field,
                              const EntryLaw& law, RngStream& rng);

// Finite-rank deformation A_N embedded in N dimensions, blocks laid out
// consecutively from coordinate 0 in spec order.
SpikeModel build_spike_frame(const SpikeSpec& spec, Eigen::Index N,
                             EnsembleField field);

// M = W / sqrt(N) + A. Fields must match.
HermitianMatrix assemble_deformed(const HermitianMatrix& W,
                                  const HermitianMatrix& A);

struct BlockSplit {
  HermitianMatrix head;   // k x k
  HermitianMatrix minor;  // (N-k) x (N-k)
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> coupling;  // k x (N-k)
};

// Split into the leading k x k corner, the coupling rows, and the trailing
// minor. Reassembly is bit-exact.
BlockSplit split_blocks(const HermitianMatrix& M, Eigen::Index k);

}  // namespace rmtlab
