#include "rmtlab/hermitian_matrix.hpp"

namespace rmtlab {

HermitianMatrix HermitianMatrix::from_upper(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) {
    throw ParameterError("self-adjoint matrix must be square");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) m(j, i) = m(i, j);
  }
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::from_upper(Eigen::MatrixXcd m) {
  if (m.rows() != m.cols()) {
    throw ParameterError("self-adjoint matrix must be square");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    m(j, j) = std::complex<double>(m(j, j).real(), 0.0);
    for (Eigen::Index i = 0; i < j; ++i) m(j, i) = std::conj(m(i, j));
  }
  return HermitianMatrix(std::move(m));
}

}  // namespace rmtlab
