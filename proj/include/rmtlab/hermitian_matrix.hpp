#pragma once

#include <Eigen/Dense>
#include <complex>
#include <variant>

#include "rmtlab/errors.hpp"

namespace rmtlab {

// t = 4 for real symmetric, t = 2 for complex Hermitian; this is the
// field parameter entering the fluctuation variance formulas.
enum class EnsembleField { RealSymmetric, ComplexHermitian };

inline int field_t(EnsembleField f) {
  return f == EnsembleField::RealSymmetric ? 4 : 2;
}

inline const char* field_name(EnsembleField f) {
  return f == EnsembleField::RealSymmetric ? "real" : "complex";
}

// Dense self-adjoint matrix over either field. The upper triangle is
// authoritative: construction mirrors it onto the lower one, so M == M*
// holds bit-exactly, not merely up to rounding.
class HermitianMatrix {
 public:
  HermitianMatrix() : m_(Eigen::MatrixXd()) {}

  static HermitianMatrix zero(Eigen::Index n, EnsembleField f) {
    if (f == EnsembleField::RealSymmetric) {
      return HermitianMatrix(Eigen::MatrixXd(Eigen::MatrixXd::Zero(n, n)));
    }
    return HermitianMatrix(Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(n, n)));
  }

  // Mirrors the upper triangle; diagonal imaginary parts are dropped in the
  // complex case so the result is exactly self-adjoint.
  static HermitianMatrix from_upper(Eigen::MatrixXd m);
  static HermitianMatrix from_upper(Eigen::MatrixXcd m);

  Eigen::Index dim() const {
    return std::visit([](const auto& m) { return m.rows(); }, m_);
  }

  EnsembleField field() const {
    return is_real() ? EnsembleField::RealSymmetric
                     : EnsembleField::ComplexHermitian;
  }

  bool is_real() const { return std::holds_alternative<Eigen::MatrixXd>(m_); }

  const Eigen::MatrixXd& real() const {
    if (!is_real()) throw ParameterError("matrix is complex, not real");
    return std::get<Eigen::MatrixXd>(m_);
  }

  const Eigen::MatrixXcd& complex() const {
    if (is_real()) throw ParameterError("matrix is real, not complex");
    return std::get<Eigen::MatrixXcd>(m_);
  }

  Eigen::MatrixXcd to_complex() const {
    if (is_real()) return real().cast<std::complex<double>>();
    return complex();
  }

  template <class Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), m_);
  }

 private:
  explicit HermitianMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}
  explicit HermitianMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}

  friend HermitianMatrix hermitian_unchecked(Eigen::MatrixXd m);
  friend HermitianMatrix hermitian_unchecked(Eigen::MatrixXcd m);

  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> m_;
};

// For internal builders that already guarantee exact self-adjointness.
inline HermitianMatrix hermitian_unchecked(Eigen::MatrixXd m) {
  return HermitianMatrix(std::move(m));
}
inline HermitianMatrix hermitian_unchecked(Eigen::MatrixXcd m) {
  return HermitianMatrix(std::move(m));
}

}  // namespace rmtlab
