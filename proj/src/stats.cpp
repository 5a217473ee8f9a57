#include "rmtlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rmtlab/errors.hpp"

namespace rmtlab {

KSReport ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ParameterError("ks_two_sample needs nonempty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < n && j < m) {
    const double x = std::min(a[i], b[j]);
    // Consume every observation equal to x from both samples before
    // measuring: the ECDF gap is only defined after the common jump.
    while (i < n && a[i] == x) ++i;
    while (j < m && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / m));
  }
  // Once one sample is exhausted the remaining gaps only shrink toward the
  // final common value 1, except for the step just taken, already measured.
  KSReport r;
  r.d = d;
  r.n = static_cast<long>(n);
  r.m = static_cast<long>(m);
  const double en = std::sqrt(static_cast<double>(n) * m / (n + m));
  r.p_value = kolmogorov_q(d * en);
  return r;
}

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

Moments sample_moments(const std::vector<double>& x) {
  if (x.size() < 2) {
    throw ParameterError("sample_moments needs at least two observations");
  }
  Moments s;
  s.n = static_cast<long>(x.size());
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  s.mean = mean;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.variance = m2 * n / (n - 1.0);
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return s;
}

Eigen::MatrixXd empirical_covariance(const std::vector<Eigen::VectorXd>& x) {
  if (x.size() < 2) {
    throw ParameterError("empirical_covariance needs at least two samples");
  }
  const Eigen::Index k = x.front().size();
  for (const auto& v : x) {
    if (v.size() != k) {
      throw ParameterError("empirical_covariance: inconsistent dimensions");
    }
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (const auto& v : x) mean += v;
  mean /= static_cast<double>(x.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (const auto& v : x) {
    const Eigen::VectorXd d = v - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(x.size() - 1);
  return cov;
}

namespace {

double interp_quantile(const std::vector<double>& sorted, double u) {
  const double pos = u * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<std::pair<double, double>> qq_pairs(std::vector<double> a,
                                                std::vector<double> b, int q) {
  if (q < 2) throw ParameterError("qq_pairs needs q >= 2");
  if (a.empty() || b.empty()) {
    throw ParameterError("qq_pairs needs nonempty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    const double u = static_cast<double>(i) / (q - 1);
    out.emplace_back(interp_quantile(a, u), interp_quantile(b, u));
  }
  return out;
}

}  // namespace rmtlab
