#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace rmtlab {

struct KSReport {
  double d = 0.0;
  long n = 0;
  long m = 0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov. The statistic is the exact sup-distance of
// the two empirical CDFs (ties across samples are processed before the gap
// is measured); the p-value uses the asymptotic Kolmogorov distribution at
// lambda = d * sqrt(nm/(n+m)).
KSReport ks_two_sample(std::vector<double> a, std::vector<double> b);

// Tail of the Kolmogorov distribution: 2 sum_{k>=1} (-1)^{k-1} exp(-2k^2 x^2),
// series truncated when a term drops below 1e-12, clamped to [0, 1].
double kolmogorov_q(double lambda);

struct Moments {
  long n = 0;
  double mean = 0.0;
  double variance = 0.0;         // unbiased
  double skewness = 0.0;         // m3 / m2^(3/2), population moments
  double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
};

Moments sample_moments(const std::vector<double>& x);

// Unbiased sample covariance of vector observations (all the same length).
Eigen::MatrixXd empirical_covariance(const std::vector<Eigen::VectorXd>& x);

// q quantile-matched pairs at levels i/(q-1), i = 0..q-1, with linear
// interpolation between order statistics (endpoints are min and max).
std::vector<std::pair<double, double>> qq_pairs(std::vector<double> a,
                                                std::vector<double> b, int q);

}  // namespace rmtlab
