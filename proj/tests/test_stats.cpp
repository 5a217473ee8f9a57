#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rmtlab/errors.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/stats.hpp"

using namespace rmtlab;

TEST_CASE("ks statistic on hand cases") {
  {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const KSReport r = ks_two_sample(a, a);
    CHECK(r.d == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
  }
  {
    const KSReport r = ks_two_sample({0.0, 0.0}, {1.0, 1.0});
    CHECK(r.d == doctest::Approx(1.0));
  }
  {
    // CDFs cross at distance 1/2 between the interleaved points.
    const KSReport r = ks_two_sample({1.0, 2.0}, {1.5, 2.5});
    CHECK(r.d == doctest::Approx(0.5));
    CHECK(r.n == 2);
    CHECK(r.m == 2);
  }
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), ParameterError);
  CHECK_THROWS_AS(ks_two_sample({1.0}, {}), ParameterError);
}

TEST_CASE("ks handles ties across the two samples") {
  // Shared atoms: both CDFs jump at the same points; process the tie block
  // before measuring. Empirical CDFs agree at 1 and 2 only after both jumps.
  const KSReport r = ks_two_sample({1.0, 1.0, 2.0}, {1.0, 2.0, 2.0});
  CHECK(r.d == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ks is invariant under permutation and monotone maps") {
  RngStream rng(11, 0);
  std::vector<double> a(400), b(500);
  for (double& x : a) x = rng.next_gaussian();
  for (double& x : b) x = 0.2 + rng.next_gaussian();
  const KSReport base = ks_two_sample(a, b);

  std::mt19937_64 gen(7);
  std::shuffle(a.begin(), a.end(), gen);
  std::shuffle(b.begin(), b.end(), gen);
  const KSReport shuffled = ks_two_sample(a, b);
  CHECK(shuffled.d == doctest::Approx(base.d).epsilon(1e-15));
  CHECK(shuffled.p_value == doctest::Approx(base.p_value).epsilon(1e-15));

  auto mapped = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(0.5 * x) + x;  // strictly increasing
    return v;
  };
  const KSReport warped = ks_two_sample(mapped(a), mapped(b));
  CHECK(warped.d == doctest::Approx(base.d).epsilon(1e-15));
}

TEST_CASE("kolmogorov tail is a valid decreasing p-value") {
  CHECK(kolmogorov_q(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_q(1e-3) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(kolmogorov_q(10.0) == doctest::Approx(0.0));
  double prev = 1.0;
  for (double lam = 0.2; lam < 3.0; lam += 0.1) {
    const double q = kolmogorov_q(lam);
    CHECK(q <= prev + 1e-15);
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
    prev = q;
  }
  // Classical table value Q(1.36) close to 0.05.
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0505).epsilon(0.01));
  // Larger d at equal sizes means smaller p.
  const KSReport lo = ks_two_sample({1, 2, 3, 4, 5}, {1.5, 2.5, 3.5, 4.5, 5.5});
  const KSReport hi = ks_two_sample({1, 2, 3, 4, 5}, {11, 12, 13, 14, 15});
  CHECK(hi.d > lo.d);
  CHECK(hi.p_value < lo.p_value);
}

TEST_CASE("sample moments on exact inputs") {
  {
    const Moments m = sample_moments({1.0, 1.0, 1.0, 1.0});
    CHECK(m.mean == doctest::Approx(1.0));
    CHECK(m.variance == doctest::Approx(0.0));
    CHECK(m.n == 4);
  }
  {
    const Moments m = sample_moments({-1.0, 1.0});
    CHECK(m.mean == doctest::Approx(0.0));
    CHECK(m.variance == doctest::Approx(2.0));  // unbiased: sum/(n-1)
  }
  CHECK_THROWS_AS(sample_moments({}), ParameterError);
  CHECK_THROWS_AS(sample_moments({3.0}), ParameterError);
}

TEST_CASE("sample moments on a large gaussian sample") {
  RngStream rng(404, 0);
  std::vector<double> x(1000000);
  for (double& v : x) v = rng.next_gaussian();
  const Moments m = sample_moments(x);
  CHECK(std::abs(m.mean) < 0.004);
  CHECK(m.variance == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(m.skewness) < 0.01);
  CHECK(m.excess_kurtosis > -0.02);
  CHECK(m.excess_kurtosis < 0.02);
}

TEST_CASE("empirical covariance on exact inputs") {
  {
    std::vector<Eigen::VectorXd> x(3, Eigen::VectorXd::Constant(2, 5.0));
    const Eigen::MatrixXd c = empirical_covariance(x);
    CHECK(c.norm() == doctest::Approx(0.0));
    CHECK(c.rows() == 2);
  }
  {
    std::vector<Eigen::VectorXd> x;
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.0;
    b << -1.0, 0.0;
    x.push_back(a);
    x.push_back(b);
    const Eigen::MatrixXd c = empirical_covariance(x);
    CHECK(c(0, 0) == doctest::Approx(2.0));
    CHECK(c(0, 1) == doctest::Approx(0.0));
    CHECK(c(1, 1) == doctest::Approx(0.0));
  }
  {
    std::vector<Eigen::VectorXd> x;
    x.push_back(Eigen::VectorXd::Zero(2));
    x.push_back(Eigen::VectorXd::Zero(3));
    CHECK_THROWS_AS(empirical_covariance(x), ParameterError);
  }
  {
    std::vector<Eigen::VectorXd> x;
    x.push_back(Eigen::VectorXd::Zero(2));
    CHECK_THROWS_AS(empirical_covariance(x), ParameterError);
  }
}

TEST_CASE("empirical covariance of independent pairs is near diagonal") {
  RngStream rng(77, 0);
  std::vector<Eigen::VectorXd> x;
  x.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    Eigen::VectorXd v(2);
    v << rng.next_gaussian(), rng.next_gaussian();
    x.push_back(std::move(v));
  }
  const Eigen::MatrixXd c = empirical_covariance(x);
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(c(1, 1) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(std::abs(c(0, 1)) < 0.01);
  CHECK(c(0, 1) == doctest::Approx(c(1, 0)));
}

TEST_CASE("qq pairs") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  {
    const auto pairs = qq_pairs(a, a, 5);
    for (const auto& [p, q] : pairs) CHECK(p == doctest::Approx(q));
  }
  {
    const auto pairs = qq_pairs(a, a, 2);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs.front().first == doctest::Approx(1.0));
    CHECK(pairs.back().first == doctest::Approx(5.0));
  }
  {
    std::vector<double> b;
    for (double v : a) b.push_back(2.0 * v);
    const auto pairs = qq_pairs(a, b, 9);
    for (const auto& [p, q] : pairs) CHECK(q == doctest::Approx(2.0 * p));
  }
  CHECK_THROWS_AS(qq_pairs(a, a, 1), ParameterError);
  CHECK_THROWS_AS(qq_pairs({}, a, 3), ParameterError);
}

TEST_CASE("ks p-values are calibrated under the null") {
  // 500 independent trials of two same-law samples; the rejection rate at
  // 0.05 must sit near 0.05. Band [0.03, 0.08] is ~4 binomial sigma wide.
  const int trials = 500, n = 10000;
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(900, static_cast<std::uint64_t>(t));
    std::vector<double> a(n), b(n);
    for (double& x : a) x = rng.next_gaussian();
    for (double& x : b) x = rng.next_gaussian();
    if (ks_two_sample(a, b).p_value < 0.05) ++rejected;
  }
  const double rate = static_cast<double>(rejected) / trials;
  CHECK(rate > 0.03);
  CHECK(rate < 0.08);
}
