#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gdss/errors.hpp"
#include "gdss/random.hpp"
#include "oracles.hpp"

using namespace gdss;

namespace {

template <typename F>
std::vector<double> draw(std::size_t m, F&& f) {
  std::vector<double> out(m);
  for (auto& v : out) v = f();
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Closed-form inverse-Gaussian CDF.
double invgauss_cdf(double x, double mu, double lambda) {
  const double a = std::sqrt(lambda / x);
  return oracle::normal_cdf(a * (x / mu - 1.0), 0, 1) +
         std::exp(2.0 * lambda / mu) * oracle::normal_cdf(-a * (x / mu + 1.0), 0, 1);
}

}  // namespace

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    if (x != c.normal()) differ = true;
  }
  CHECK(differ);
  RngStream u(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("inverse gamma") {
  RngStream rng(11, 0);
  const auto recip = draw(1000000, [&] { return 1.0 / sample_inverse_gamma(1.0, 1.0, rng); });
  CHECK(mean(recip) == doctest::Approx(1.0).epsilon(0.01));
  const auto x = draw(1000000, [&] { return sample_inverse_gamma(3.0, 2.0, rng); });
  CHECK(mean(x) == doctest::Approx(1.0).epsilon(0.01));

  const auto y = draw(1000000, [&] { return sample_inverse_gamma(0.5, 0.25, rng); });
  const double ks = oracle::ks_against_density(y, [](double v) { return -1.5 * std::log(v) - 0.25 / v; });
  CHECK(ks < 0.002);

  CHECK_THROWS_AS(sample_inverse_gamma(0.0, 1.0, rng), ParameterDomainError);
  CHECK_THROWS_AS(sample_inverse_gamma(1.0, -1.0, rng), ParameterDomainError);
}

TEST_CASE("inverse Gaussian") {
  RngStream rng(12, 0);
  const auto a = draw(1000000, [&] { return sample_inverse_gaussian(1.0, 2.0, rng); });
  CHECK(mean(a) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(variance(a) == doctest::Approx(0.5).epsilon(0.02));
  const auto b = draw(1000000, [&] { return sample_inverse_gaussian(3.0, 2.0, rng); });
  CHECK(variance(b) == doctest::Approx(13.5).epsilon(0.02));

  const auto c = draw(1000000, [&] { return sample_inverse_gaussian(0.7, 5.0, rng); });
  const double ks = oracle::ks_against_density(c, [](double x) {
    return -1.5 * std::log(x) - 5.0 * (x - 0.7) * (x - 0.7) / (2.0 * 0.49 * x);
  });
  CHECK(ks < 0.002);
  CHECK(oracle::ks_statistic(c, [](double x) { return invgauss_cdf(x, 0.7, 5.0); }) < 0.002);

  // Very large mean-to-shape ratio exercises the cancellation-prone branch.
  const auto d = draw(200000, [&] { return sample_inverse_gaussian(1e4, 1e-2, rng); });
  for (double v : d) REQUIRE(v > 0.0);

  CHECK_THROWS_AS(sample_inverse_gaussian(0.0, 1.0, rng), ParameterDomainError);
}

TEST_CASE("generalised inverse Gaussian") {
  RngStream rng(13, 0);
  SUBCASE("reduces to the inverse Gaussian") {
    const auto x = draw(1000000, [&] { return sample_gig(1.0, 2.0, -0.5, rng); });
    const double mu = std::sqrt(0.5);
    CHECK(mean(x) == doctest::Approx(mu).epsilon(0.02));
    CHECK(variance(x) == doctest::Approx(mu * mu * mu / 1.0).epsilon(0.02));
    CHECK(oracle::ks_statistic(x, [&](double v) { return invgauss_cdf(v, mu, 1.0); }) < 0.005);
  }
  SUBCASE("gamma limit") {
    const auto x = draw(1000000, [&] { return sample_gig(0.0, 2.0, 2.0, rng); });
    CHECK(mean(x) == doctest::Approx(2.0).epsilon(0.02));
    const auto y = draw(1000000, [&] { return sample_gig(1e-12, 2.0, 2.0, rng); });
    CHECK(mean(y) == doctest::Approx(2.0).epsilon(0.02));
  }
  SUBCASE("inverse gamma limit") {
    const auto x = draw(1000000, [&] { return sample_gig(2.0, 0.0, -3.0, rng); });
    CHECK(mean(x) == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("density grid") {
    struct Case {
      double chi, psi, order;
    };
    // Covers the shifted and unshifted ratio-of-uniforms regions and the three-piece hat.
    for (const Case c : {Case{3.7, 2.0, 4.0}, Case{0.5, 2.0, 0.3}, Case{0.02, 0.05, 0.4}, Case{4.0, 2.0, -6.5},
                         Case{200.0, 2.0, -1.0}}) {
      const auto x = draw(1000000, [&] { return sample_gig(c.chi, c.psi, c.order, rng); });
      const double ks = oracle::ks_against_density(
          x, [&](double v) { return (c.order - 1.0) * std::log(v) - 0.5 * (c.chi / v + c.psi * v); });
      INFO("chi=", c.chi, " psi=", c.psi, " order=", c.order);
      CHECK(ks < 0.002);
    }
  }
  CHECK_THROWS_AS(sample_gig(0.0, 2.0, -1.0, rng), ParameterDomainError);
  CHECK_THROWS_AS(sample_gig(1.0, 0.0, 1.0, rng), ParameterDomainError);
  CHECK_THROWS_AS(sample_gig(-1.0, 1.0, 1.0, rng), ParameterDomainError);
}

TEST_CASE("multivariate normal from a precision matrix") {
  RngStream rng(14, 0);
  SUBCASE("scalar") {
    Eigen::MatrixXd A(1, 1);
    A << 4.0;
    Eigen::VectorXd b(1);
    b << 8.0;
    const auto x = draw(1000000, [&] { return sample_mvn_precision(b, A, 1.0, rng)[0]; });
    CHECK(mean(x) == doctest::Approx(2.0).epsilon(0.02));
    CHECK(variance(x) == doctest::Approx(0.25).epsilon(0.02));
  }
  SUBCASE("random SPD") {
    const Eigen::Index p = 5;
    Eigen::MatrixXd R(p, p);
    for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = rng.normal();
    const Eigen::MatrixXd A = R * R.transpose() + Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd b(p);
    for (Eigen::Index i = 0; i < p; ++i) b[i] = rng.normal();
    const double s = 2.0;
    const Eigen::MatrixXd cov = s * A.inverse();
    const Eigen::VectorXd mu = A.inverse() * b;

    const int m = 1000000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd x = sample_mvn_precision(b, A, s, rng) - mu;
      sum += x;
      sq.noalias() += x * x.transpose();
    }
    const Eigen::VectorXd mbar = sum / m;
    const Eigen::MatrixXd emp = sq / m - mbar * mbar.transpose();
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        // Relative to the diagonal scale so near-zero covariances are not judged by a ratio.
        CHECK(std::abs(emp(i, j) - cov(i, j)) < 0.03 * std::sqrt(cov(i, i) * cov(j, j)));
      }
    }
  }
  SUBCASE("singular precision") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(sample_mvn_precision(Eigen::VectorXd::Zero(2), A, 1.0, rng), NumericalError);
  }
}
