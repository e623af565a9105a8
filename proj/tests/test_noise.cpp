#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "support/oracles.hpp"
#include "tswlad/errors.hpp"
#include "tswlad/noise.hpp"

using namespace tswlad;
using tswlad::testing::normal_cdf_series;

TEST_SUITE("model") {

TEST_CASE("gaussian cdf/pdf against the series oracle and frozen values") {
  const NoiseModel g = NoiseModel::gaussian(1.0);

  const NoiseEval at0 = g.eval(0.0);
  CHECK(at0.cdf == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at0.pdf == doctest::Approx(0.3989422804014327).epsilon(1e-12));

  const NoiseEval at1 = g.eval(1.0);
  // frozen from the erf-free series oracle
  CHECK(at1.cdf == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(at1.pdf == doctest::Approx(0.24197072451914337).epsilon(1e-12));
  CHECK(at1.cdf == doctest::Approx(normal_cdf_series(1.0)).epsilon(1e-13));

  for (double x : {-6.0, -2.5, -1.0, -0.3, 0.7, 2.0, 4.5}) {
    CHECK(g.cdf(x) == doctest::Approx(normal_cdf_series(x)).epsilon(1e-12));
  }
}

TEST_CASE("mixture cdf/pdf combine the component closed forms") {
  const NoiseModel m = NoiseModel::mixture(0.2, 1.0, std::sqrt(10.0));
  const NoiseEval at0 = m.eval(0.0);
  CHECK(at0.cdf == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at0.pdf ==
        doctest::Approx(0.8 * 0.3989422804014327 + 0.2 * 0.12615662610100802)
            .epsilon(1e-12));
  // component closed forms via the same oracle
  const double x = 1.7;
  const double expected = 0.8 * normal_cdf_series(x) +
                          0.2 * normal_cdf_series(x / std::sqrt(10.0));
  CHECK(m.cdf(x) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(m.variance() == doctest::Approx(0.8 + 0.2 * 10.0).epsilon(1e-14));
}

TEST_CASE("quantile: bisection against the oracle") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  CHECK(g.quantile(0.5) == 0.0);
  CHECK(g.quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-8));
  CHECK(std::abs(g.cdf(g.quantile(0.975)) - 0.975) <= 1e-10);

  const NoiseModel m = NoiseModel::mixture(0.2, 1.0, std::sqrt(10.0));
  CHECK(m.quantile(0.5) == 0.0);

  CHECK_THROWS_AS(g.quantile(0.0), ConfigError);
  CHECK_THROWS_AS(g.quantile(1.0), ConfigError);
}

TEST_CASE("property: F(quantile(p)) = p to 1e-10") {
  RngStream rng(7);
  const NoiseModel models[] = {NoiseModel::gaussian(1.0),
                               NoiseModel::gaussian(5.0),
                               NoiseModel::mixture(0.3, 1.0, 4.0)};
  for (const NoiseModel& m : models) {
    for (int trial = 0; trial < 200; ++trial) {
      const double p = 0.001 + 0.998 * rng.uniform01();
      CHECK(std::abs(m.cdf(m.quantile(p)) - p) <= 1e-10);
    }
  }
}

TEST_CASE("quantile non-convergence raises a numerical error") {
  // A plateaued CDF that never reaches 0.6 within a bracketable range.
  const NoiseModel flat = NoiseModel::custom(
      [](double x) { return x < 0.0 ? 0.25 : 0.5; }, [](double) { return 0.0; },
      [](RngStream&) { return 0.0; }, 1.0);
  CHECK_THROWS_AS(flat.quantile(0.6), NumericalError);
}

TEST_CASE("property: CDF/PDF consistency by central differences") {
  const NoiseModel models[] = {NoiseModel::gaussian(1.0),
                               NoiseModel::mixture(0.2, 1.0, std::sqrt(10.0))};
  const double h = 1e-5;
  for (const NoiseModel& m : models) {
    for (double x = -10.0; x <= 10.0; x += 0.25) {
      const double fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
      CHECK(std::abs(fd - m.pdf(x)) <= 1e-4);
    }
  }
}

TEST_CASE("property: empirical CDF of sampler within the KS 99% band") {
  const NoiseModel models[] = {NoiseModel::gaussian(1.0),
                               NoiseModel::mixture(0.2, 1.0, std::sqrt(10.0))};
  const int n = 100000;
  // 99% asymptotic Kolmogorov-Smirnov band
  const double band = 1.628 / std::sqrt(static_cast<double>(n));
  int seed = 100;
  for (const NoiseModel& m : models) {
    RngStream rng(seed++);
    std::vector<double> samples(n);
    for (double& s : samples) s = m.sample(rng);
    std::sort(samples.begin(), samples.end());
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = m.cdf(samples[static_cast<std::size_t>(i)]);
      d_stat = std::max(d_stat, std::abs(f - (i + 1.0) / n));
      d_stat = std::max(d_stat, std::abs(f - static_cast<double>(i) / n));
    }
    CHECK(d_stat <= band);
  }
}

TEST_CASE("density extremum queries: closed form vs grid scan") {
  // Laplace(1) wrapped as a custom model exercises the grid path.
  const NoiseModel laplace = NoiseModel::custom(
      [](double x) {
        return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
      },
      [](double x) { return 0.5 * std::exp(-std::abs(x)); },
      [](RngStream& rng) {
        const double u = rng.uniform01();
        (void)rng.uniform01(); // fixed draw count
        return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
      },
      2.0);
  const double radius = 3.0;
  CHECK(laplace.min_pdf_within(radius) ==
        doctest::Approx(0.5 * std::exp(-radius)).epsilon(1e-7));
  CHECK(laplace.max_pdf_within(radius) == doctest::Approx(0.5).epsilon(1e-7));

  // Built-in unimodal path returns the endpoint / center values exactly.
  const NoiseModel g = NoiseModel::gaussian(1.0);
  CHECK(g.min_pdf_within(2.0) == g.pdf(2.0));
  CHECK(g.max_pdf_within(2.0) == g.pdf(0.0));
}

TEST_CASE("estimation assumptions are checked") {
  CHECK_THROWS_AS(NoiseModel::gaussian(0.0), ConfigError);
  CHECK_THROWS_AS(NoiseModel::gaussian(-1.0), ConfigError);
  CHECK_THROWS_AS(NoiseModel::mixture(1.5, 1.0, 2.0), ConfigError);
  CHECK_NOTHROW(NoiseModel::gaussian(1.0).check_estimation_assumptions());

  // Median offset violates F(0) = 1/2.
  const NoiseModel shifted = NoiseModel::custom(
      [](double x) { return normal_cdf_series(x - 1.0); },
      [](double x) {
        const double z = x - 1.0;
        return 0.3989422804014327 * std::exp(-0.5 * z * z);
      },
      [](RngStream& rng) { return 1.0 + rng.gaussian(); }, 1.0);
  CHECK_THROWS_WITH_AS(shifted.check_estimation_assumptions(),
                       doctest::Contains("Assumption 3"), ConfigError);
}

} // TEST_SUITE
