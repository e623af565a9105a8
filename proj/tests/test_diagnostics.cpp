#include <cmath>
#include <utility>
#include <vector>

#include <doctest.h>

#include "support/oracles.hpp"
#include "tswlad/diagnostics.hpp"
#include "tswlad/errors.hpp"
#include "tswlad/estimator.hpp"

using namespace tswlad;
using tswlad::testing::normal_cdf_series;
using tswlad::testing::sym_eigenvalues_bisect;

namespace {

const SaturationSpec band{0.0, 0.0, 25.0, 25.0};

Eigen::VectorXd box_point(RngStream& rng, const AdmissibleSet& set) {
  Eigen::VectorXd x = set.centroid();
  for (int i = 0; i < x.size(); ++i) {
    x[i] += set.radii()[i] * (2.0 * rng.uniform01() - 1.0);
  }
  return x;
}

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("information tracker: rank-one accumulation and eigen bounds") {
  InformationTracker fresh(Eigen::MatrixXd::Identity(3, 3));
  CHECK(fresh.lambda_min() == doctest::Approx(1.0));
  CHECK(fresh.lambda_max() == doctest::Approx(1.0));

  InformationTracker t(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  t.update(e1);
  t.refresh();
  CHECK(t.lambda_max() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(t.lambda_min() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.count() == 1);
}

TEST_CASE("information tracker matches an independent inertia-bisection "
          "eigensolve") {
  RngStream rng(41);
  InformationTracker t(Eigen::MatrixXd::Identity(6, 6), 10);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd phi(6);
    for (int i = 0; i < 6; ++i) phi[i] = 2.0 * rng.gaussian();
    t.update(phi);
  }
  t.refresh();
  const std::vector<double> eigs = sym_eigenvalues_bisect(t.matrix(), 1e-12);
  CHECK(t.lambda_min() ==
        doctest::Approx(eigs.front()).epsilon(1e-8));
  CHECK(t.lambda_max() == doctest::Approx(eigs.back()).epsilon(1e-8));
}

TEST_CASE("tracker eigenvalues are nondecreasing along a trajectory") {
  RngStream rng(42);
  InformationTracker t(Eigen::MatrixXd::Identity(4, 4), 1);
  double last_min = t.lambda_min(), last_max = t.lambda_max();
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd phi(4);
    for (int i = 0; i < 4; ++i) phi[i] = rng.gaussian();
    t.update(phi);
    CHECK(t.lambda_min() >= last_min - 1e-10);
    CHECK(t.lambda_max() >= last_max - 1e-10);
    last_min = t.lambda_min();
    last_max = t.lambda_max();
  }
}

TEST_CASE("rate ratio and excitation condition values") {
  Eigen::MatrixXd seed(2, 2);
  seed << 1.0, 0.0, 0.0, std::exp(1.0);
  InformationTracker t(seed);
  CHECK(rate_ratio(t, 0.0) == 0.0);
  // err^2 * lambda_min / log(lambda_max + e) with the documented +e offset
  CHECK(rate_ratio(t, 1.0) ==
        doctest::Approx(1.0 / std::log(2.0 * std::exp(1.0))).epsilon(1e-12));
  CHECK(excitation_ratio(t) ==
        doctest::Approx(std::log(2.0 * std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("regret step") {
  CHECK(regret_step(10.0, 12.0, 1.0) == doctest::Approx(2.0));
  CHECK(regret_step(7.0, 7.0, 0.3) == 0.0);
  CHECK(regret_step(10.0, 12.0, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(regret_step(1.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(regret_step(1.0, 1.0, 1.5), ConfigError);
}

TEST_CASE("metric series running means") {
  MetricSeries series;
  CHECK(series.avg_prediction_error() == 0.0);
  series.observe(0.0, 3.0);
  CHECK(series.avg_prediction_error() == doctest::Approx(3.0));
  CHECK(series.regret_avg() == 0.0);
  series.observe(2.0, 0.0);
  CHECK(series.avg_prediction_error() == doctest::Approx(1.5));
  CHECK(series.regret_avg() == doctest::Approx(1.0));
}

TEST_CASE("psi closed forms: zero at the truth, oracle-frozen elsewhere") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  Eigen::VectorXd phi(1), theta(1);
  phi << 1.0;

  for (double z : {-3.0, 5.0, 30.0}) { // one point per regime
    theta << z;
    CHECK(psi_value({phi, theta, theta, band, g}) == 0.0);
  }

  // Interior with phi'est - phi'theta = 1: 1 - 2 Phi(1).
  Eigen::VectorXd est(1);
  est << 1.0;
  theta << 0.0;
  CHECK(psi_value({phi, est, theta, band, g}) ==
        doctest::Approx(-0.6826894921370859).epsilon(1e-12));

  // Lower regime (phi'est = -2 censors), truth at -1: Phi(2) - Phi(1).
  est << -2.0;
  theta << -1.0;
  CHECK(psi_value({phi, est, theta, band, g}) ==
        doctest::Approx(0.1359051219832779).epsilon(1e-12));
  CHECK(psi_value({phi, est, theta, band, g}) ==
        doctest::Approx(normal_cdf_series(2.0) - normal_cdf_series(1.0))
            .epsilon(1e-12));
}

TEST_CASE("sentencing accuracy") {
  using Pair = std::pair<double, double>;
  const std::vector<Pair> perfect = {{4.0, 4.0}, {9.0, 9.0}};
  CHECK(sentencing_accuracy(perfect) == doctest::Approx(1.0));
  const std::vector<Pair> one = {{10.0, 9.0}};
  CHECK(sentencing_accuracy(one) == doctest::Approx(0.9));
  const std::vector<Pair> two = {{10.0, 9.0}, {20.0, 22.0}};
  CHECK(sentencing_accuracy(two) == doctest::Approx(0.9));
  const std::vector<Pair> bad = {{10.0, 9.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(sentencing_accuracy(bad), DataError);
}

TEST_CASE("property: |psi| <= 1 over random operating points") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(43);
  for (int trial = 0; trial < 10000; ++trial) {
    Eigen::VectorXd phi(3), est(3), theta(3);
    for (int i = 0; i < 3; ++i) {
      phi[i] = 6.0 * (rng.uniform01() - 0.5);
      est[i] = 30.0 * (rng.uniform01() - 0.5);
      theta[i] = 30.0 * (rng.uniform01() - 0.5);
    }
    const double psi = psi_value({phi, est, theta, band, g});
    CHECK(std::abs(psi) <= 1.0);
  }
}

TEST_CASE("property: psi sign alignment and density-infimum lower bound") {
  // With both points in the admissible set and the step-1 infimum taken over
  // the matching radius, psi is aligned with phi'(theta - est) and at least
  // beta_bar times its size.
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(44);
  for (int trial = 0; trial < 10000; ++trial) {
    const int d = 2;
    const double radius = 0.3 + 2.0 * rng.uniform01();
    const AdmissibleSet set = AdmissibleSet::box(
        Eigen::VectorXd::Zero(d), Eigen::VectorXd::Constant(d, radius));
    Eigen::VectorXd phi(d);
    for (int i = 0; i < d; ++i) phi[i] = 3.0 * (rng.uniform01() - 0.5);
    const Eigen::VectorXd est = box_point(rng, set);
    const Eigen::VectorXd theta = box_point(rng, set);

    const double psi = psi_value({phi, est, theta, band, g});
    const double gap = phi.dot(theta - est);
    CHECK(gap * psi >= -1e-10);

    const double c_bound = regressor_bound(set, phi);
    const double beta_bar =
        step1_gain_slope(g, c_bound, band.lower_threshold,
                         band.upper_threshold);
    CHECK(std::abs(psi) >= beta_bar * std::abs(gap) - 1e-10);
  }
}

TEST_CASE("property: psi linearization error bounded by the density-sup "
          "envelope") {
  // |psi - beta phi'(theta - est)| <= 2 sup f * |phi'(theta - ref)|; outside
  // the interior regime the single sup f envelope is already sharp.
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(45);
  const int d = 2;
  const AdmissibleSet set = AdmissibleSet::box(
      Eigen::VectorXd::Zero(d), Eigen::VectorXd::Constant(d, 10.0));
  const double m_bound =
      std::max(band.lower_threshold, -band.upper_threshold);
  for (int trial = 0; trial < 10000; ++trial) {
    Eigen::VectorXd phi(d);
    for (int i = 0; i < d; ++i) phi[i] = 3.0 * (rng.uniform01() - 0.5);
    const Eigen::VectorXd theta = box_point(rng, set);
    const Eigen::VectorXd est = box_point(rng, set);   // theta_k
    const Eigen::VectorXd ref = box_point(rng, set);   // theta_bar_k

    const double psi = psi_value({phi, est, theta, band, g});
    const double beta = step2_gain_slope(g, band, phi, est, ref);
    const double c_bound = regressor_bound(set, phi);
    const double radius = std::max(2.0 * c_bound, c_bound + m_bound);
    const double sup_f = g.max_pdf_within(radius);

    const double lhs = std::abs(psi - beta * phi.dot(theta - est));
    const double rhs_scale = std::abs(phi.dot(theta - ref));
    CHECK(lhs <= 2.0 * sup_f * rhs_scale + 1e-10);
    if (classify_regime(phi.dot(est), band) != Regime::Interior) {
      CHECK(lhs <= sup_f * rhs_scale + 1e-10);
    }
  }
}

TEST_CASE("property: psi equals the Monte Carlo mean of the innovation") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(46);
  const int draws = 100000;
  for (int point = 0; point < 4; ++point) {
    Eigen::VectorXd phi(2), est(2), theta(2);
    for (int i = 0; i < 2; ++i) {
      phi[i] = 3.0 * (rng.uniform01() - 0.5);
      est[i] = 10.0 * (rng.uniform01() - 0.5);
      theta[i] = 10.0 * (rng.uniform01() - 0.5);
    }
    const double psi = psi_value({phi, est, theta, band, g});

    double sum = 0.0, sum_sq = 0.0;
    for (int n = 0; n < draws; ++n) {
      const double y = saturate(phi.dot(theta) + g.sample(rng), band);
      const double v = innovation(y, phi, est, band, g).value;
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / draws;
    const double var = sum_sq / draws - mean * mean;
    const double se = std::sqrt(std::max(var, 1e-12) / draws);
    // The additive cushion covers deeply censored operating points where the
    // sample variance underestimates the rare-escape contribution.
    CHECK(std::abs(mean - psi) <= 3.0 * se + 1e-4);
  }
}

TEST_CASE("property: centered sign residual has zero empirical mean") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(47);
  Eigen::VectorXd phi(2), est(2), theta(2);
  phi << 1.2, -0.5;
  est << 3.0, 1.0;
  theta << 2.0, -1.0;

  // E[sgn(y - S(phi'est))] recovered from psi by removing the deterministic
  // clip corrections.
  const double z = phi.dot(est);
  double expected_sign = psi_value({phi, est, theta, band, g});
  switch (classify_regime(z, band)) {
  case Regime::Upper:
    expected_sign -= g.cdf(band.upper_threshold - z);
    break;
  case Regime::Lower:
    expected_sign += 1.0 - g.cdf(band.lower_threshold - z);
    break;
  case Regime::Interior:
    break;
  }

  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int n = 0; n < draws; ++n) {
    const double y = saturate(phi.dot(theta) + g.sample(rng), band);
    const double s = y > saturate(z, band) ? 1.0
                   : y < saturate(z, band) ? -1.0
                                           : 0.0;
    const double w = s - expected_sign;
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean) <= 3.0 * se + 1e-6);
}

} // TEST_SUITE
