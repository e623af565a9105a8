#include <cmath>

#include <doctest.h>

#include <Eigen/Dense>

#include "support/oracles.hpp"
#include "tswlad/errors.hpp"
#include "tswlad/estimator.hpp"

using namespace tswlad;
using tswlad::testing::normal_cdf_series;

namespace {

const SaturationSpec band{0.0, 0.0, 25.0, 25.0};

AdmissibleSet wide_box(int d, double r = 10.0) {
  return AdmissibleSet::box(Eigen::VectorXd::Zero(d),
                            Eigen::VectorXd::Constant(d, r));
}

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

} // namespace

TEST_SUITE("estimator") {

TEST_CASE("innovation: sign term alone in the interior") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  Eigen::VectorXd phi = scalar(1.0);
  const Innovation above = innovation(15.0, phi, scalar(12.0), band, g);
  CHECK(above.regime == Regime::Interior);
  CHECK(above.value == 1.0);
  const Innovation below = innovation(3.0, phi, scalar(12.0), band, g);
  CHECK(below.value == -1.0);
  const Innovation tie = innovation(12.0, phi, scalar(12.0), band, g);
  CHECK(tie.value == 0.0); // sgn(0) = 0
}

TEST_CASE("innovation: clip-regime corrections, frozen from the oracle") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  Eigen::VectorXd phi = scalar(1.0);

  // Upper regime with an exact hit: v = F(u - phi'est) = Phi(-1).
  const Innovation upper = innovation(25.0, phi, scalar(26.0), band, g);
  CHECK(upper.regime == Regime::Upper);
  CHECK(upper.value ==
        doctest::Approx(normal_cdf_series(-1.0)).epsilon(1e-12));
  CHECK(upper.value == doctest::Approx(0.15865525393145707).epsilon(1e-12));

  // Lower regime with an exact hit: v = -(1 - F(l - phi'est)) = -Phi(-1).
  const Innovation lower = innovation(0.0, phi, scalar(-1.0), band, g);
  CHECK(lower.regime == Regime::Lower);
  CHECK(lower.value == doctest::Approx(-0.15865525393145707).epsilon(1e-12));

  // Lower regime with an uncensored observation above the clip: the sign
  // term and the correction combine to Phi(1).
  const Innovation mixed = innovation(5.0, phi, scalar(-1.0), band, g);
  CHECK(mixed.value == doctest::Approx(0.8413447460685429).epsilon(1e-12));
}

TEST_CASE("property: innovation bounded by 2, sign term in {-1, 0, 1}") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(21);
  for (int trial = 0; trial < 5000; ++trial) {
    Eigen::VectorXd phi(3), est(3);
    for (int i = 0; i < 3; ++i) {
      phi[i] = 4.0 * (rng.uniform01() - 0.5);
      est[i] = 20.0 * (rng.uniform01() - 0.5);
    }
    const double y = saturate(60.0 * (rng.uniform01() - 0.5), band);
    const Innovation v = innovation(y, phi, est, band, g);
    CHECK(std::abs(v.value) <= 2.0);
  }
}

TEST_CASE("step1 gain slope: infimum radius and closed forms") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  CHECK(step1_gain_slope(g, 0.0, 0.0, 25.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(step1_gain_slope(g, 1.0, 0.0, 25.0) ==
        doctest::Approx(0.05399096651318806).epsilon(1e-12));
  // The wide-range pathology: the slope collapses to the far tail.
  const double far = step1_gain_slope(g, 10.0, 0.0, 25.0);
  CHECK(far == doctest::Approx(std::exp(-200.0) * 0.3989422804014327)
                   .epsilon(1e-10));
  CHECK(far < 1e-85);
  // Positive lower threshold stretches the radius through C + l.
  CHECK(step1_gain_slope(g, 1.0, 3.0, 25.0) == doctest::Approx(g.pdf(4.0)));
}

TEST_CASE("step2 gain slope: three-case divided differences") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  Eigen::VectorXd phi = scalar(1.0);

  // Exactly coincident estimates: the density limit.
  CHECK(step2_gain_slope(g, band, phi, scalar(3.0), scalar(3.0)) ==
        doctest::Approx(0.7978845608028654).epsilon(1e-12));
  // Below the 1e-12 gap threshold the limit is used as well.
  CHECK(step2_gain_slope(g, band, phi, scalar(3.0), scalar(3.0 + 1e-13)) ==
        doctest::Approx(2.0 * g.pdf(0.0)).epsilon(1e-12));

  // Interior, unit gap: (1 - 2 Phi(-1)) / 1.
  CHECK(step2_gain_slope(g, band, phi, scalar(1.0), scalar(2.0)) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-12));

  // Lower regime (phi'theta = -1 censors to the clip), gap toward -2:
  // [Phi(1) - Phi(2)] / (-1) = Phi(2) - Phi(1).
  CHECK(step2_gain_slope(g, band, phi, scalar(-1.0), scalar(-2.0)) ==
        doctest::Approx(0.1359051219832779).epsilon(1e-12));
  CHECK(step2_gain_slope(g, band, phi, scalar(-1.0), scalar(-2.0)) ==
        doctest::Approx(normal_cdf_series(2.0) - normal_cdf_series(1.0))
            .epsilon(1e-12));

  // Upper regime fallback at coincidence: f(u - phi'theta).
  CHECK(step2_gain_slope(g, band, phi, scalar(27.0), scalar(27.0)) ==
        doctest::Approx(g.pdf(-2.0)).epsilon(1e-12));
}

TEST_CASE("property: step2 gain slope is nonnegative") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  RngStream rng(22);
  for (int trial = 0; trial < 5000; ++trial) {
    Eigen::VectorXd phi(2), a(2), b(2);
    for (int i = 0; i < 2; ++i) {
      phi[i] = 6.0 * (rng.uniform01() - 0.5);
      a[i] = 20.0 * (rng.uniform01() - 0.5);
      b[i] = 20.0 * (rng.uniform01() - 0.5);
    }
    CHECK(step2_gain_slope(g, band, phi, a, b) >= 0.0);
  }
}

TEST_CASE("step_update: scalar arithmetic from the recursion") {
  StepState s;
  s.estimate = scalar(0.0);
  s.gain = Eigen::MatrixXd::Identity(1, 1);
  s.step_size_factor = 1.0;
  Datum d{scalar(1.0), 0.0, band, 1.0};

  const AdmissibleSet set = wide_box(1);
  const StepState out = step_update(s, d, 0.1, 0.0, set);
  CHECK(out.last_gain == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
  CHECK(out.gain(0, 0) == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
  CHECK(out.estimate[0] == 0.0);
}

TEST_CASE("step_update: zero regressor is a no-information step") {
  RngStream rng(23);
  StepState s;
  s.estimate = Eigen::VectorXd::Ones(4);
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a(i, j) = rng.gaussian();
  }
  s.gain = a.transpose() * a + Eigen::MatrixXd::Identity(4, 4);
  s.step_size_factor = 2.0;
  Datum d{Eigen::VectorXd::Zero(4), 5.0, band, 1.0};
  const StepState out = step_update(s, d, 0.3, 1.5, wide_box(4));
  CHECK(out.last_gain == doctest::Approx(0.5));
  CHECK(out.gain == s.gain);
  CHECK(out.estimate == s.estimate);
}

TEST_CASE("step_update: inverse-gain recursion identity (rank-one form)") {
  RngStream rng(24);
  const int d = 6;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a(i, j) = rng.gaussian();
    }
    StepState s;
    s.estimate = Eigen::VectorXd::Zero(d);
    s.gain = a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(d, d);
    s.step_size_factor = 0.5 + rng.uniform01();

    Eigen::VectorXd phi(d);
    for (int i = 0; i < d; ++i) phi[i] = 3.0 * rng.gaussian();
    const double beta = rng.uniform01();
    const double b = 0.2 + 0.8 * rng.uniform01();
    Datum datum{phi, 1.0, band, b};
    const StepState out = step_update(s, datum, beta, 0.7, wide_box(d, 100.0));

    const Eigen::MatrixXd expected =
        s.gain.inverse() +
        (beta * b * b / s.step_size_factor) * phi * phi.transpose();
    const Eigen::MatrixXd actual = out.gain.inverse();
    CHECK((actual - expected).norm() / expected.norm() <= 1e-8);
  }
}

TEST_CASE("step_update: smaller weight moves the estimate less when the "
          "step-size factor dominates") {
  RngStream rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 3;
    StepState s;
    s.estimate = Eigen::VectorXd::Zero(d);
    s.gain = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd phi(d);
    for (int i = 0; i < d; ++i) phi[i] = rng.gaussian();
    const double beta = 0.5 * rng.uniform01();
    // mu >= beta * phi'P phi keeps a(b)*b increasing in b.
    s.step_size_factor = beta * phi.squaredNorm() + 0.1 + rng.uniform01();
    const double v = rng.gaussian();

    Datum full{phi, 1.0, band, 1.0};
    Datum half{phi, 1.0, band, 0.5};
    const AdmissibleSet set = wide_box(d, 1000.0);
    const Eigen::VectorXd moved_full =
        step_update(s, full, beta, v, set).estimate;
    const Eigen::VectorXd moved_half =
        step_update(s, half, beta, v, set).estimate;
    if (v != 0.0) {
      CHECK(moved_half.norm() < moved_full.norm() + 1e-15);
    }
  }
}

TEST_CASE("tswlad_update: zero mean displacement at the truth") {
  // At estimate == theta the innovation mean vanishes in every regime, so
  // replaying one update with fresh noise draws has no drift.
  const int d = 3;
  Eigen::VectorXd theta(d);
  theta << 2.0, -1.0, 0.5;
  Eigen::VectorXd phi(d);
  phi << 1.5, 0.7, -0.4;
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  const AdmissibleSet set = wide_box(d);

  const int replays = 10000;
  RngStream rng(26);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(d);
  for (int r = 0; r < replays; ++r) {
    EstimatorState st =
        make_estimator_state(noise, set, 1.0, 1.0, theta, theta);
    const double y =
        saturate(phi.dot(theta) + noise.sample(rng), band);
    st = tswlad_update(std::move(st), Datum{phi, y, band, 1.0});
    const Eigen::VectorXd displacement = st.step2.estimate - theta;
    sum += displacement;
    sum_sq += displacement.cwiseProduct(displacement);
  }
  for (int i = 0; i < d; ++i) {
    const double mean = sum[i] / replays;
    const double var = sum_sq[i] / replays - mean * mean;
    const double se = std::sqrt(var / replays);
    CHECK(std::abs(mean) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("tswlad_update: trajectory invariants over a seeded run") {
  const int d = 6;
  Eigen::VectorXd theta(d);
  theta << 5.0, 0.7, 2.0, -0.1, -0.6, -8.0;
  const AdmissibleSet set = wide_box(d);
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  EstimatorState st = make_estimator_state(noise, set, 1.0, 1.0);
  CHECK(st.step1.estimate == set.centroid());

  RngStream rng(27);
  Eigen::MatrixXd previous_gain = st.step2.gain;
  for (int k = 0; k < 400; ++k) {
    Eigen::VectorXd phi(d);
    for (int i = 0; i < d; ++i) phi[i] = 3.0 * rng.gaussian();
    const double y = saturate(phi.dot(theta) + noise.sample(rng), band);
    st = tswlad_update(std::move(st), Datum{phi, y, band, 1.0});

    CHECK(st.time == k + 1);
    CHECK(set.contains(st.step1.estimate, 1e-9));
    CHECK(set.contains(st.step2.estimate, 1e-9));
    CHECK(st.step2.last_gain > 0.0);
    CHECK(st.step2.last_gain <= 1.0 / 1.0 + 1e-12);
    CHECK(st.step2.last_gain_slope >= 0.0);
    // Mathematically positive; the density infimum over the wide-box radius
    // underflows to zero in doubles.
    CHECK(st.step1.last_gain_slope >= 0.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.step2.gain);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    // Loewner ordering: the gain never grows along any direction.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diff(previous_gain -
                                                        st.step2.gain);
    CHECK(diff.eigenvalues().minCoeff() >= -1e-12);
    previous_gain = st.step2.gain;
  }
}

TEST_CASE("constant regressor-bound override feeds the step1 slope") {
  const NoiseModel g = NoiseModel::gaussian(1.0);
  EstimatorState st =
      make_estimator_state(g, wide_box(2), 1.0, 1.0);
  st.c_bound_override = 1.0;
  Eigen::VectorXd phi(2);
  phi << 4.0, -3.0; // per-step bound would be 70; the override pins R = 2
  st = tswlad_update(std::move(st), Datum{phi, 3.0, band, 1.0});
  CHECK(st.step1.last_gain_slope ==
        doctest::Approx(g.pdf(2.0)).epsilon(1e-12));
}

TEST_CASE("step1 gain slope stays strictly positive on narrow sets") {
  // On a small admissible set the infimum radius is modest and the density
  // value does not underflow.
  const NoiseModel g = NoiseModel::gaussian(1.0);
  const AdmissibleSet set = AdmissibleSet::box(
      Eigen::VectorXd::Zero(3), Eigen::VectorXd::Constant(3, 0.5));
  RngStream rng(28);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd phi(3);
    for (int i = 0; i < 3; ++i) phi[i] = 2.0 * (rng.uniform01() - 0.5);
    const double beta_bar = step1_gain_slope(
        g, regressor_bound(set, phi), band.lower_threshold,
        band.upper_threshold);
    CHECK(beta_bar > 0.0);
  }
}

TEST_CASE("initial estimates are projected into the set when outside") {
  const AdmissibleSet set = wide_box(2, 1.0);
  Eigen::VectorXd far(2);
  far << 5.0, 0.0;
  const EstimatorState st = make_estimator_state(
      NoiseModel::gaussian(1.0), set, 1.0, 1.0, far, std::nullopt);
  CHECK(st.step1.estimate[0] == doctest::Approx(1.0));
  CHECK(st.step2.estimate == set.centroid());
}

TEST_CASE("predict saturates the accelerated estimate's response") {
  EstimatorState st = make_estimator_state(
      NoiseModel::gaussian(1.0), wide_box(1, 50.0), 1.0, 1.0, scalar(0.0),
      scalar(30.0));
  CHECK(predict(st, scalar(1.0), band) == 25.0);
  st.step2.estimate = scalar(12.0);
  CHECK(predict(st, scalar(1.0), band) == 12.0);
}

TEST_CASE("state snapshot has the documented flat fields") {
  const EstimatorState st = make_estimator_state(NoiseModel::gaussian(1.0),
                                                 wide_box(2), 2.0, 3.0);
  const std::string json = snapshot_json(st);
  CHECK(json.find("\"k\":0") != std::string::npos);
  CHECK(json.find("\"mu_bar\":2.0") != std::string::npos);
  CHECK(json.find("\"mu\":3.0") != std::string::npos);
  CHECK(json.find("\"theta_bar\"") != std::string::npos);
  CHECK(json.find("\"p_bar\":[1.0,0.0,0.0,1.0]") != std::string::npos);
}

} // TEST_SUITE
