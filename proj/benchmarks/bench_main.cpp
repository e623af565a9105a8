#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "tswlad/baseline.hpp"
#include "tswlad/experiment.hpp"
#include "tswlad/projection.hpp"

using namespace tswlad;

namespace {

const SaturationSpec band{0.0, 0.0, 25.0, 25.0};

EstimatorState benchmark_state() {
  return make_estimator_state(
      NoiseModel::gaussian(1.0),
      AdmissibleSet::box(Eigen::VectorXd::Zero(6),
                         Eigen::VectorXd::Constant(6, 10.0)),
      1.0, 1.0);
}

std::vector<Datum> benchmark_data(long n) {
  const ExperimentConfig cfg = preset("table1").at(0);
  const auto& src = std::get<SimulatedSource>(cfg.source);
  SystemSpec system{cfg.theta, src.regressor, src.true_noise, src.saturation};
  return simulate_trajectory(system, n, 1);
}

void BM_SimulateStep(benchmark::State& state) {
  const ExperimentConfig cfg = preset("table1").at(0);
  const auto& src = std::get<SimulatedSource>(cfg.source);
  SystemSpec system{cfg.theta, src.regressor, src.true_noise, src.saturation};
  TrajectorySimulator sim(system, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.next());
  }
}
BENCHMARK(BM_SimulateStep);

void BM_TswladUpdate(benchmark::State& state) {
  const auto data = benchmark_data(4096);
  EstimatorState st = benchmark_state();
  std::size_t i = 0;
  for (auto _ : state) {
    st = tswlad_update(std::move(st), data[i++ & 4095]);
  }
  benchmark::DoNotOptimize(st.step2.estimate);
}
BENCHMARK(BM_TswladUpdate);

void BM_BaselineUpdate(benchmark::State& state) {
  const auto data = benchmark_data(4096);
  EstimatorState st = benchmark_state();
  std::size_t i = 0;
  for (auto _ : state) {
    st = baseline_update(std::move(st), data[i++ & 4095]);
  }
  benchmark::DoNotOptimize(st.step2.estimate);
}
BENCHMARK(BM_BaselineUpdate);

void BM_ProjectBoxGeneralNorm(benchmark::State& state) {
  RngStream rng(5);
  const int d = 6;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.gaussian();
  }
  const WeightMatrix q(a.transpose() * a +
                       0.1 * Eigen::MatrixXd::Identity(d, d));
  const AdmissibleSet set = AdmissibleSet::box(
      Eigen::VectorXd::Zero(d), Eigen::VectorXd::Constant(d, 1.0));
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x[i] = 4.0 * (rng.uniform01() - 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project(x, q, set));
  }
}
BENCHMARK(BM_ProjectBoxGeneralNorm);

void BM_ProjectBall(benchmark::State& state) {
  RngStream rng(6);
  const int d = 6;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.gaussian();
  }
  const WeightMatrix q(a.transpose() * a +
                       0.1 * Eigen::MatrixXd::Identity(d, d));
  const AdmissibleSet set =
      AdmissibleSet::ball(Eigen::VectorXd::Zero(d), 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project(x, q, set));
  }
}
BENCHMARK(BM_ProjectBall);

void BM_SaturatedMeanGaussian(benchmark::State& state) {
  const SaturatedMeanModel model{NoiseModel::gaussian(1.0), band};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saturated_mean(x, model));
    x += 0.001;
    if (x > 25.0) x = 0.0;
  }
}
BENCHMARK(BM_SaturatedMeanGaussian);

void BM_SaturatedMeanMixture(benchmark::State& state) {
  const SaturatedMeanModel model{
      NoiseModel::mixture(0.2, 1.0, 3.0), band};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saturated_mean(x, model));
    x += 0.001;
    if (x > 25.0) x = 0.0;
  }
}
BENCHMARK(BM_SaturatedMeanMixture);

void BM_SaturatedMeanQuadrature(benchmark::State& state) {
  // Custom models take the panelized adaptive-quadrature path.
  const NoiseModel laplace = NoiseModel::custom(
      [](double t) {
        return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
      },
      [](double t) { return 0.5 * std::exp(-std::abs(t)); },
      [](RngStream& rng) { return rng.gaussian(); }, 2.0, true);
  const SaturatedMeanModel model{laplace, band};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saturated_mean(x, model));
    x += 0.001;
    if (x > 25.0) x = 0.0;
  }
}
BENCHMARK(BM_SaturatedMeanQuadrature);

void BM_NoiseQuantile(benchmark::State& state) {
  const NoiseModel mix = NoiseModel::mixture(0.2, 1.0, 3.0);
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mix.quantile(p));
    p += 0.001;
    if (p > 0.99) p = 0.01;
  }
}
BENCHMARK(BM_NoiseQuantile);

} // namespace

BENCHMARK_MAIN();
