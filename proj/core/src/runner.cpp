#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <thread>
#include <utility>

#include <Eigen/Dense>
#include <json.hpp>

#include "tswlad/baseline.hpp"
#include "tswlad/errors.hpp"
#include "tswlad/experiment.hpp"
#include "tswlad/version.hpp"

namespace tswlad {
namespace {

using nlohmann::json;

struct AlgoRun {
  bool is_baseline = false;
  EstimatorState state;
  MetricSeries series;
  std::vector<std::pair<double, double>> prediction_pairs;
  bool all_observations_positive = true;
};

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n == 1) return values[0];
  const double pos = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return values[n - 1];
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double lyapunov_value(const Eigen::VectorXd& err, const Eigen::MatrixXd& gain) {
  Eigen::LLT<Eigen::MatrixXd> llt(gain);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("lyapunov metric: gain factorization failed");
  }
  return err.dot(llt.solve(err));
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                    const Dataset* dataset) {
  const int d = cfg.dimension;
  const bool run_tswlad = cfg.algorithm != Algorithm::Baseline;
  const bool run_baseline = cfg.algorithm != Algorithm::Tswlad;

  std::vector<AlgoRun> runs;
  if (run_tswlad) {
    AlgoRun r;
    r.is_baseline = false;
    runs.push_back(std::move(r));
  }
  if (run_baseline) {
    AlgoRun r;
    r.is_baseline = true;
    runs.push_back(std::move(r));
  }
  for (AlgoRun& r : runs) {
    r.state = make_estimator_state(cfg.assumed_noise, cfg.admissible_set,
                                   cfg.mu_bar, cfg.mu, cfg.initial_theta_bar,
                                   cfg.initial_theta, cfg.gain_scale);
    r.state.c_bound_override = cfg.c_bound_override;
  }

  std::optional<TrajectorySimulator> sim;
  long horizon = cfg.horizon;
  if (const auto* src = std::get_if<SimulatedSource>(&cfg.source)) {
    SystemSpec system{cfg.theta, src->regressor, src->true_noise,
                      src->saturation};
    sim.emplace(std::move(system), seed);
  } else {
    if (static_cast<long>(dataset->rows.size()) < horizon) {
      std::ostringstream msg;
      msg << "dataset has " << dataset->rows.size()
          << " rows but system.horizon is " << horizon;
      throw ConfigError(msg.str());
    }
  }

  InformationTracker tracker(
      Eigen::MatrixXd::Identity(d, d) / cfg.gain_scale);

  for (long k = 0; k < horizon; ++k) {
    const Datum datum =
        sim ? sim->next() : dataset->rows[static_cast<std::size_t>(k)];
    const double y_star = saturate(datum.regressor.dot(cfg.theta), datum.spec);

    for (AlgoRun& r : runs) {
      const double y_hat = predict(r.state, datum.regressor, datum.spec);
      double b;
      if (dataset && dataset->has_weights) {
        b = datum.weight;
      } else {
        b = cfg.weight_policy.weight(k, y_hat);
      }
      Datum weighted = datum;
      weighted.weight = b;
      try {
        r.state = r.is_baseline ? baseline_update(std::move(r.state), weighted)
                                : tswlad_update(std::move(r.state), weighted);
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "seed " << seed << ", step " << k << ": " << e.what();
        throw NumericalError(msg.str());
      }
      r.series.observe(regret_step(y_star, y_hat, b),
                       b * std::abs(datum.observation - y_hat));
      r.prediction_pairs.emplace_back(datum.observation, y_hat);
      if (!(datum.observation > 0.0)) r.all_observations_positive = false;
    }

    tracker.update(datum.regressor);

    const long done = k + 1;
    if (done % cfg.metric_cadence == 0 || done == horizon) {
      tracker.refresh();
      for (AlgoRun& r : runs) {
        const Eigen::VectorXd err = cfg.theta - r.state.step2.estimate;
        const Eigen::VectorXd err_bar = cfg.theta - r.state.step1.estimate;
        MetricRow row;
        row.k = done;
        row.param_err = err.norm();
        row.param_err_bar = err_bar.norm();
        row.regret_avg = r.series.regret_avg();
        row.pred_err_avg = r.series.avg_prediction_error();
        row.lambda_min = tracker.lambda_min();
        row.lambda_max = tracker.lambda_max();
        row.rate_ratio = rate_ratio(tracker, row.param_err);
        row.lyapunov = lyapunov_value(err, r.state.step2.gain);
        r.series.emit_row(row);
      }
    }
  }

  SeedResult result;
  result.seed = seed;
  for (AlgoRun& r : runs) {
    AlgoResult out;
    out.final_param_err = (cfg.theta - r.state.step2.estimate).norm();
    out.final_param_err_bar = (cfg.theta - r.state.step1.estimate).norm();
    out.regret_avg = r.series.regret_avg();
    out.pred_err_avg = r.series.avg_prediction_error();
    if (!r.prediction_pairs.empty() && r.all_observations_positive) {
      out.accuracy = sentencing_accuracy(r.prediction_pairs);
    } else {
      out.accuracy = std::numeric_limits<double>::quiet_NaN();
    }
    out.state_snapshot = snapshot_json(r.state);

    if (!cfg.output_dir.empty()) {
      const std::string algo_tag = r.is_baseline ? "baseline" : "tswlad";
      std::filesystem::path path(cfg.output_dir);
      path /= cfg.name + "_" + algo_tag + "_seed" + std::to_string(seed) +
              ".csv";
      emit_csv(r.series, path.string());
      out.csv_path = path.string();
    }
    out.series = std::move(r.series);

    if (r.is_baseline) {
      result.baseline = std::move(out);
    } else {
      result.tswlad = std::move(out);
    }
  }
  return result;
}

} // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);

  std::optional<Dataset> dataset;
  if (const auto* src = std::get_if<DatasetSource>(&cfg.source)) {
    dataset = load_dataset(src->path);
    if (dataset->dimension != cfg.dimension) {
      std::ostringstream msg;
      msg << "dataset dimension " << dataset->dimension
          << " disagrees with system.dimension " << cfg.dimension;
      throw ConfigError(msg.str());
    }
  }

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
  }

  const std::size_t jobs = cfg.seeds.size();
  std::vector<SeedResult> results(jobs);
  std::vector<std::exception_ptr> failures(jobs);

  unsigned workers = cfg.parallelism == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : static_cast<unsigned>(cfg.parallelism);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs));

  const Dataset* dataset_ptr = dataset ? &*dataset : nullptr;
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) {
      results[i] = run_seed(cfg, cfg.seeds[i], dataset_ptr);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs) return;
          try {
            results[i] = run_seed(cfg, cfg.seeds[i], dataset_ptr);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  RunReport report;
  report.name = cfg.name;
  report.config_digest = config_hash(cfg);
  report.artifact_version = artifact_version;
  report.algorithm = cfg.algorithm;
  if (cfg.algorithm != Algorithm::Tswlad) {
    report.baseline_label = "TSQN-analog";
  }
  report.seeds = cfg.seeds;
  report.per_seed = std::move(results);

  const auto aggregate = [&](bool baseline) -> std::optional<Aggregate> {
    std::vector<double> errs;
    for (const SeedResult& r : report.per_seed) {
      const auto& slot = baseline ? r.baseline : r.tswlad;
      if (slot) errs.push_back(slot->final_param_err);
    }
    if (errs.empty()) return std::nullopt;
    return Aggregate{quantile(errs, 0.5), quantile(errs, 0.25),
                     quantile(errs, 0.75)};
  };
  report.tswlad_final_err = aggregate(false);
  report.baseline_final_err = aggregate(true);
  return report;
}

std::string RunReport::to_json() const {
  json j;
  j["artifact_version"] = artifact_version;
  j["config_hash"] = config_digest;
  j["name"] = name;
  j["algorithm"] = to_string(algorithm);
  if (!baseline_label.empty()) j["baseline_label"] = baseline_label;
  j["seeds"] = seeds;

  const auto algo_json = [](const AlgoResult& r) {
    json a;
    a["final_param_err"] = r.final_param_err;
    a["final_param_err_bar"] = r.final_param_err_bar;
    a["regret_avg"] = r.regret_avg;
    a["pred_err_avg"] = r.pred_err_avg;
    if (std::isnan(r.accuracy)) {
      a["accuracy"] = nullptr;
    } else {
      a["accuracy"] = r.accuracy;
    }
    if (!r.csv_path.empty()) a["csv"] = r.csv_path;
    a["state"] = json::parse(r.state_snapshot);
    return a;
  };

  json per_seed = json::array();
  for (const SeedResult& r : this->per_seed) {
    json s;
    s["seed"] = r.seed;
    if (r.tswlad) s["tswlad"] = algo_json(*r.tswlad);
    if (r.baseline) s["baseline"] = algo_json(*r.baseline);
    per_seed.push_back(s);
  }
  j["per_seed"] = per_seed;

  const auto agg_json = [](const Aggregate& a) {
    return json{{"median", a.median}, {"q25", a.q25}, {"q75", a.q75}};
  };
  json agg;
  if (tswlad_final_err) agg["tswlad_final_err"] = agg_json(*tswlad_final_err);
  if (baseline_final_err) {
    agg["baseline_final_err"] = agg_json(*baseline_final_err);
  }
  j["aggregate"] = agg;
  return j.dump(2);
}

} // namespace tswlad
