#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tswlad/admissible_set.hpp"
#include "tswlad/diagnostics.hpp"
#include "tswlad/estimator.hpp"
#include "tswlad/simulator.hpp"

namespace tswlad {

enum class Algorithm { Tswlad, Baseline, Both };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

/// Data produced by simulating the configured system.
struct SimulatedSource {
  RegressorProcess regressor;
  NoiseModel true_noise = NoiseModel::gaussian(1.0);
  SaturationSchedule saturation;
};

/// Data read from a censored-observation dataset file.
struct DatasetSource {
  std::string path;
};

using DataSource = std::variant<SimulatedSource, DatasetSource>;

/// Full declarative description of one experiment: system, estimator
/// configuration, and run plan. Parsed from a versioned JSON file; unknown
/// keys are rejected.
struct ExperimentConfig {
  int version = 1;
  std::string name = "experiment";

  // system block
  int dimension = 0;
  Eigen::VectorXd theta;
  long horizon = 0;
  DataSource source;

  // estimator block
  Algorithm algorithm = Algorithm::Both;
  NoiseModel assumed_noise = NoiseModel::gaussian(1.0);
  AdmissibleSet admissible_set =
      AdmissibleSet::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  double mu_bar = 1.0;
  double mu = 1.0;
  WeightPolicy weight_policy = WeightPolicy::constant(1.0);
  std::optional<Eigen::VectorXd> initial_theta_bar;
  std::optional<Eigen::VectorXd> initial_theta;
  double gain_scale = 1.0;
  std::optional<double> c_bound_override;

  // run block
  std::vector<std::uint64_t> seeds;
  int parallelism = 1; // 0 = all hardware threads
  std::string output_dir;
  int metric_cadence = 10;
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Checks every setup-level constraint; failures name the violated
/// assumption in the ConfigError message.
void validate_config(const ExperimentConfig& cfg);

/// Canonical JSON serialization (sorted keys) and its 64-bit FNV-1a hash.
std::string config_to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

/// Built-in experiment presets. "table1" expands to one variant per
/// contamination level; "fig-regret" and "sentencing-demo" are single
/// configurations.
std::vector<ExperimentConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

/// A censored-observation dataset: rows of (phi, y, per-row thresholds,
/// optional weight). Schema: header phi_0..phi_{d-1}, y, L, l, u, U [, b].
struct Dataset {
  std::vector<Datum> rows;
  int dimension = 0;
  bool has_weights = false;
};

/// Loads and checks a dataset file. Malformed rows and threshold violations
/// raise DataError with the offending line number.
Dataset load_dataset(const std::string& path);
void write_dataset(const std::string& path, std::span<const Datum> rows,
                   bool with_weights);

/// Writes the metric rows with the fixed column set
/// k, param_err, param_err_bar, regret_avg, pred_err_avg, lambda_min,
/// lambda_max, rate_ratio, lyapunov as decimal text with 17 significant
/// digits.
void emit_csv(const MetricSeries& series, const std::string& path);

/// Per-algorithm outcome of one replicate.
struct AlgoResult {
  double final_param_err = 0.0;
  double final_param_err_bar = 0.0;
  double regret_avg = 0.0;
  double pred_err_avg = 0.0;
  double accuracy = 0.0; // NaN when any observation is nonpositive
  MetricSeries series;
  std::string state_snapshot;
  std::string csv_path;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::optional<AlgoResult> tswlad;
  std::optional<AlgoResult> baseline;
};

struct Aggregate {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct RunReport {
  std::string name;
  std::string config_digest;
  std::string artifact_version;
  std::string baseline_label; // "TSQN-analog" whenever the baseline ran
  Algorithm algorithm = Algorithm::Both;
  std::vector<std::uint64_t> seeds;
  std::vector<SeedResult> per_seed;
  std::optional<Aggregate> tswlad_final_err;
  std::optional<Aggregate> baseline_final_err;

  std::string to_json() const;
};

/// Runs every configured seed (optionally across worker threads), feeding
/// all selected algorithms one identical datum stream per seed, and writes
/// CSV series under output_dir when it is set. Numerical failures are
/// annotated with seed and step index.
RunReport run_experiment(const ExperimentConfig& cfg);

} // namespace tswlad
