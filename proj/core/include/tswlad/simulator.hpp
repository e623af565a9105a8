#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "tswlad/noise.hpp"
#include "tswlad/saturation.hpp"

namespace tswlad {

/// One time step of data: regressor, censored observation, the censoring
/// thresholds in force at that step, and the loss weight (in (0, 1]).
struct Datum {
  Eigen::VectorXd regressor;
  double observation = 0.0;
  SaturationSpec spec;
  double weight = 1.0;
};

/// How the per-step loss weights b_k are produced.
///
///   constant(c)           b_k = c
///   inverse_prediction()  b_k = 1 / y_hat_k, clamped into (floor, 1];
///                         predictions <= 1 (including nonpositive) give b = 1
///   sequence(values)      b_k = values[k mod len], clamped into (floor, 1]
class WeightPolicy {
public:
  static WeightPolicy constant(double value);
  static WeightPolicy inverse_prediction(double floor = 1e-6);
  static WeightPolicy sequence(std::vector<double> values,
                               double floor = 1e-6);

  /// True when the weight depends on the current prediction, which is then
  /// supplied by the caller at each step.
  bool needs_prediction() const { return kind_ == Kind::InversePrediction; }

  double weight(long step, double prediction) const;

  enum class Kind { Constant, InversePrediction, Sequence };
  Kind kind() const { return kind_; }
  double constant_value() const { return value_; }
  const std::vector<double>& values() const { return values_; }

private:
  WeightPolicy() = default;
  Kind kind_ = Kind::Constant;
  double value_ = 1.0;
  double floor_ = 1e-6;
  std::vector<double> values_;
};

/// Per-component state-noise scales sigma_j(k) = sigma[j] / (k+1)^decay[j],
/// applied to the innovation of the AR recursion phi_{k+1} = A phi_k + v_{k+1}.
struct StateNoiseSpec {
  Eigen::VectorXd sigma;
  Eigen::VectorXd decay_exponent;

  double scale_at(int component, long k) const {
    const double e = decay_exponent[component];
    if (e == 0.0) return sigma[component];
    return sigma[component] / std::pow(static_cast<double>(k + 1), e);
  }
};

/// AR(1) regressor process started from phi_0 = 0. When design_seed is set
/// the phi-stream is drawn from its own stream, frozen across replicates
/// (a fixed design); the observation noise still varies per replicate.
struct ArProcess {
  Eigen::MatrixXd transition;
  StateNoiseSpec noise;
  std::optional<std::uint64_t> design_seed;
};

/// Regressors given explicitly (phi_k = vectors[k]).
struct ExplicitDesign {
  std::vector<Eigen::VectorXd> vectors;
};

using RegressorProcess = std::variant<ArProcess, ExplicitDesign>;

/// Per-step saturation thresholds: a constant spec or a function of k.
class SaturationSchedule {
public:
  SaturationSchedule() : constant_{} {}
  /*implicit*/ SaturationSchedule(SaturationSpec constant)
      : constant_(constant) {}
  explicit SaturationSchedule(std::function<SaturationSpec(long)> fn)
      : fn_(std::move(fn)) {}

  SaturationSpec at(long k) const { return fn_ ? fn_(k) : constant_; }
  bool is_constant() const { return !fn_; }

private:
  SaturationSpec constant_;
  std::function<SaturationSpec(long)> fn_;
};

/// Ground-truth description of the data-generating system.
struct SystemSpec {
  Eigen::VectorXd true_parameter;
  RegressorProcess regressor;
  NoiseModel true_noise = NoiseModel::gaussian(1.0);
  SaturationSchedule saturation;
};

/// Streaming generator for y_{k+1} = S_k(phi_k' theta + eps_{k+1}).
///
/// Draw order per step, fixed for reproducibility: one noise sample for
/// eps_{k+1}, then (AR designs) d gaussian draws for the state innovation.
class TrajectorySimulator {
public:
  TrajectorySimulator(SystemSpec system, std::uint64_t seed);

  Datum next();
  long step() const { return step_; }
  const Eigen::VectorXd& state() const { return phi_; }

private:
  SystemSpec system_;
  RngStream noise_stream_;
  std::optional<RngStream> design_stream_;
  Eigen::VectorXd phi_;
  long step_ = 0;
};

/// Simulates `horizon` steps; deterministic given the seed.
std::vector<Datum> simulate_trajectory(const SystemSpec& system, long horizon,
                                       std::uint64_t seed);

} // namespace tswlad
