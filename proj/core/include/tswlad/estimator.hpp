#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "tswlad/admissible_set.hpp"
#include "tswlad/noise.hpp"
#include "tswlad/simulator.hpp"

namespace tswlad {

/// One of the two coupled recursions: the current estimate, its gain matrix,
/// and the step-size factor, plus the gain scalars of the last update for
/// inspection.
struct StepState {
  Eigen::VectorXd estimate;
  Eigen::MatrixXd gain; // symmetric positive definite
  double step_size_factor = 1.0;
  double last_gain = 0.0;       // a_k of the most recent update
  double last_gain_slope = 0.0; // beta_k of the most recent update
};

/// Sign-plus-tail-correction innovation. The sign term lies in {-1, 0, 1}
/// and the correction in [-1, 1], so |value| <= 2.
struct Innovation {
  double value = 0.0;
  Regime regime = Regime::Interior;
};

/// v = sgn[y - S(phi' est)]
///     + F(u - phi' est)        when S(phi' est) lands on the upper clip
///     - (1 - F(l - phi' est))  when S(phi' est) lands on the lower clip
/// with sgn(0) = 0.
Innovation innovation(double y, const Eigen::VectorXd& phi,
                      const Eigen::VectorXd& estimate,
                      const SaturationSpec& spec, const NoiseModel& noise);

/// Preliminary-step slope: the infimum of the assumed density over
/// |x| <= max{2C, C + l, C - u, 0}. Deliberately conservative; it can be
/// vanishingly small for wide admissible sets, which is exactly why the
/// accelerated step exists.
double step1_gain_slope(const NoiseModel& noise, double c_bound,
                        double lower_threshold, double upper_threshold);

/// Accelerated-step slope: a divided difference of the assumed CDF between
/// the two current estimates, keyed on the regime of phi' step2_estimate.
/// Falls back to the density limit when |phi' (step1 - step2)| < 1e-12.
/// Always nonnegative.
double step2_gain_slope(const NoiseModel& noise, const SaturationSpec& spec,
                        const Eigen::VectorXd& phi,
                        const Eigen::VectorXd& step2_estimate,
                        const Eigen::VectorXd& step1_estimate);

/// Shared single-recursion update:
///   a  = 1 / (mu + beta b^2 phi' P phi)
///   P' = P - a beta b^2 P phi phi' P
///   estimate' = proj_{(P')^{-1}} (estimate + a b P phi v)
/// Raises NumericalError if P' loses positive definiteness beyond
/// min-eigenvalue < -1e-10 * trace; smaller excursions are symmetrized and
/// clipped.
StepState step_update(const StepState& s, const Datum& datum,
                      double gain_slope, double innovation_value,
                      const AdmissibleSet& set);

/// The full two-step online state. Both sub-states share the dimension and
/// the admissible set; `time` counts consumed data.
struct EstimatorState {
  StepState step1; // preliminary recursion
  StepState step2; // accelerated recursion
  NoiseModel assumed_noise = NoiseModel::gaussian(1.0);
  AdmissibleSet admissible_set =
      AdmissibleSet::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  long time = 0;
  /// When set, used instead of the per-step regressor bound.
  std::optional<double> c_bound_override;
};

/// Builds an initial state: estimates default to the set centroid (supplied
/// points are projected into the set under the identity norm if outside),
/// gains to gain_scale * I.
EstimatorState make_estimator_state(
    const NoiseModel& assumed_noise, const AdmissibleSet& set, double mu_bar,
    double mu,
    const std::optional<Eigen::VectorXd>& initial_step1 = std::nullopt,
    const std::optional<Eigen::VectorXd>& initial_step2 = std::nullopt,
    double gain_scale = 1.0);

/// One two-step update. Both steps consume the same datum: the preliminary
/// step uses its own innovation and density-infimum slope; the accelerated
/// step uses its own innovation and the divided-difference slope taken
/// against the preliminary estimate from *before* this update.
EstimatorState tswlad_update(EstimatorState st, const Datum& datum);

/// Adaptive predictor S(phi' theta) using the accelerated estimate.
double predict(const EstimatorState& st, const Eigen::VectorXd& phi,
               const SaturationSpec& spec);

/// Flat JSON snapshot {k, mu, mu_bar, p, p_bar, theta, theta_bar} with
/// row-major vectorized gain matrices. Field order is nlohmann's sorted-key
/// order, documented in the README CLI schema.
std::string snapshot_json(const EstimatorState& st);

} // namespace tswlad
