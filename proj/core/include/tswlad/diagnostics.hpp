#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tswlad/noise.hpp"
#include "tswlad/saturation.hpp"

namespace tswlad {

/// Accumulates the information matrix P0^{-1} + sum phi_i phi_i' and tracks
/// its extreme eigenvalues. Exact eigensolves run every `eig_cadence`
/// updates; refresh() forces one (callers do so at output checkpoints).
class InformationTracker {
public:
  explicit InformationTracker(Eigen::MatrixXd p0_inverse, int eig_cadence = 10);

  void update(const Eigen::VectorXd& phi);
  void refresh();

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  long count() const { return count_; }

private:
  Eigen::MatrixXd matrix_;
  int eig_cadence_;
  int since_refresh_ = 0;
  long count_ = 0;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

/// err^2 * lambda_min(k) / log(lambda_max(k) + e); the +e offset keeps the
/// ratio defined at k = 0 and does not disturb the asymptotics. Bounded
/// trajectories of this ratio are the testable face of the convergence-rate
/// bound.
double rate_ratio(const InformationTracker& tracker, double err);

/// log(lambda_max + e) / lambda_min: the excitation condition value whose
/// decay to zero is all the convergence theory needs (far weaker than
/// persistent excitation).
double excitation_ratio(const InformationTracker& tracker);

/// Single-step regret b * |y_star - y_hat| against the clairvoyant
/// predictor.
double regret_step(double y_star, double y_hat, double b);

/// Closed-form conditional mean of the innovation when the true parameter is
/// known (simulation only). Keyed on the regime of phi' estimate:
///   Lower:    F(l - phi' est) - F(l - phi' theta)
///   Interior: 1 - 2 F(phi' est - phi' theta)
///   Upper:    F(u - phi' est) - F(u - phi' theta)
/// Always in [-1, 1]; identically zero at estimate == theta.
struct PsiOracle {
  Eigen::VectorXd phi;
  Eigen::VectorXd estimate;
  Eigen::VectorXd true_parameter;
  SaturationSpec spec;
  NoiseModel noise;
};

double psi_value(const PsiOracle& oracle);

/// 1 - (1/T) sum |y - y_hat| / y over (y, y_hat) pairs; every y must be
/// strictly positive (DataError otherwise).
double sentencing_accuracy(
    std::span<const std::pair<double, double>> pairs);

/// One emitted metrics record (a CSV row).
struct MetricRow {
  long k = 0;
  double param_err = 0.0;
  double param_err_bar = 0.0;
  double regret_avg = 0.0;
  double pred_err_avg = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double rate_ratio = 0.0;
  double lyapunov = 0.0;
};

/// Streaming per-trajectory metric accumulator: feeds on per-step regret and
/// weighted absolute prediction error, emits rows at the caller's cadence.
class MetricSeries {
public:
  void observe(double regret, double weighted_abs_pred_err) {
    ++steps_;
    regret_sum_ += regret;
    pred_err_sum_ += weighted_abs_pred_err;
  }

  long steps() const { return steps_; }
  double regret_avg() const {
    return steps_ ? regret_sum_ / static_cast<double>(steps_) : 0.0;
  }
  /// Running mean of b |y - y_hat|.
  double avg_prediction_error() const {
    return steps_ ? pred_err_sum_ / static_cast<double>(steps_) : 0.0;
  }

  void emit_row(MetricRow row) { rows_.push_back(row); }
  const std::vector<MetricRow>& rows() const { return rows_; }

private:
  long steps_ = 0;
  double regret_sum_ = 0.0;
  double pred_err_sum_ = 0.0;
  std::vector<MetricRow> rows_;
};

} // namespace tswlad
