#include "tswlad/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tswlad/errors.hpp"

namespace tswlad {

InformationTracker::InformationTracker(Eigen::MatrixXd p0_inverse,
                                       int eig_cadence)
    : matrix_(std::move(p0_inverse)), eig_cadence_(eig_cadence) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw ConfigError("information tracker: seed matrix must be square");
  }
  if (eig_cadence_ < 1) {
    throw ConfigError("information tracker: eigensolve cadence must be >= 1");
  }
  refresh();
}

void InformationTracker::update(const Eigen::VectorXd& phi) {
  if (phi.size() != matrix_.rows()) {
    throw ConfigError("information tracker: dimension mismatch");
  }
  matrix_.noalias() += phi * phi.transpose();
  ++count_;
  if (++since_refresh_ >= eig_cadence_) refresh();
}

void InformationTracker::refresh() {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix_,
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("information tracker: eigensolve failed");
  }
  lambda_min_ = eig.eigenvalues().minCoeff();
  lambda_max_ = eig.eigenvalues().maxCoeff();
  since_refresh_ = 0;
}

double rate_ratio(const InformationTracker& tracker, double err) {
  if (!(tracker.lambda_min() > 0.0)) {
    throw NumericalError("rate_ratio: lambda_min must be positive");
  }
  return err * err * tracker.lambda_min() /
         std::log(tracker.lambda_max() + std::exp(1.0));
}

double excitation_ratio(const InformationTracker& tracker) {
  if (!(tracker.lambda_min() > 0.0)) {
    throw NumericalError("excitation_ratio: lambda_min must be positive");
  }
  return std::log(tracker.lambda_max() + std::exp(1.0)) / tracker.lambda_min();
}

double regret_step(double y_star, double y_hat, double b) {
  if (!(b > 0.0 && b <= 1.0)) {
    throw ConfigError("Assumption 2 violated: regret weight outside (0, 1]");
  }
  return b * std::abs(y_star - y_hat);
}

double psi_value(const PsiOracle& oracle) {
  const double z = oracle.phi.dot(oracle.estimate);
  const double z_true = oracle.phi.dot(oracle.true_parameter);
  switch (classify_regime(z, oracle.spec)) {
  case Regime::Lower: {
    const double edge = oracle.spec.lower_threshold;
    return oracle.noise.cdf(edge - z) - oracle.noise.cdf(edge - z_true);
  }
  case Regime::Interior:
    return 1.0 - 2.0 * oracle.noise.cdf(z - z_true);
  case Regime::Upper: {
    const double edge = oracle.spec.upper_threshold;
    return oracle.noise.cdf(edge - z) - oracle.noise.cdf(edge - z_true);
  }
  }
  return 0.0;
}

double sentencing_accuracy(
    std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) {
    throw DataError("sentencing accuracy needs at least one prediction pair");
  }
  double sum = 0.0;
  std::size_t index = 0;
  for (const auto& [y, y_hat] : pairs) {
    ++index;
    if (!(y > 0.0)) {
      std::ostringstream msg;
      msg << "sentencing accuracy: observation " << index
          << " is nonpositive (" << y << ")";
      throw DataError(msg.str());
    }
    sum += std::abs(y - y_hat) / y;
  }
  return 1.0 - sum / static_cast<double>(pairs.size());
}

} // namespace tswlad
