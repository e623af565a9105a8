#pragma once

#include <Eigen/Core>

#include "tswlad/admissible_set.hpp"

namespace tswlad {

/// Symmetric positive definite matrix defining the projection norm
/// ||x||_Q = sqrt(x' Q x). The checked constructor rejects asymmetry beyond
/// 1e-12 relative and any non-positive eigenvalue; unchecked() skips both
/// for matrices whose definiteness is already established (the estimator's
/// inverse gains).
class WeightMatrix {
public:
  explicit WeightMatrix(Eigen::MatrixXd q);

  static WeightMatrix identity(int dim);
  static WeightMatrix unchecked(Eigen::MatrixXd q);

  const Eigen::MatrixXd& matrix() const { return q_; }
  int dim() const { return static_cast<int>(q_.rows()); }
  bool diagonal() const { return diagonal_; }

private:
  WeightMatrix() = default;
  void detect_diagonal();

  Eigen::MatrixXd q_;
  bool diagonal_ = false;
};

/// sqrt(x' Q x); zero iff x = 0.
double weighted_norm(const Eigen::VectorXd& x, const WeightMatrix& q);

/// The Q-norm projection of x onto the admissible set: the unique minimizer
/// of ||x - y||_Q over y in the set. Returns x itself (exactly) when x is
/// already inside.
///
/// Boxes with diagonal Q reduce to a per-coordinate clamp; general Q on a
/// box runs a primal active-set solve; balls solve a one-dimensional
/// root-find on the multiplier of the spherical constraint. KKT residuals
/// are driven to ~1e-10; non-convergence raises NumericalError with an
/// iteration trace.
Eigen::VectorXd project(const Eigen::VectorXd& x, const WeightMatrix& q,
                        const AdmissibleSet& set);

} // namespace tswlad
