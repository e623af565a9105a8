#pragma once

#include <Eigen/Core>

namespace tswlad {

/// Known convex compact set the true parameter lives in. Estimates are
/// projected back into it after every update. Boxes are axis-aligned
/// (center +/- radii); balls are Euclidean.
class AdmissibleSet {
public:
  enum class Kind { Box, Ball };

  static AdmissibleSet box(Eigen::VectorXd center, Eigen::VectorXd radii);
  static AdmissibleSet ball(Eigen::VectorXd center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::VectorXd& radii() const { return radii_; } // box only
  double radius() const { return radius_; }               // ball only

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

  /// True when x keeps at least `margin` distance from the boundary
  /// (per-coordinate for boxes). Used to check interiority.
  bool strictly_inside(const Eigen::VectorXd& x, double margin) const;

  Eigen::VectorXd centroid() const { return center_; }

  Eigen::VectorXd lower_corner() const; // box only
  Eigen::VectorXd upper_corner() const; // box only

private:
  AdmissibleSet() = default;
  Kind kind_ = Kind::Box;
  Eigen::VectorXd center_;
  Eigen::VectorXd radii_;
  double radius_ = 0.0;
};

/// Exact value of sup_{x in D} |phi' x|.
/// Box: |phi' c| + sum_i |phi_i| r_i.  Ball: |phi' c| + radius * ||phi||.
double regressor_bound(const AdmissibleSet& set, const Eigen::VectorXd& phi);

} // namespace tswlad
