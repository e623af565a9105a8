#include "tswlad/admissible_set.hpp"

#include "tswlad/errors.hpp"

namespace tswlad {

AdmissibleSet AdmissibleSet::box(Eigen::VectorXd center,
                                 Eigen::VectorXd radii) {
  if (center.size() != radii.size() || center.size() == 0) {
    throw ConfigError("admissible box: center and radii dimensions disagree");
  }
  if ((radii.array() <= 0.0).any()) {
    throw ConfigError(
        "Assumption 1 violated: admissible box needs strictly positive radii "
        "(nonempty interior)");
  }
  AdmissibleSet s;
  s.kind_ = Kind::Box;
  s.center_ = std::move(center);
  s.radii_ = std::move(radii);
  return s;
}

AdmissibleSet AdmissibleSet::ball(Eigen::VectorXd center, double radius) {
  if (center.size() == 0) {
    throw ConfigError("admissible ball: empty center");
  }
  if (!(radius > 0.0)) {
    throw ConfigError(
        "Assumption 1 violated: admissible ball needs radius > 0 (nonempty "
        "interior)");
  }
  AdmissibleSet s;
  s.kind_ = Kind::Ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

bool AdmissibleSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != center_.size()) return false;
  if (kind_ == Kind::Box) {
    return ((x - center_).cwiseAbs().array() <= radii_.array() + tol).all();
  }
  return (x - center_).norm() <= radius_ + tol;
}

bool AdmissibleSet::strictly_inside(const Eigen::VectorXd& x,
                                    double margin) const {
  if (x.size() != center_.size()) return false;
  if (kind_ == Kind::Box) {
    return ((x - center_).cwiseAbs().array() < radii_.array() - margin).all();
  }
  return (x - center_).norm() < radius_ - margin;
}

Eigen::VectorXd AdmissibleSet::lower_corner() const {
  if (kind_ != Kind::Box) {
    throw ConfigError("lower_corner is only defined for box sets");
  }
  return center_ - radii_;
}

Eigen::VectorXd AdmissibleSet::upper_corner() const {
  if (kind_ != Kind::Box) {
    throw ConfigError("upper_corner is only defined for box sets");
  }
  return center_ + radii_;
}

double regressor_bound(const AdmissibleSet& set, const Eigen::VectorXd& phi) {
  if (phi.size() != set.dim()) {
    throw ConfigError("regressor_bound: dimension mismatch");
  }
  const double through_center = std::abs(phi.dot(set.center()));
  if (set.kind() == AdmissibleSet::Kind::Box) {
    return through_center + phi.cwiseAbs().dot(set.radii());
  }
  return through_center + set.radius() * phi.norm();
}

} // namespace tswlad
