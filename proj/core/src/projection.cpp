#include "tswlad/projection.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tswlad/errors.hpp"

namespace tswlad {

WeightMatrix::WeightMatrix(Eigen::MatrixXd q) {
  if (q.rows() != q.cols() || q.rows() == 0) {
    throw ConfigError("weight matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  const double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw ConfigError("weight matrix is not symmetric within 1e-12 relative");
  }
  q_ = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q_,
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError("weight matrix is not strictly positive definite");
  }
  detect_diagonal();
}

WeightMatrix WeightMatrix::identity(int dim) {
  WeightMatrix w;
  w.q_ = Eigen::MatrixXd::Identity(dim, dim);
  w.diagonal_ = true;
  return w;
}

WeightMatrix WeightMatrix::unchecked(Eigen::MatrixXd q) {
  WeightMatrix w;
  w.q_ = std::move(q);
  w.detect_diagonal();
  return w;
}

void WeightMatrix::detect_diagonal() {
  const int d = dim();
  diagonal_ = true;
  for (int i = 0; i < d && diagonal_; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j && q_(i, j) != 0.0) {
        diagonal_ = false;
        break;
      }
    }
  }
}

double weighted_norm(const Eigen::VectorXd& x, const WeightMatrix& q) {
  if (x.size() != q.dim()) {
    throw ConfigError("weighted_norm: dimension mismatch");
  }
  return std::sqrt(std::max(0.0, x.dot(q.matrix() * x)));
}

namespace {

/// Primal active-set solve of min 0.5 (y-x)' Q (y-x) over lo <= y <= hi.
Eigen::VectorXd project_box_general(const Eigen::VectorXd& x,
                                    const Eigen::MatrixXd& q,
                                    const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd y = x.cwiseMax(lo).cwiseMin(hi);

  // -1: at lower bound, +1: at upper bound, 0: free.
  Eigen::VectorXi working = Eigen::VectorXi::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (y[i] == lo[i]) working[i] = -1;
    else if (y[i] == hi[i]) working[i] = 1;
  }

  const double qscale = q.cwiseAbs().maxCoeff();
  const double xscale =
      std::max({1.0, x.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff(),
                lo.cwiseAbs().maxCoeff()});
  const double mult_tol = 1e-12 * std::max(1.0, qscale * xscale);
  const double step_tol = 1e-13 * xscale;
  const int max_iter = 40 * d + 100;

  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd grad = q * (y - x);

    std::vector<int> free_idx;
    free_idx.reserve(d);
    for (int i = 0; i < d; ++i) {
      if (working[i] == 0) free_idx.push_back(i);
    }

    bool at_subproblem_optimum = true;
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Eigen::MatrixXd qff(nf, nf);
      Eigen::VectorXd gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf[a] = grad[free_idx[a]];
        for (int b = 0; b < nf; ++b) {
          qff(a, b) = q(free_idx[a], free_idx[b]);
        }
      }
      const Eigen::VectorXd sf = qff.ldlt().solve(-gf);
      if (sf.cwiseAbs().maxCoeff() > step_tol) {
        at_subproblem_optimum = false;
        // Ratio test: largest feasible fraction of the Newton step.
        double alpha = 1.0;
        int blocking = -1;
        int block_side = 0;
        for (int a = 0; a < nf; ++a) {
          const int i = free_idx[a];
          if (sf[a] > 0.0 && y[i] + sf[a] > hi[i]) {
            const double frac = (hi[i] - y[i]) / sf[a];
            if (frac < alpha) {
              alpha = frac;
              blocking = i;
              block_side = 1;
            }
          } else if (sf[a] < 0.0 && y[i] + sf[a] < lo[i]) {
            const double frac = (lo[i] - y[i]) / sf[a];
            if (frac < alpha) {
              alpha = frac;
              blocking = i;
              block_side = -1;
            }
          }
        }
        for (int a = 0; a < nf; ++a) {
          y[free_idx[a]] += alpha * sf[a];
        }
        if (blocking >= 0) {
          y[blocking] = block_side > 0 ? hi[blocking] : lo[blocking];
          working[blocking] = block_side;
        }
      }
    }

    if (at_subproblem_optimum) {
      // Multiplier check on the active bounds; release the worst violator.
      int release = -1;
      double worst = mult_tol;
      for (int i = 0; i < d; ++i) {
        if (working[i] == -1 && -grad[i] > worst) {
          worst = -grad[i];
          release = i;
        } else if (working[i] == 1 && grad[i] > worst) {
          worst = grad[i];
          release = i;
        }
      }
      if (release < 0) return y;
      working[release] = 0;
    }
  }

  std::ostringstream msg;
  msg << "box projection active-set solve did not converge: dim = " << d
      << ", iterations = " << max_iter
      << ", kkt residual = " << (q * (y - x)).cwiseAbs().maxCoeff();
  throw NumericalError(msg.str());
}

/// Ball projection: root-find on the multiplier of the spherical constraint
/// in the eigenbasis of Q.
Eigen::VectorXd project_ball(const Eigen::VectorXd& x,
                             const Eigen::MatrixXd& q,
                             const Eigen::VectorXd& center, double radius) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("ball projection: eigendecomposition failed");
  }
  const Eigen::VectorXd evals = eig.eigenvalues();
  const Eigen::VectorXd z = eig.eigenvectors().transpose() * (x - center);

  const auto constraint_norm = [&](double lambda) {
    double s = 0.0;
    for (int i = 0; i < z.size(); ++i) {
      const double w = evals[i] * z[i] / (evals[i] + lambda);
      s += w * w;
    }
    return std::sqrt(s);
  };

  double lo = 0.0;
  double hi = std::max(evals.maxCoeff() * z.norm() / radius, 1.0);
  int iter = 0;
  while (constraint_norm(hi) >= radius) {
    hi *= 2.0;
    if (++iter > 200) {
      throw NumericalError(
          "ball projection: failed to bracket the constraint multiplier "
          "after 200 expansions");
    }
  }
  for (iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (constraint_norm(mid) > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  const double lambda = 0.5 * (lo + hi);

  Eigen::VectorXd w(z.size());
  for (int i = 0; i < z.size(); ++i) {
    w[i] = evals[i] * z[i] / (evals[i] + lambda);
  }
  // Pin feasibility exactly; the multiplier residual stays ~1e-15 relative.
  const double wn = w.norm();
  if (wn > 0.0) w *= radius / wn;
  return center + eig.eigenvectors() * w;
}

} // namespace

Eigen::VectorXd project(const Eigen::VectorXd& x, const WeightMatrix& q,
                        const AdmissibleSet& set) {
  if (x.size() != set.dim() || q.dim() != set.dim()) {
    throw ConfigError("project: dimension mismatch");
  }
  if (set.contains(x)) return x;

  if (set.kind() == AdmissibleSet::Kind::Box) {
    const Eigen::VectorXd lo = set.lower_corner();
    const Eigen::VectorXd hi = set.upper_corner();
    // Diagonal norms separate across coordinates: clamp is exact.
    if (q.diagonal()) return x.cwiseMax(lo).cwiseMin(hi);
    return project_box_general(x, q.matrix(), lo, hi);
  }
  return project_ball(x, q.matrix(), set.center(), set.radius());
}

} // namespace tswlad
