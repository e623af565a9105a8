#include "tswlad/estimator.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tswlad/errors.hpp"
#include "tswlad/projection.hpp"

#include <json.hpp>

namespace tswlad {
namespace {

double sign(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0; // sgn(0) = 0 keeps innovations unbiased at exact hits
}

} // namespace

Innovation innovation(double y, const Eigen::VectorXd& phi,
                      const Eigen::VectorXd& estimate,
                      const SaturationSpec& spec, const NoiseModel& noise) {
  if (phi.size() != estimate.size()) {
    throw ConfigError("innovation: dimension mismatch");
  }
  const double z = phi.dot(estimate);
  const Regime regime = classify_regime(z, spec);
  double v = sign(y - saturate(z, spec));
  if (regime == Regime::Upper) {
    v += noise.cdf(spec.upper_threshold - z);
  } else if (regime == Regime::Lower) {
    v -= 1.0 - noise.cdf(spec.lower_threshold - z);
  }
  return {v, regime};
}

double step1_gain_slope(const NoiseModel& noise, double c_bound,
                        double lower_threshold, double upper_threshold) {
  const double radius =
      std::max({2.0 * c_bound, c_bound + lower_threshold,
                c_bound - upper_threshold, 0.0});
  return noise.min_pdf_within(radius);
}

double step2_gain_slope(const NoiseModel& noise, const SaturationSpec& spec,
                        const Eigen::VectorXd& phi,
                        const Eigen::VectorXd& step2_estimate,
                        const Eigen::VectorXd& step1_estimate) {
  const double z = phi.dot(step2_estimate);
  const double z_bar = phi.dot(step1_estimate);
  const double gap = z_bar - z; // d_k
  // Below this scale the divided difference is numerically unstable and the
  // density limit is its analytic continuation.
  const bool degenerate = std::abs(gap) < 1e-12;

  double slope = 0.0;
  switch (classify_regime(z, spec)) {
  case Regime::Lower: {
    const double edge = spec.lower_threshold;
    slope = degenerate
                ? noise.pdf(edge - z)
                : (noise.cdf(edge - z) - noise.cdf(edge - z_bar)) / gap;
    break;
  }
  case Regime::Interior: {
    slope = degenerate ? 2.0 * noise.pdf(0.0)
                       : (1.0 - 2.0 * noise.cdf(z - z_bar)) / gap;
    break;
  }
  case Regime::Upper: {
    const double edge = spec.upper_threshold;
    slope = degenerate
                ? noise.pdf(edge - z)
                : (noise.cdf(edge - z) - noise.cdf(edge - z_bar)) / gap;
    break;
  }
  }
  // The divided difference is a CDF increment over the same gap, hence
  // nonnegative up to rounding.
  return std::max(slope, 0.0);
}

namespace {

/// Symmetrizes and, if needed, eigen-clips the updated gain. Loss of
/// definiteness beyond -1e-10 * trace is an error.
Eigen::MatrixXd repair_gain(Eigen::MatrixXd p) {
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(p);
  if (llt.info() == Eigen::Success) return p;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("gain update: eigendecomposition failed");
  }
  const double trace = p.trace();
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * std::max(trace, 0.0)) {
    std::ostringstream msg;
    msg << "gain matrix lost positive definiteness: min eigenvalue "
        << min_eig << ", trace " << trace;
    throw NumericalError(msg.str());
  }
  const double floor =
      std::max(trace, 1e-300) * 1e-14 / static_cast<double>(p.rows());
  Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
  return eig.eigenvectors() * clipped.asDiagonal() *
         eig.eigenvectors().transpose();
}

} // namespace

StepState step_update(const StepState& s, const Datum& datum,
                      double gain_slope, double innovation_value,
                      const AdmissibleSet& set) {
  if (datum.regressor.size() != s.estimate.size()) {
    throw ConfigError("step_update: dimension mismatch");
  }
  if (!(datum.weight > 0.0 && datum.weight <= 1.0)) {
    throw ConfigError("Assumption 2 violated: datum weight outside (0, 1]");
  }
  const double b = datum.weight;
  const Eigen::VectorXd p_phi = s.gain * datum.regressor;
  const double quad = datum.regressor.dot(p_phi);
  const double a =
      1.0 / (s.step_size_factor + gain_slope * b * b * quad);

  StepState out;
  out.step_size_factor = s.step_size_factor;
  out.last_gain = a;
  out.last_gain_slope = gain_slope;
  out.gain = repair_gain(
      s.gain - (a * gain_slope * b * b) * (p_phi * p_phi.transpose()));

  const Eigen::VectorXd raw = s.estimate + (a * b * innovation_value) * p_phi;
  if (set.contains(raw)) {
    out.estimate = raw;
  } else {
    // Q = (P')^{-1} obtained by solving against the identity; the explicit
    // inverse is never formed from an ill-conditioned factorization.
    Eigen::LLT<Eigen::MatrixXd> llt(out.gain);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("step_update: updated gain is not factorizable");
    }
    const Eigen::MatrixXd q_mat = llt.solve(
        Eigen::MatrixXd::Identity(out.gain.rows(), out.gain.cols()));
    out.estimate =
        project(raw, WeightMatrix::unchecked(0.5 * (q_mat + q_mat.transpose())),
                set);
  }
  return out;
}

EstimatorState make_estimator_state(
    const NoiseModel& assumed_noise, const AdmissibleSet& set, double mu_bar,
    double mu, const std::optional<Eigen::VectorXd>& initial_step1,
    const std::optional<Eigen::VectorXd>& initial_step2, double gain_scale) {
  if (!(mu_bar > 0.0) || !(mu > 0.0)) {
    throw ConfigError("step-size factors must be strictly positive");
  }
  if (!(gain_scale > 0.0)) {
    throw ConfigError("initial gain scale must be strictly positive");
  }
  assumed_noise.check_estimation_assumptions();

  const int d = set.dim();
  const auto pick_initial = [&](const std::optional<Eigen::VectorXd>& given) {
    if (!given) return set.centroid();
    if (given->size() != d) {
      throw ConfigError("initial estimate dimension mismatch");
    }
    if (set.contains(*given)) return *given;
    return project(*given, WeightMatrix::identity(d), set);
  };

  EstimatorState st;
  st.assumed_noise = assumed_noise;
  st.admissible_set = set;
  st.time = 0;
  st.step1.estimate = pick_initial(initial_step1);
  st.step1.gain = gain_scale * Eigen::MatrixXd::Identity(d, d);
  st.step1.step_size_factor = mu_bar;
  st.step2.estimate = pick_initial(initial_step2);
  st.step2.gain = st.step1.gain;
  st.step2.step_size_factor = mu;
  return st;
}

EstimatorState tswlad_update(EstimatorState st, const Datum& datum) {
  if (datum.regressor.size() != st.step1.estimate.size()) {
    throw ConfigError("tswlad_update: dimension mismatch");
  }
  const double c_bound =
      st.c_bound_override ? *st.c_bound_override
                          : regressor_bound(st.admissible_set, datum.regressor);

  // Both steps consume the same datum; the accelerated slope is taken
  // against the preliminary estimate as it stood entering this update.
  const Eigen::VectorXd step1_before = st.step1.estimate;

  const Innovation v_bar = innovation(datum.observation, datum.regressor,
                                      st.step1.estimate, datum.spec,
                                      st.assumed_noise);
  const double beta_bar =
      step1_gain_slope(st.assumed_noise, c_bound, datum.spec.lower_threshold,
                       datum.spec.upper_threshold);
  st.step1 = step_update(st.step1, datum, beta_bar, v_bar.value,
                         st.admissible_set);

  const Innovation v = innovation(datum.observation, datum.regressor,
                                  st.step2.estimate, datum.spec,
                                  st.assumed_noise);
  const double beta =
      step2_gain_slope(st.assumed_noise, datum.spec, datum.regressor,
                       st.step2.estimate, step1_before);
  st.step2 =
      step_update(st.step2, datum, beta, v.value, st.admissible_set);

  ++st.time;
  return st;
}

double predict(const EstimatorState& st, const Eigen::VectorXd& phi,
               const SaturationSpec& spec) {
  return saturate(phi.dot(st.step2.estimate), spec);
}

std::string snapshot_json(const EstimatorState& st) {
  nlohmann::json j;
  j["k"] = st.time;
  j["mu_bar"] = st.step1.step_size_factor;
  j["mu"] = st.step2.step_size_factor;
  const auto flatten = [](const Eigen::MatrixXd& m) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        v.push_back(m(r, c));
      }
    }
    return v;
  };
  j["theta_bar"] = std::vector<double>(
      st.step1.estimate.data(), st.step1.estimate.data() + st.step1.estimate.size());
  j["theta"] = std::vector<double>(
      st.step2.estimate.data(), st.step2.estimate.data() + st.step2.estimate.size());
  j["p_bar"] = flatten(st.step1.gain);
  j["p"] = flatten(st.step2.gain);
  return j.dump();
}

} // namespace tswlad
