#include "tswlad/baseline.hpp"

#include <cmath>

#include "tswlad/errors.hpp"
#include "tswlad/quadrature.hpp"

namespace tswlad {

namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;

double normal_pdf_scaled(double t, double sigma) {
  const double z = t / sigma;
  return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

/// integral over [lo, hi] of t f(t) dt for one N(0, sigma^2) component:
/// sigma^2 (f(lo) - f(hi)).
double gaussian_partial_moment(double lo, double hi, double sigma) {
  return sigma * sigma *
         (normal_pdf_scaled(lo, sigma) - normal_pdf_scaled(hi, sigma));
}

} // namespace

double saturated_mean(double x, const SaturatedMeanModel& model) {
  const double lo = model.spec.lower_threshold - x;
  const double hi = model.spec.upper_threshold - x;
  const double lower_mass = model.noise.cdf(lo);
  const double upper_mass = 1.0 - model.noise.cdf(hi);
  double interior = 0.0;
  if (hi > lo) {
    const double mass = model.noise.cdf(hi) - lower_mass;
    if (model.noise.is_gaussian()) {
      interior = x * mass +
                 gaussian_partial_moment(lo, hi, model.noise.gaussian_sigma());
    } else if (model.noise.is_mixture()) {
      // Componentwise closed form keeps the mixture path exact.
      const double q = model.noise.mixture_q();
      interior =
          x * mass +
          (1.0 - q) *
              gaussian_partial_moment(lo, hi, model.noise.mixture_sigma1()) +
          q * gaussian_partial_moment(lo, hi, model.noise.mixture_sigma2());
    } else {
      // Panelize before refining: the integrand mass can concentrate near an
      // endpoint far outside the density's bulk, where a single top-level
      // Simpson estimate would accept a spurious near-zero.
      constexpr int panels = 32;
      const double width = (hi - lo) / panels;
      for (int p = 0; p < panels; ++p) {
        const double a = lo + p * width;
        const double b = p + 1 == panels ? hi : a + width;
        interior += adaptive_simpson(
            [&](double t) { return (x + t) * model.noise.pdf(t); }, a, b,
            1e-10 / panels);
      }
    }
  }
  return model.spec.lower_clip * lower_mass +
         model.spec.upper_clip * upper_mass + interior;
}

double saturated_mean_slope(double x, const SaturatedMeanModel& model) {
  return model.noise.cdf(model.spec.upper_threshold - x) -
         model.noise.cdf(model.spec.lower_threshold - x);
}

namespace {

/// inf of G' over |z| <= radius. G' is single-peaked at the midpoint of the
/// observable range for symmetric unimodal noise, so the infimum sits at an
/// endpoint; other models fall back to a grid scan.
double min_slope_within(const SaturatedMeanModel& model, double radius) {
  if (radius <= 0.0) return saturated_mean_slope(0.0, model);
  if (model.noise.unimodal_symmetric()) {
    return std::min(saturated_mean_slope(-radius, model),
                    saturated_mean_slope(radius, model));
  }
  constexpr int points = 4097;
  double best = saturated_mean_slope(-radius, model);
  for (int i = 1; i < points; ++i) {
    const double z =
        -radius + 2.0 * radius * static_cast<double>(i) / (points - 1);
    best = std::min(best, saturated_mean_slope(z, model));
  }
  return best;
}

} // namespace

EstimatorState baseline_update(EstimatorState st, const Datum& datum) {
  if (datum.regressor.size() != st.step1.estimate.size()) {
    throw ConfigError("baseline_update: dimension mismatch");
  }
  const double c_bound =
      st.c_bound_override ? *st.c_bound_override
                          : regressor_bound(st.admissible_set, datum.regressor);
  const double radius =
      std::max({2.0 * c_bound, c_bound + datum.spec.lower_threshold,
                c_bound - datum.spec.upper_threshold, 0.0});
  const SaturatedMeanModel model{st.assumed_noise, datum.spec};

  const Eigen::VectorXd step1_before = st.step1.estimate;

  const double v_bar =
      datum.observation -
      saturated_mean(datum.regressor.dot(st.step1.estimate), model);
  const double beta_bar = min_slope_within(model, radius);
  st.step1 =
      step_update(st.step1, datum, beta_bar, v_bar, st.admissible_set);

  const double z = datum.regressor.dot(st.step2.estimate);
  const double z_bar = datum.regressor.dot(step1_before);
  const double gap = z_bar - z;
  const double v = datum.observation - saturated_mean(z, model);
  double beta;
  if (std::abs(gap) < 1e-12) {
    beta = saturated_mean_slope(z, model);
  } else {
    beta = (saturated_mean(z_bar, model) - saturated_mean(z, model)) / gap;
  }
  beta = std::max(beta, 0.0); // G nondecreasing
  st.step2 = step_update(st.step2, datum, beta, v, st.admissible_set);

  ++st.time;
  return st;
}

} // namespace tswlad
