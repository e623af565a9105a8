#include "tswlad/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tswlad/errors.hpp"

namespace tswlad {
namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;
constexpr double inv_sqrt_2 = 0.70710678118654752440;

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-(x / sigma) * inv_sqrt_2);
}

double normal_pdf(double x, double sigma) {
  const double z = x / sigma;
  return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

} // namespace

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma > 0.0)) {
    throw ConfigError("Assumption 3 violated: gaussian noise needs sigma > 0");
  }
  NoiseModel m;
  m.kind_ = Kind::Gaussian;
  m.sigma1_ = sigma;
  m.variance_ = sigma * sigma;
  m.unimodal_symmetric_ = true;
  return m;
}

NoiseModel NoiseModel::mixture(double q, double sigma1, double sigma2) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw ConfigError(
        "Assumption 3 violated: mixture components need sigma > 0");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ConfigError("mixture weight q must lie in [0, 1]");
  }
  NoiseModel m;
  m.kind_ = Kind::Mixture;
  m.q_ = q;
  m.sigma1_ = sigma1;
  m.sigma2_ = sigma2;
  m.variance_ = (1.0 - q) * sigma1 * sigma1 + q * sigma2 * sigma2;
  // Zero-centered normal mixtures are symmetric and decreasing in |x|.
  m.unimodal_symmetric_ = true;
  return m;
}

NoiseModel NoiseModel::custom(std::function<double(double)> cdf,
                              std::function<double(double)> pdf,
                              std::function<double(RngStream&)> sampler,
                              double variance, bool unimodal_symmetric) {
  NoiseModel m;
  m.kind_ = Kind::Custom;
  m.custom_cdf_ = std::move(cdf);
  m.custom_pdf_ = std::move(pdf);
  m.custom_sampler_ = std::move(sampler);
  m.variance_ = variance;
  m.unimodal_symmetric_ = unimodal_symmetric;
  return m;
}

double NoiseModel::cdf(double x) const {
  switch (kind_) {
  case Kind::Gaussian:
    return normal_cdf(x, sigma1_);
  case Kind::Mixture:
    return (1.0 - q_) * normal_cdf(x, sigma1_) + q_ * normal_cdf(x, sigma2_);
  case Kind::Custom:
    return custom_cdf_(x);
  }
  return 0.0;
}

double NoiseModel::pdf(double x) const {
  switch (kind_) {
  case Kind::Gaussian:
    return normal_pdf(x, sigma1_);
  case Kind::Mixture:
    return (1.0 - q_) * normal_pdf(x, sigma1_) + q_ * normal_pdf(x, sigma2_);
  case Kind::Custom:
    return custom_pdf_(x);
  }
  return 0.0;
}

double NoiseModel::sample(RngStream& rng) const {
  switch (kind_) {
  case Kind::Gaussian:
    return sigma1_ * rng.gaussian();
  case Kind::Mixture: {
    const double u = rng.uniform01();
    const double z = rng.gaussian();
    return (u < q_ ? sigma2_ : sigma1_) * z;
  }
  case Kind::Custom:
    return custom_sampler_(rng);
  }
  return 0.0;
}

double NoiseModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("quantile probability must lie in (0, 1)");
  }
  constexpr double tol = 1e-10;
  constexpr int max_iter = 200;
  int iter = 0;

  // Zero-median models hit p = 1/2 immediately.
  if (std::abs(cdf(0.0) - p) <= tol) return 0.0;

  double lo = -1.0, hi = 1.0;
  while (cdf(lo) > p) {
    lo *= 2.0;
    if (++iter >= max_iter) {
      throw NumericalError("quantile bracketing did not converge");
    }
  }
  while (cdf(hi) < p) {
    hi *= 2.0;
    if (++iter >= max_iter) {
      throw NumericalError("quantile bracketing did not converge");
    }
  }
  while (iter++ < max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = cdf(mid);
    if (std::abs(fm - p) <= tol) return mid;
    if (fm < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::ostringstream msg;
  msg << "quantile bisection did not reach |F(x) - p| <= 1e-10 in " << max_iter
      << " iterations (p = " << p << ", bracket [" << lo << ", " << hi << "])";
  throw NumericalError(msg.str());
}

namespace {

/// Grid scan (4097 points) followed by trisection refinement around the best
/// grid point, for density extremum queries on models with unknown shape.
double scan_pdf(const NoiseModel& m, double radius, bool want_min) {
  constexpr int points = 4097;
  const double lo = -radius, hi = radius;
  double best_x = lo;
  double best = m.pdf(lo);
  for (int i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    const double v = m.pdf(x);
    if (want_min ? (v < best) : (v > best)) {
      best = v;
      best_x = x;
    }
  }
  const double cell = (hi - lo) / (points - 1);
  double a = std::max(lo, best_x - cell);
  double b = std::min(hi, best_x + cell);
  while (b - a > 1e-10) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    const double v1 = m.pdf(m1), v2 = m.pdf(m2);
    if (want_min ? (v1 < v2) : (v1 > v2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  const double mid = 0.5 * (a + b);
  return want_min ? std::min(best, m.pdf(mid)) : std::max(best, m.pdf(mid));
}

} // namespace

double NoiseModel::min_pdf_within(double radius) const {
  if (radius <= 0.0) return pdf(0.0);
  if (unimodal_symmetric_) return pdf(radius);
  return scan_pdf(*this, radius, /*want_min=*/true);
}

double NoiseModel::max_pdf_within(double radius) const {
  if (radius <= 0.0) return pdf(0.0);
  if (unimodal_symmetric_) return pdf(0.0);
  return scan_pdf(*this, radius, /*want_min=*/false);
}

double NoiseModel::gaussian_sigma() const {
  if (kind_ != Kind::Gaussian) {
    throw ConfigError("gaussian_sigma queried on a non-gaussian noise model");
  }
  return sigma1_;
}

void NoiseModel::check_estimation_assumptions() const {
  if (std::abs(cdf(0.0) - 0.5) > 1e-12) {
    throw ConfigError(
        "Assumption 3 violated: assumed noise must satisfy F(0) = 1/2");
  }
  const double f0 = pdf(0.0);
  if (!(f0 > 0.0) || !std::isfinite(f0)) {
    throw ConfigError(
        "Assumption 3 violated: assumed noise density must be positive and "
        "finite at the origin");
  }
}

} // namespace tswlad
