#pragma once

#include "tswlad/estimator.hpp"

namespace tswlad {

/// Mean-observation model under censoring: G(x) = E[S(x + eps)].
struct SaturatedMeanModel {
  NoiseModel noise;
  SaturationSpec spec;
};

/// G(x) = L F(l-x) + U (1 - F(u-x)) + integral_{l-x}^{u-x} (x+t) f(t) dt.
/// Gaussian noise uses the closed form for the partial first moment;
/// any other model integrates by adaptive quadrature to 1e-10.
double saturated_mean(double x, const SaturatedMeanModel& model);

/// G'(x) = F(u-x) - F(l-x), in [0, 1].
double saturated_mean_slope(double x, const SaturatedMeanModel& model);

/// One update of the l2-based two-step comparison algorithm (a declared
/// reconstruction of the prior quasi-Newton scheme; labeled "TSQN-analog"
/// in all outputs). Same projected two-step skeleton as tswlad_update, with
/// the innovation y - G(phi' estimate) and slopes taken from G instead of
/// the CDF corrections.
EstimatorState baseline_update(EstimatorState st, const Datum& datum);

} // namespace tswlad
