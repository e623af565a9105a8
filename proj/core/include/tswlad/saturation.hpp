#pragma once

#include <string>

namespace tswlad {

/// Output censoring map for one time step.
///
/// A reading x is observed exactly inside [lower_threshold, upper_threshold];
/// outside that range only the clip constants are reported:
///
///   S(x) = lower_clip   if x <  lower_threshold
///   S(x) = x            if lower_threshold <= x <= upper_threshold
///   S(x) = upper_clip   if x >  upper_threshold
///
/// Valid specs satisfy lower_clip <= lower_threshold <= upper_threshold <=
/// upper_clip and are not fully degenerate (all four equal).
struct SaturationSpec {
  double lower_clip = 0.0;      // L
  double lower_threshold = 0.0; // l
  double upper_threshold = 0.0; // u
  double upper_clip = 0.0;      // U

  /// Throws ConfigError when the ordering or non-degeneracy constraint fails.
  void validate() const;

  static SaturationSpec checked(double lower_clip, double lower_threshold,
                                double upper_threshold, double upper_clip);

  /// True when the map has no jumps (L == l and u == U), and is then
  /// 1-Lipschitz.
  bool continuous() const {
    return lower_clip == lower_threshold && upper_threshold == upper_clip;
  }
};

/// Which branch of the saturation map an input lands in. Exactly one regime
/// per input; ties at the boundary of a continuous spec resolve to
/// Lower/Upper (Lower checked first).
enum class Regime { Lower, Interior, Upper };

std::string to_string(Regime r);

/// The censoring map itself. Total and nondecreasing in x.
double saturate(double x, const SaturationSpec& spec);

/// Regime of x, keyed on the value of saturate(x): Lower iff S(x) equals the
/// lower clip, else Upper iff S(x) equals the upper clip, else Interior.
Regime classify_regime(double x, const SaturationSpec& spec);

} // namespace tswlad
