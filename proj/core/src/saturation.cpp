#include "tswlad/saturation.hpp"

#include <sstream>

#include "tswlad/errors.hpp"

namespace tswlad {

void SaturationSpec::validate() const {
  if (!(lower_clip <= lower_threshold && lower_threshold <= upper_threshold &&
        upper_threshold <= upper_clip)) {
    std::ostringstream msg;
    msg << "Assumption 2 violated: saturation thresholds must satisfy "
           "L <= l <= u <= U, got ["
        << lower_clip << ", " << lower_threshold << ", " << upper_threshold
        << ", " << upper_clip << "]";
    throw ConfigError(msg.str());
  }
  if (lower_clip == lower_threshold && lower_threshold == upper_threshold &&
      upper_threshold == upper_clip) {
    throw ConfigError(
        "Assumption 2 violated: saturation spec is fully degenerate "
        "(L = l = u = U)");
  }
}

SaturationSpec SaturationSpec::checked(double lower_clip,
                                       double lower_threshold,
                                       double upper_threshold,
                                       double upper_clip) {
  SaturationSpec spec{lower_clip, lower_threshold, upper_threshold,
                      upper_clip};
  spec.validate();
  return spec;
}

std::string to_string(Regime r) {
  switch (r) {
  case Regime::Lower:
    return "lower";
  case Regime::Interior:
    return "interior";
  case Regime::Upper:
    return "upper";
  }
  return "?";
}

double saturate(double x, const SaturationSpec& spec) {
  if (x < spec.lower_threshold) return spec.lower_clip;
  if (x > spec.upper_threshold) return spec.upper_clip;
  return x;
}

Regime classify_regime(double x, const SaturationSpec& spec) {
  const double s = saturate(x, spec);
  if (s == spec.lower_clip) return Regime::Lower;
  if (s == spec.upper_clip) return Regime::Upper;
  return Regime::Interior;
}

} // namespace tswlad
