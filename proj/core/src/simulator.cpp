#include "tswlad/simulator.hpp"

#include <cmath>
#include <sstream>

#include "tswlad/errors.hpp"

namespace tswlad {

WeightPolicy WeightPolicy::constant(double value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw ConfigError(
        "Assumption 2 violated: constant weight must lie in (0, 1]");
  }
  WeightPolicy p;
  p.kind_ = Kind::Constant;
  p.value_ = value;
  return p;
}

WeightPolicy WeightPolicy::inverse_prediction(double floor) {
  if (!(floor > 0.0 && floor < 1.0)) {
    throw ConfigError("inverse-prediction weight floor must lie in (0, 1)");
  }
  WeightPolicy p;
  p.kind_ = Kind::InversePrediction;
  p.floor_ = floor;
  return p;
}

WeightPolicy WeightPolicy::sequence(std::vector<double> values, double floor) {
  if (values.empty()) {
    throw ConfigError("weight sequence must be nonempty");
  }
  for (double v : values) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw ConfigError(
          "Assumption 2 violated: weight sequence values must lie in (0, 1]");
    }
  }
  WeightPolicy p;
  p.kind_ = Kind::Sequence;
  p.values_ = std::move(values);
  p.floor_ = floor;
  return p;
}

double WeightPolicy::weight(long step, double prediction) const {
  switch (kind_) {
  case Kind::Constant:
    return value_;
  case Kind::InversePrediction:
    // Nonpositive or sub-unit predictions give full weight; otherwise the
    // reciprocal, floored away from zero.
    if (prediction <= 1.0) return 1.0;
    return std::max(1.0 / prediction, floor_);
  case Kind::Sequence: {
    const auto n = static_cast<long>(values_.size());
    const double v = values_[static_cast<std::size_t>(step % n)];
    return std::max(v, floor_);
  }
  }
  return 1.0;
}

namespace {

void validate_system(const SystemSpec& system) {
  const auto d = system.true_parameter.size();
  if (d == 0) {
    throw ConfigError("system: true parameter is empty");
  }
  if (const auto* ar = std::get_if<ArProcess>(&system.regressor)) {
    if (ar->transition.rows() != d || ar->transition.cols() != d) {
      std::ostringstream msg;
      msg << "system: transition matrix is " << ar->transition.rows() << "x"
          << ar->transition.cols() << " but the parameter dimension is " << d;
      throw ConfigError(msg.str());
    }
    if (ar->noise.sigma.size() != d || ar->noise.decay_exponent.size() != d) {
      throw ConfigError(
          "system: state-noise description does not match the parameter "
          "dimension");
    }
    if ((ar->noise.sigma.array() < 0.0).any()) {
      throw ConfigError("system: state-noise scales must be nonnegative");
    }
  } else {
    const auto& design = std::get<ExplicitDesign>(system.regressor);
    for (const auto& v : design.vectors) {
      if (v.size() != d) {
        throw ConfigError(
            "system: explicit design vector dimension mismatch");
      }
    }
  }
}

} // namespace

TrajectorySimulator::TrajectorySimulator(SystemSpec system, std::uint64_t seed)
    : system_(std::move(system)), noise_stream_(seed) {
  validate_system(system_);
  phi_ = Eigen::VectorXd::Zero(system_.true_parameter.size());
  if (const auto* ar = std::get_if<ArProcess>(&system_.regressor)) {
    if (ar->design_seed) {
      design_stream_.emplace(*ar->design_seed);
    }
  } else {
    const auto& design = std::get<ExplicitDesign>(system_.regressor);
    if (design.vectors.empty()) {
      throw ConfigError("system: explicit design is empty");
    }
    phi_ = design.vectors.front();
  }
}

Datum TrajectorySimulator::next() {
  const SaturationSpec spec = system_.saturation.at(step_);
  const double eps = system_.true_noise.sample(noise_stream_);
  const double y =
      saturate(phi_.dot(system_.true_parameter) + eps, spec);
  Datum datum{phi_, y, spec, 1.0};

  if (const auto* ar = std::get_if<ArProcess>(&system_.regressor)) {
    RngStream& stream = design_stream_ ? *design_stream_ : noise_stream_;
    Eigen::VectorXd v(phi_.size());
    for (int j = 0; j < phi_.size(); ++j) {
      v[j] = ar->noise.scale_at(j, step_) * stream.gaussian();
    }
    phi_ = ar->transition * phi_ + v;
  } else {
    const auto& design = std::get<ExplicitDesign>(system_.regressor);
    const auto next_index = static_cast<std::size_t>(step_ + 1);
    if (next_index < design.vectors.size()) {
      phi_ = design.vectors[next_index];
    } else {
      phi_.setZero(); // design exhausted; only valid up to its length
    }
  }
  ++step_;
  return datum;
}

std::vector<Datum> simulate_trajectory(const SystemSpec& system, long horizon,
                                       std::uint64_t seed) {
  if (horizon < 0) {
    throw ConfigError("horizon must be nonnegative");
  }
  if (const auto* design = std::get_if<ExplicitDesign>(&system.regressor)) {
    if (static_cast<long>(design->vectors.size()) < horizon) {
      throw ConfigError("explicit design shorter than the requested horizon");
    }
  }
  TrajectorySimulator sim(system, seed);
  std::vector<Datum> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (long k = 0; k < horizon; ++k) {
    out.push_back(sim.next());
  }
  return out;
}

} // namespace tswlad
