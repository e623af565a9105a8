#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "tswlad/errors.hpp"
#include "tswlad/experiment.hpp"

namespace tswlad {

using nlohmann::json;

std::string to_string(Algorithm a) {
  switch (a) {
  case Algorithm::Tswlad:
    return "tswlad";
  case Algorithm::Baseline:
    return "baseline";
  case Algorithm::Both:
    return "both";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "tswlad") return Algorithm::Tswlad;
  if (s == "baseline") return Algorithm::Baseline;
  if (s == "both") return Algorithm::Both;
  throw ConfigError("unknown algorithm '" + s +
                    "' (expected tswlad, baseline, or both)");
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

const json& require(const json& j, const char* key,
                    const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("missing key '" + std::string(key) + "' in " + context);
  }
  return *it;
}

Eigen::VectorXd to_vector(const json& j, const std::string& context) {
  if (!j.is_array()) {
    throw ConfigError(context + " must be an array of numbers");
  }
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) {
      throw ConfigError(context + " must contain only numbers");
    }
    v[i++] = e.get<double>();
  }
  return v;
}

Eigen::MatrixXd to_matrix(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(context + " must be a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = to_vector(j[static_cast<std::size_t>(r)],
                                          context + " row");
    if (r == 0) {
      m.resize(rows, row.size());
    } else if (row.size() != m.cols()) {
      throw ConfigError(context + " rows have inconsistent lengths");
    }
    m.row(r) = row;
  }
  return m;
}

NoiseModel parse_noise(const json& j, const std::string& context) {
  check_keys(j, {"type", "sigma", "q", "sigma1", "sigma2"}, context);
  const std::string type = require(j, "type", context).get<std::string>();
  if (type == "gaussian") {
    check_keys(j, {"type", "sigma"}, context);
    return NoiseModel::gaussian(require(j, "sigma", context).get<double>());
  }
  if (type == "mixture") {
    check_keys(j, {"type", "q", "sigma1", "sigma2"}, context);
    return NoiseModel::mixture(require(j, "q", context).get<double>(),
                               require(j, "sigma1", context).get<double>(),
                               require(j, "sigma2", context).get<double>());
  }
  throw ConfigError("unknown noise type '" + type + "' in " + context);
}

SaturationSpec parse_saturation(const json& j) {
  check_keys(j, {"lower_clip", "lower_threshold", "upper_threshold",
                 "upper_clip"},
             "system.saturation");
  SaturationSpec spec{
      require(j, "lower_clip", "system.saturation").get<double>(),
      require(j, "lower_threshold", "system.saturation").get<double>(),
      require(j, "upper_threshold", "system.saturation").get<double>(),
      require(j, "upper_clip", "system.saturation").get<double>()};
  spec.validate();
  return spec;
}

AdmissibleSet parse_admissible_set(const json& j) {
  check_keys(j, {"type", "center", "radii", "radius"},
             "estimator.admissible_set");
  const std::string type =
      require(j, "type", "estimator.admissible_set").get<std::string>();
  const Eigen::VectorXd center = to_vector(
      require(j, "center", "estimator.admissible_set"), "admissible_set.center");
  if (type == "box") {
    check_keys(j, {"type", "center", "radii"}, "estimator.admissible_set");
    return AdmissibleSet::box(
        center, to_vector(require(j, "radii", "estimator.admissible_set"),
                          "admissible_set.radii"));
  }
  if (type == "ball") {
    check_keys(j, {"type", "center", "radius"}, "estimator.admissible_set");
    return AdmissibleSet::ball(
        center, require(j, "radius", "estimator.admissible_set").get<double>());
  }
  throw ConfigError("unknown admissible set type '" + type + "'");
}

WeightPolicy parse_weight_policy(const json& j) {
  check_keys(j, {"type", "value", "values"}, "estimator.weight_policy");
  const std::string type =
      require(j, "type", "estimator.weight_policy").get<std::string>();
  if (type == "constant") {
    check_keys(j, {"type", "value"}, "estimator.weight_policy");
    return WeightPolicy::constant(
        require(j, "value", "estimator.weight_policy").get<double>());
  }
  if (type == "inverse_prediction") {
    check_keys(j, {"type"}, "estimator.weight_policy");
    return WeightPolicy::inverse_prediction();
  }
  if (type == "sequence") {
    check_keys(j, {"type", "values"}, "estimator.weight_policy");
    return WeightPolicy::sequence(
        require(j, "values", "estimator.weight_policy")
            .get<std::vector<double>>());
  }
  throw ConfigError("unknown weight policy type '" + type + "'");
}

} // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  check_keys(j, {"version", "name", "system", "estimator", "run"}, "config");

  ExperimentConfig cfg;
  cfg.version = require(j, "version", "config").get<int>();
  if (cfg.version != 1) {
    std::ostringstream msg;
    msg << "unsupported config version " << cfg.version << " (expected 1)";
    throw ConfigError(msg.str());
  }
  if (j.contains("name")) cfg.name = j["name"].get<std::string>();

  const json& sys = require(j, "system", "config");
  check_keys(sys,
             {"dimension", "theta", "horizon", "regressor", "true_noise",
              "saturation"},
             "system");
  cfg.dimension = require(sys, "dimension", "system").get<int>();
  cfg.theta = to_vector(require(sys, "theta", "system"), "system.theta");
  cfg.horizon = require(sys, "horizon", "system").get<long>();

  const json& reg = require(sys, "regressor", "system");
  const std::string reg_type =
      require(reg, "type", "system.regressor").get<std::string>();
  if (reg_type == "ar") {
    check_keys(reg,
               {"type", "transition", "transition_diag", "noise_sigma",
                "noise_decay", "design_seed"},
               "system.regressor");
    ArProcess ar;
    if (reg.contains("transition_diag")) {
      const Eigen::VectorXd diag =
          to_vector(reg["transition_diag"], "regressor.transition_diag");
      ar.transition = diag.asDiagonal();
    } else {
      ar.transition = to_matrix(require(reg, "transition", "system.regressor"),
                                "regressor.transition");
    }
    ar.noise.sigma = to_vector(require(reg, "noise_sigma", "system.regressor"),
                               "regressor.noise_sigma");
    ar.noise.decay_exponent =
        to_vector(require(reg, "noise_decay", "system.regressor"),
                  "regressor.noise_decay");
    if (reg.contains("design_seed")) {
      ar.design_seed = reg["design_seed"].get<std::uint64_t>();
    }
    SimulatedSource src;
    src.regressor = std::move(ar);
    src.true_noise = parse_noise(require(sys, "true_noise", "system"),
                                 "system.true_noise");
    src.saturation = parse_saturation(require(sys, "saturation", "system"));
    cfg.source = std::move(src);
  } else if (reg_type == "explicit") {
    check_keys(reg, {"type", "vectors"}, "system.regressor");
    ExplicitDesign design;
    for (const auto& row : require(reg, "vectors", "system.regressor")) {
      design.vectors.push_back(to_vector(row, "regressor.vectors"));
    }
    SimulatedSource src;
    src.regressor = std::move(design);
    src.true_noise = parse_noise(require(sys, "true_noise", "system"),
                                 "system.true_noise");
    src.saturation = parse_saturation(require(sys, "saturation", "system"));
    cfg.source = std::move(src);
  } else if (reg_type == "dataset") {
    check_keys(reg, {"type", "path"}, "system.regressor");
    if (sys.contains("true_noise") || sys.contains("saturation")) {
      throw ConfigError(
          "dataset-driven runs take thresholds and noise from the data; "
          "remove system.true_noise / system.saturation");
    }
    cfg.source =
        DatasetSource{require(reg, "path", "system.regressor").get<std::string>()};
  } else {
    throw ConfigError("unknown regressor type '" + reg_type + "'");
  }

  const json& est = require(j, "estimator", "config");
  check_keys(est,
             {"algorithm", "assumed_noise", "admissible_set", "mu_bar", "mu",
              "weight_policy", "initial_theta_bar", "initial_theta",
              "gain_scale", "c_bound"},
             "estimator");
  cfg.algorithm = algorithm_from_string(
      require(est, "algorithm", "estimator").get<std::string>());
  cfg.assumed_noise = parse_noise(require(est, "assumed_noise", "estimator"),
                                  "estimator.assumed_noise");
  cfg.admissible_set =
      parse_admissible_set(require(est, "admissible_set", "estimator"));
  cfg.mu_bar = require(est, "mu_bar", "estimator").get<double>();
  cfg.mu = require(est, "mu", "estimator").get<double>();
  cfg.weight_policy =
      parse_weight_policy(require(est, "weight_policy", "estimator"));
  if (est.contains("initial_theta_bar")) {
    cfg.initial_theta_bar =
        to_vector(est["initial_theta_bar"], "estimator.initial_theta_bar");
  }
  if (est.contains("initial_theta")) {
    cfg.initial_theta =
        to_vector(est["initial_theta"], "estimator.initial_theta");
  }
  if (est.contains("gain_scale")) {
    cfg.gain_scale = est["gain_scale"].get<double>();
  }
  if (est.contains("c_bound")) {
    cfg.c_bound_override = est["c_bound"].get<double>();
  }

  const json& run = require(j, "run", "config");
  check_keys(run,
             {"seeds", "seed_count", "parallelism", "output_dir",
              "metric_cadence"},
             "run");
  if (run.contains("seeds") && run.contains("seed_count")) {
    throw ConfigError("run block: give either seeds or seed_count, not both");
  }
  if (run.contains("seeds")) {
    cfg.seeds = run["seeds"].get<std::vector<std::uint64_t>>();
  } else if (run.contains("seed_count")) {
    const auto n = run["seed_count"].get<long>();
    if (n < 1) throw ConfigError("run.seed_count must be >= 1");
    cfg.seeds.resize(static_cast<std::size_t>(n));
    std::iota(cfg.seeds.begin(), cfg.seeds.end(), 1);
  } else {
    throw ConfigError("run block needs seeds or seed_count");
  }
  if (run.contains("parallelism")) {
    cfg.parallelism = run["parallelism"].get<int>();
  }
  if (run.contains("output_dir")) {
    cfg.output_dir = run["output_dir"].get<std::string>();
  }
  if (run.contains("metric_cadence")) {
    cfg.metric_cadence = run["metric_cadence"].get<int>();
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.dimension < 1) {
    throw ConfigError("system.dimension must be >= 1");
  }
  if (cfg.theta.size() != cfg.dimension) {
    throw ConfigError("system.theta length disagrees with system.dimension");
  }
  if (cfg.admissible_set.dim() != cfg.dimension) {
    throw ConfigError(
        "estimator.admissible_set dimension disagrees with system.dimension");
  }
  if (!cfg.admissible_set.strictly_inside(cfg.theta, 0.0)) {
    throw ConfigError(
        "Assumption 1 violated: the true parameter must be an interior point "
        "of the admissible set");
  }
  if (cfg.horizon < 0) {
    throw ConfigError("system.horizon must be nonnegative");
  }
  if (!(cfg.mu_bar > 0.0) || !(cfg.mu > 0.0)) {
    throw ConfigError("estimator step-size factors must be > 0");
  }
  if (!(cfg.gain_scale > 0.0)) {
    throw ConfigError("estimator.gain_scale must be > 0");
  }
  if (cfg.c_bound_override && !(*cfg.c_bound_override >= 0.0)) {
    throw ConfigError("estimator.c_bound must be nonnegative");
  }
  cfg.assumed_noise.check_estimation_assumptions();

  if (const auto* sim = std::get_if<SimulatedSource>(&cfg.source)) {
    if (sim->saturation.is_constant()) {
      sim->saturation.at(0).validate();
    }
    if (const auto* ar = std::get_if<ArProcess>(&sim->regressor)) {
      if (ar->transition.rows() != cfg.dimension ||
          ar->transition.cols() != cfg.dimension) {
        throw ConfigError(
            "system.regressor transition matrix dimension mismatch");
      }
      const bool noisy = (ar->noise.sigma.array() > 0.0).any();
      if (noisy) {
        const Eigen::VectorXcd eigs =
            Eigen::EigenSolver<Eigen::MatrixXd>(ar->transition, false)
                .eigenvalues();
        if (eigs.cwiseAbs().maxCoeff() >= 1.0) {
          throw ConfigError(
              "Assumption 1 violated: AR transition must be stable "
              "(spectral radius < 1) so the regressor sequence stays bounded");
        }
      }
    } else {
      const auto& design = std::get<ExplicitDesign>(sim->regressor);
      if (static_cast<long>(design.vectors.size()) < cfg.horizon) {
        throw ConfigError(
            "explicit design has fewer vectors than system.horizon");
      }
    }
  } else {
    const auto& ds = std::get<DatasetSource>(cfg.source);
    if (ds.path.empty()) {
      throw ConfigError("dataset path must be nonempty");
    }
  }

  if (cfg.seeds.empty()) {
    throw ConfigError("run.seeds must be nonempty");
  }
  if (cfg.metric_cadence < 1) {
    throw ConfigError("run.metric_cadence must be >= 1");
  }
  if (cfg.parallelism < 0) {
    throw ConfigError("run.parallelism must be >= 0 (0 = hardware threads)");
  }
}

namespace {

json noise_to_json(const NoiseModel& m) {
  // Only built-in models are config-representable; customs are programmatic.
  json j;
  if (m.is_gaussian()) {
    j["type"] = "gaussian";
    j["sigma"] = m.gaussian_sigma();
  } else if (m.is_mixture()) {
    j["type"] = "mixture";
    j["q"] = m.mixture_q();
    j["sigma1"] = m.mixture_sigma1();
    j["sigma2"] = m.mixture_sigma2();
  } else {
    j["type"] = "custom";
    j["variance"] = m.variance();
  }
  return j;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(vector_to_json(m.row(r)));
  }
  return rows;
}

} // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  j["name"] = cfg.name;

  json sys;
  sys["dimension"] = cfg.dimension;
  sys["theta"] = vector_to_json(cfg.theta);
  sys["horizon"] = cfg.horizon;
  if (const auto* sim = std::get_if<SimulatedSource>(&cfg.source)) {
    json reg;
    if (const auto* ar = std::get_if<ArProcess>(&sim->regressor)) {
      reg["type"] = "ar";
      reg["transition"] = matrix_to_json(ar->transition);
      reg["noise_sigma"] = vector_to_json(ar->noise.sigma);
      reg["noise_decay"] = vector_to_json(ar->noise.decay_exponent);
      if (ar->design_seed) reg["design_seed"] = *ar->design_seed;
    } else {
      const auto& design = std::get<ExplicitDesign>(sim->regressor);
      reg["type"] = "explicit";
      json vecs = json::array();
      for (const auto& v : design.vectors) vecs.push_back(vector_to_json(v));
      reg["vectors"] = vecs;
    }
    sys["regressor"] = reg;
    sys["true_noise"] = noise_to_json(sim->true_noise);
    const SaturationSpec s0 = sim->saturation.at(0);
    sys["saturation"] = {{"lower_clip", s0.lower_clip},
                         {"lower_threshold", s0.lower_threshold},
                         {"upper_threshold", s0.upper_threshold},
                         {"upper_clip", s0.upper_clip}};
  } else {
    const auto& ds = std::get<DatasetSource>(cfg.source);
    sys["regressor"] = {{"type", "dataset"}, {"path", ds.path}};
  }
  j["system"] = sys;

  json est;
  est["algorithm"] = to_string(cfg.algorithm);
  est["assumed_noise"] = noise_to_json(cfg.assumed_noise);
  json set;
  if (cfg.admissible_set.kind() == AdmissibleSet::Kind::Box) {
    set["type"] = "box";
    set["center"] = vector_to_json(cfg.admissible_set.center());
    set["radii"] = vector_to_json(cfg.admissible_set.radii());
  } else {
    set["type"] = "ball";
    set["center"] = vector_to_json(cfg.admissible_set.center());
    set["radius"] = cfg.admissible_set.radius();
  }
  est["admissible_set"] = set;
  est["mu_bar"] = cfg.mu_bar;
  est["mu"] = cfg.mu;
  json policy;
  switch (cfg.weight_policy.kind()) {
  case WeightPolicy::Kind::Constant:
    policy = {{"type", "constant"},
              {"value", cfg.weight_policy.constant_value()}};
    break;
  case WeightPolicy::Kind::InversePrediction:
    policy = {{"type", "inverse_prediction"}};
    break;
  case WeightPolicy::Kind::Sequence:
    policy = {{"type", "sequence"}, {"values", cfg.weight_policy.values()}};
    break;
  }
  est["weight_policy"] = policy;
  if (cfg.initial_theta_bar) {
    est["initial_theta_bar"] = vector_to_json(*cfg.initial_theta_bar);
  }
  if (cfg.initial_theta) {
    est["initial_theta"] = vector_to_json(*cfg.initial_theta);
  }
  est["gain_scale"] = cfg.gain_scale;
  if (cfg.c_bound_override) est["c_bound"] = *cfg.c_bound_override;
  j["estimator"] = est;

  json run;
  run["seeds"] = cfg.seeds;
  run["parallelism"] = cfg.parallelism;
  run["output_dir"] = cfg.output_dir;
  run["metric_cadence"] = cfg.metric_cadence;
  j["run"] = run;

  return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

} // namespace tswlad
