#include "lipgd/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lipgd::harness {

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::N: return "N";
    case SweepAxis::p: return "p";
    case SweepAxis::beta: return "beta";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  if (name == "N") return SweepAxis::N;
  if (name == "p" || name == "P") return SweepAxis::p;
  if (name == "beta") return SweepAxis::beta;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name must not be empty");
  if (N < 1) throw ConfigError("N must be >= 1");
  if (n_seeds < 1) throw ConfigError("seeds must be >= 1");
  if (!(noise.beta >= 0) || !std::isfinite(noise.beta)) throw ConfigError("beta must be finite and >= 0");
  if (train.shape.d != 1) throw ConfigError("the harness generates univariate data; d must be 1");
  if (arms.empty()) throw ConfigError("at least one arm is required");
  for (const auto& arm : arms)
    if (arm != "decay" && arm != "constant") throw ConfigError("unknown arm '" + arm + "'");
  if (!(constant_alpha >= 0)) throw ConfigError("constant_alpha must be >= 0");
  if (sweep) {
    if (sweep->values.empty()) throw ConfigError("sweep values must not be empty");
    for (double v : sweep->values) {
      if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
      if (sweep->axis != SweepAxis::beta && !(v >= 1 && v == std::floor(v)))
        throw ConfigError("N and p sweep values must be positive integers");
      if (sweep->axis == SweepAxis::beta && v < 0) throw ConfigError("beta values must be >= 0");
    }
  }
  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"name", name},       {"target", target.to_json()},
                   {"beta", noise.beta}, {"N", N},
                   {"seeds", n_seeds},   {"seed", first_seed},
                   {"train", train.to_json()}, {"arms", arms},
                   {"constant_alpha", constant_alpha}, {"test_samples", test_samples},
                   {"threads", threads}};
  if (data.truncate) j["truncate"] = *data.truncate;
  if (sweep) j["sweep"] = {{"axis", to_string(sweep->axis)}, {"values", sweep->values}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"name",  "target", "beta",           "N",
                                              "seeds", "seed",   "train",          "sweep",
                                              "arms",  "constant_alpha", "test_samples", "threads",
                                              "truncate"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    if (j.contains("target")) cfg.target = TargetFunction::from_json(j.at("target"));
    cfg.noise.beta = j.value("beta", cfg.noise.beta);
    cfg.N = j.value("N", cfg.N);
    cfg.n_seeds = j.value("seeds", cfg.n_seeds);
    cfg.first_seed = j.value("seed", cfg.first_seed);
    if (j.contains("train")) cfg.train = TrainConfig::from_json(j.at("train"));
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      cfg.sweep = SweepSpec{sweep_axis_from_string(s.at("axis").get<std::string>()),
                            s.at("values").get<std::vector<double>>()};
    }
    cfg.arms = j.value("arms", cfg.arms);
    cfg.constant_alpha = j.value("constant_alpha", cfg.constant_alpha);
    cfg.test_samples = j.value("test_samples", cfg.test_samples);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("truncate")) cfg.data.truncate = j.at("truncate").get<double>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

TrainConfig arm_config(const ExperimentConfig& cfg, const std::string& arm) {
  TrainConfig t = cfg.train;
  if (arm == "constant") {
    t.scheduler.mode = LrMode::constant;
    t.scheduler.alpha_const = cfg.constant_alpha;
    t.scheduler.enforce_caps = false;
  } else if (arm != "decay") {
    throw ConfigError("unknown arm '" + arm + "'");
  }
  return t;
}

}  // namespace lipgd::harness
