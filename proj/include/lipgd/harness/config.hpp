#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lipgd/harness/datagen.hpp"
#include "lipgd/trainer.hpp"

namespace lipgd::harness {

/// Malformed or invalid experiment configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class SweepAxis { N, p, beta };

std::string to_string(SweepAxis axis);
/// Accepts "N", "p", "P" (width) and "beta".
SweepAxis sweep_axis_from_string(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::N;
  std::vector<double> values;
};

/// One experiment: data law, base training configuration, seeds and arms.
struct ExperimentConfig {
  std::string name = "run";
  TargetFunction target;
  NoiseModel noise;
  DataOptions data;
  std::size_t N = 100;
  std::size_t n_seeds = 1;
  /// Seed of the first run; run k uses first_seed + k.
  std::uint64_t first_seed = 0;
  TrainConfig train;
  std::optional<SweepSpec> sweep;
  /// Subset of {"decay", "constant"}. "decay" trains with `train.scheduler`;
  /// "constant" uses α = constant_alpha with no caps.
  std::vector<std::string> arms{"decay", "constant"};
  double constant_alpha = 0.01;
  /// Monte-Carlo draws for the test Huber risk of each final network.
  std::size_t test_samples = 2000;
  /// Worker threads for sweeps; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Reads and validates a JSON config file. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// The scheduler used by an arm of `cfg`.
TrainConfig arm_config(const ExperimentConfig& cfg, const std::string& arm);

}  // namespace lipgd::harness
