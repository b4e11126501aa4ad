#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipgd/harness/config.hpp"
#include "lipgd/harness/csv.hpp"

namespace lipgd::harness {

/// One (arm, axis value, seed) training run.
struct RunOutcome {
  std::string arm;
  double value = 0.0;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  /// Empty when training failed; `error` then holds the reason.
  std::optional<TrainLog> log;
  std::string error;
  /// Monte-Carlo Huber risk of the final network on fresh draws.
  double test_huber = 0.0;
};

struct SweepResult {
  ExperimentConfig config;
  SweepAxis axis = SweepAxis::N;
  std::vector<double> values;
  /// Ordered by arm, then value, then seed.
  std::vector<RunOutcome> runs;
  AggregateTable aggregate;

  std::vector<const RunOutcome*> cell(const std::string& arm, double value) const;
  std::size_t failures() const;
};

/// `cfg` with the axis set to `value`.
ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, double value);

/// Training set of a seed. Every arm of that seed sees the same data.
Dataset seed_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

RunOutcome run_one(const ExperimentConfig& cfg, const std::string& arm, double value,
                   std::size_t seed_index);

/// Runs every cell concurrently and aggregates the successful runs. A config
/// without a sweep is a single cell on the N axis. Failed runs are kept with
/// their error and left out of the aggregate.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_run_log(const TrainLog& log, const std::filesystem::path& csv_path);

/// Writes per-run logs, aggregate.csv, summary.csv and failures.csv under `dir`.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace lipgd::harness
