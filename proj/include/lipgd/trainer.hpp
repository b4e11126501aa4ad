#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lipgd/losses.hpp"
#include "lipgd/network.hpp"
#include "lipgd/scheduler.hpp"

namespace lipgd {

/// A GD update produced non-finite parameters.
class TrainingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Gradient of the MSE empirical risk R_S, block by block.
struct Gradient {
  Matrix W;
  Vector B;
  Vector b;
  double c = 0.0;

  double norm() const;
};

/// Simultaneous gradient of R_S: all four blocks evaluated at the same θ.
Gradient risk_gradient(const Params& theta, const Dataset& data, const Activation& act);
/// ‖∇_Θ R_S(θ)‖ over all P coordinates.
double grad_norm(const Params& theta, const Dataset& data, const Activation& act);

struct BlockRate {
  double alpha = 0.0;
  double cap = 0.0;
};

/// Step size for `blk`, given the snapshot that block's update reads and the
/// cap sums evaluated on it.
using RateProvider = std::function<BlockRate(Block blk, const Params& snapshot, const CapTerms& terms)>;

/// The same step sizes every call; caps reported as given.
RateProvider fixed_rates(const LRVector& lr);
/// Caps from `config` at iteration index s (through g(s)), step sizes per mode.
RateProvider scheduled_rates(const SchedulerConfig& config, const Activation& act, std::size_t s);

enum class StepOrder {
  /// W, b, B, c in turn, each block reading the blocks already updated.
  sequential,
  /// Every block reads the previous iterate.
  simultaneous,
};

struct StepResult {
  Params theta;
  LRVector lr;
};

/// One GD iteration Θ_{t-1} -> Θ_t. Throws TrainingError on a non-finite update.
StepResult gd_step(const Params& prev, const Dataset& data, const Activation& act,
                   const RateProvider& rates, StepOrder order = StepOrder::sequential);

struct BacktrackingOptions {
  double alpha0 = 1.0;
  double shrink = 0.5;
  double armijo_c = 1e-4;
};

struct BacktrackResult {
  Params theta;
  double alpha = 0.0;
  bool accepted = false;
  std::size_t shrinks = 0;
};

/// Armijo backtracking on R_S along the simultaneous negative gradient.
/// Gives up after 60 shrinks and returns a zero step with accepted = false.
BacktrackResult backtracking_step(const Params& theta, const Dataset& data,
                                  const Activation& act, double alpha0, double shrink,
                                  double armijo_c);

/// max ‖∇R_S‖ over `n_probe` uniform draws of Θ from [-M, M]^P, times 1.5.
double estimate_lip_RS(const Dataset& data, const Activation& act, const NetworkShape& shape,
                       double cube_M, std::size_t n_probe, Rng& rng);

struct TrainConfig {
  NetworkShape shape;
  ActivationKind activation = ActivationKind::swish;
  SchedulerConfig scheduler;
  std::size_t T = 100;
  std::uint64_t seed = 0;
  LossConfig loss;
  std::size_t log_every = 1;
  /// Box for empirical Lipschitz sampling; defaults to the data's bounding
  /// box inflated by 20%.
  std::optional<Box> lip_domain;
  /// Zero disables the empirical estimate (recorded as NaN).
  std::size_t lip_samples = 512;
  InitOptions init;
  StepOrder order = StepOrder::sequential;
  std::optional<BacktrackingOptions> backtracking;
  /// Probe count for the Lip(R_S) estimate in hybrid_min mode.
  std::size_t lip_RS_probes = 64;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct IterationRecord {
  std::size_t t = 0;
  double alpha_W = 0, alpha_B = 0, alpha_b = 0, alpha_c = 0;
  double cap_W = 0, cap_B = 0, cap_b = 0, cap_c = 0;
  double norm_W_op = 0, norm_B = 0, norm_b = 0, abs_c = 0;
  double lip_bound = 0;
  double lip_empirical = 0;
  double mse_risk = 0;
  double huber_risk = 0;
  double grad_norm = 0;
  std::int64_t wallclock_ns = 0;
  // Largest entries per block, for the parameter-cube check.
  double sup_W = 0, sup_B = 0, sup_b = 0;

  bool operator==(const IterationRecord&) const = default;
};

/// CSV column names in record order.
const std::vector<std::string>& iteration_columns();
/// Numeric value of a column by name (t and wallclock_ns converted).
double record_value(const IterationRecord& rec, std::string_view column);

struct TrainLog {
  TrainConfig config;
  std::size_t N = 0;
  double L_sigma = 1.0;
  std::vector<IterationRecord> records;
  Params initial;
  Params final_params;

  /// Everything an audit needs besides the records.
  nlohmann::json sidecar() const;
};

void write_log_csv(const TrainLog& log, std::ostream& out);
std::vector<IterationRecord> read_log_csv(std::istream& in);
/// Rebuilds a log from its CSV and sidecar. Parameters are restored when the
/// sidecar carries them.
TrainLog load_log(std::istream& csv, const nlohmann::json& sidecar);

/// Runs T iterations from a seeded initialization and logs every
/// `log_every` steps (t = 0 included).
TrainLog train(const TrainConfig& config, const Dataset& data);

/// Stream tags used to derive independent generators from a run seed.
namespace stream {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t data = 2;
inline constexpr std::uint64_t lipschitz = 3;
inline constexpr std::uint64_t probe = 4;
inline constexpr std::uint64_t test = 5;
}  // namespace stream

}  // namespace lipgd
