#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lipgd/linalg.hpp"

namespace lipgd {

/// Input dimension d and hidden width p of a two-layer, scalar-output MLP.
struct NetworkShape {
  std::size_t d = 1;
  std::size_t p = 1;

  /// Entries of (W, B, b, c): p d + 2p + 1.
  std::size_t parameter_count() const { return p * d + 2 * p + 1; }
  /// Nominal count (1 + d)(p + 1); equals parameter_count() only when p = d.
  std::size_t nominal_parameter_count() const { return (1 + d) * (p + 1); }
  void validate() const;
  bool operator==(const NetworkShape&) const = default;
};

/// Network parameters: hidden weights W (p×d), output weights B (p),
/// hidden bias b (p) and output bias c.
struct Params {
  Matrix W;
  Vector B;
  Vector b;
  double c = 0.0;

  static Params zeros(const NetworkShape& shape);

  NetworkShape shape() const { return {W.cols(), W.rows()}; }
  /// Throws DimensionError when the blocks disagree, invalid_argument on
  /// non-finite entries.
  void validate() const;
  bool finite() const;
  /// Largest absolute entry over all four blocks.
  double max_abs_entry() const;

  /// Flat order: W row-major, B, b, c.
  std::vector<double> flatten() const;
  static Params unflatten(const NetworkShape& shape, std::span<const double> flat);

  bool operator==(const Params&) const = default;
};

nlohmann::json params_to_json(const Params& theta);
Params params_from_json(const NetworkShape& shape, const nlohmann::json& flat);

double swish(double x);
double swish_d1(double x);
double swish_d2(double x);

enum class ActivationKind { swish, identity, tanh };

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(std::string_view name);

/// sup |σ|, sup |σ'|, sup |σ''| over a closed interval.
struct ActivationBounds {
  double sigma_max = 0.0;
  double d1_max = 0.0;
  double d2_max = 0.0;
};

class Activation {
public:
  explicit Activation(ActivationKind kind = ActivationKind::swish);

  ActivationKind kind() const { return kind_; }
  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  /// σ(x) and σ'(x) from one evaluation.
  void value_and_d1(double x, double& value, double& d1) const;
  /// Global Lipschitz constant, sup |σ'| over ℝ.
  double lipschitz() const { return lipschitz_; }
  /// Dense grid search over [lo, hi] with `grid` points.
  ActivationBounds bounds_on(double lo, double hi, std::size_t grid = 200001) const;

private:
  ActivationKind kind_;
  double lipschitz_;
};

/// Axis-aligned box used for Lipschitz sampling.
struct Box {
  Vector lo;
  Vector hi;
};

/// Pre-activations z = W x + b.
Vector hidden_preactivation(const Params& theta, std::span<const double> x);
/// f(x) = Bᵀ σ∙(W x + b) + c
double forward(const Params& theta, const Activation& act, std::span<const double> x);
/// ∇ₓ f(x) = Wᵀ (B ⊙ σ'∙(W x + b))
Vector input_gradient(const Params& theta, const Activation& act, std::span<const double> x);

struct InitOptions {
  /// Standard deviation of b and c at initialization; 0 means zero biases.
  double bias_std = 0.0;
};

/// W and B i.i.d. standard normal; biases per `opts`.
Params init_params(const NetworkShape& shape, Rng& rng, const InitOptions& opts = {});

/// L_σ ‖B‖ ‖W‖_op
double lipschitz_upper_bound(const Params& theta, const Activation& act);

/// max ‖∇ₓ f‖ over `n_samples` uniform draws from `box`. A lower estimate of
/// the Lipschitz constant on the box.
double empirical_lipschitz(const Params& theta, const Activation& act, const Box& box,
                           std::size_t n_samples, Rng& rng);

}  // namespace lipgd
