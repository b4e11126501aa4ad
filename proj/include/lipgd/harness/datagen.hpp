#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "lipgd/harness/expression.hpp"
#include "lipgd/losses.hpp"

namespace lipgd::harness {

enum class TargetKind { cubic_sqrt, sine, reciprocal, custom };

/// x³ + √|x|, sin x, 1/x, or a user expression in x.
class TargetFunction {
public:
  TargetFunction() = default;
  static TargetFunction builtin(TargetKind kind);
  static TargetFunction custom(const std::string& expression);

  TargetKind kind() const { return kind_; }
  std::string name() const;
  double operator()(double x) const;
  /// Inputs the target cannot be sampled at (only the reciprocal's |x| < 1e-3).
  bool excluded(double x) const;

  /// Either a builtin name or {"expr": "..."}.
  nlohmann::json to_json() const;
  static TargetFunction from_json(const nlohmann::json& j);

private:
  TargetKind kind_ = TargetKind::cubic_sqrt;
  std::optional<Expression> expr_;
};

struct NoiseModel {
  double beta = 0.0;
};

struct DataOptions {
  /// Inputs are redrawn until |x| <= truncate, giving a compactly supported law.
  std::optional<double> truncate;
};

/// N i.i.d. pairs with X ~ N(0, 1) and Y = f(X) + β ε, ε ~ N(0, 1).
Dataset generate_dataset(const TargetFunction& target, const NoiseModel& noise, std::size_t N,
                         Rng& rng, const DataOptions& opts = {});

/// One draw from the same law.
Sampler make_sampler(const TargetFunction& target, const NoiseModel& noise,
                     const DataOptions& opts = {});

}  // namespace lipgd::harness
