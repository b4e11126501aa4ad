#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace lipgd {

enum class RateKind { exponential, polynomial, hybrid, constant };

std::string to_string(RateKind kind);
RateKind rate_kind_from_string(std::string_view name);

/// G* = sup G and the first derivative value g(1), the two constants every
/// growth bound consumes.
struct RateSummary {
  double G_star = 0.0;
  double g_1 = 0.0;
};

/// Rate function G with derivative g.
///
///   exponential  g(t) = λ r e^{-rt},       G(t) = λ (1 - e^{-rt})
///   polynomial   g(t) = λ t^{-r},          G(t) = λ (1 - t^{1-r} / (1-r)),  r > 1
///   hybrid       g(t) = λ for t <= τ, λ e^{-r(t-τ)} after,
///                G(t) = λ + ∫₀ᵗ g
///   constant     g(t) = λ,                 G(t) = λ t  (unbounded; no decay)
///
/// The polynomial closed form is kept exactly as written even though its
/// derivative is -λ t^{-r}; G is then decreasing on [1, ∞) and G* = G(1).
class RateFunction {
public:
  RateFunction() = default;

  static RateFunction exponential(double lambda, double r);
  static RateFunction polynomial(double lambda, double r);
  static RateFunction hybrid(double lambda, double r, double tau);
  static RateFunction constant(double lambda);

  RateKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double r() const { return r_; }
  double tau() const { return tau_; }

  /// g(t); throws on t < 0.
  double g(double t) const;
  /// G(t); polynomial needs t >= 1, the other families accept t >= 0.
  double G(double t) const;
  /// sup_{t >= 1} G(t); +inf for the constant family.
  double sup() const;
  RateSummary summary() const { return {sup(), g(1.0)}; }

  nlohmann::json to_json() const;
  static RateFunction from_json(const nlohmann::json& j);

  bool operator==(const RateFunction&) const = default;

private:
  RateFunction(RateKind kind, double lambda, double r, double tau)
      : kind_(kind), lambda_(lambda), r_(r), tau_(tau) {}

  RateKind kind_ = RateKind::hybrid;
  double lambda_ = 1.0;
  double r_ = 1.0;
  double tau_ = 0.0;
};

}  // namespace lipgd
