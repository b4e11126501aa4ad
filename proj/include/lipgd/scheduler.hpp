#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "lipgd/losses.hpp"
#include "lipgd/network.hpp"
#include "lipgd/rates.hpp"

namespace lipgd {

/// How the per-block step sizes relate to the caps.
///   decay_cap   α = cap
///   constant    α = α_const, or min(α_const, cap) with enforce_caps
///   hybrid_min  α = min(1 / Lip(R_S), cap)
enum class LrMode { decay_cap, constant, hybrid_min };

std::string to_string(LrMode mode);
LrMode lr_mode_from_string(std::string_view name);

struct SchedulerConfig {
  double C_W = 1.0;
  double C_B = 1.0;
  double C_b = 1.0;
  double C_c = 1.0;
  RateFunction rate = RateFunction::hybrid(1.0, 1.0, 50.0);
  LrMode mode = LrMode::decay_cap;
  double alpha_const = 0.01;
  bool enforce_caps = false;
  /// Estimate of Lip(R_S) for hybrid_min; the trainer probes one when empty.
  std::optional<double> lip_RS;
  /// Cap used when a denominator is (numerically) zero.
  double alpha_max = 1.0;

  void validate() const;
  /// True when every step is guaranteed to respect the caps.
  bool caps_enforced() const { return mode != LrMode::constant || enforce_caps; }

  nlohmann::json to_json() const;
  static SchedulerConfig from_json(const nlohmann::json& j);
};

enum class Block { W, b, B, c };

struct LRVector {
  double alpha_W = 0.0;
  double alpha_B = 0.0;
  double alpha_b = 0.0;
  double alpha_c = 0.0;
  double cap_W = 0.0;
  double cap_B = 0.0;
  double cap_b = 0.0;
  double cap_c = 0.0;

  double alpha(Block blk) const;
  double cap(Block blk) const;
  void set(Block blk, double alpha, double cap);
};

// Each cap is evaluated on the snapshot its block update sees in the
// sequential recursion:
//   cap_W  (W_{s-1}, b_{s-1}, B_{s-1}, c_{s-1})
//   cap_b  (W_s,     b_{s-1}, B_{s-1}, c_{s-1})
//   cap_B  (W_s,     b_s,     B_{s-1}, c_{s-1})
//   cap_c  (W_s,     b_s,     B_s,     c_{s-1})
// Each returns alpha_max when its denominator is below 1e-300.

/// Data sums shared by the four cap denominators, with
/// βₙ = ‖B‖ ‖σ∙(W xₙ + b)‖ + |c| + |yₙ|.
struct CapTerms {
  double norm_B = 0.0;
  double sum_bracket = 0.0;    // Σ βₙ
  double sum_bracket_x = 0.0;  // Σ βₙ ‖xₙ‖
  double sum_bracket_h = 0.0;  // Σ βₙ ‖σ∙(W xₙ + b)‖
};

CapTerms cap_terms(const Params& snapshot, const Dataset& data, const Activation& act);
double cap_from_terms(Block blk, const CapTerms& terms, double L_sigma, double C, double g_s,
                      double alpha_max);

/// C_W g(s) / (L_σ ‖B‖ Σₙ [‖B‖ ‖σ∙(W xₙ + b)‖ + |c| + |yₙ|] ‖xₙ‖)
double cap_W(const Params& snapshot, const Dataset& data, const Activation& act, double C_W,
             double g_s, double alpha_max = 1.0);
/// C_B g(s) / (Σₙ [‖B‖ ‖σ∙(W xₙ + b)‖ + |c| + |yₙ|] ‖σ∙(W xₙ + b)‖)
double cap_B(const Params& snapshot, const Dataset& data, const Activation& act, double C_B,
             double g_s, double alpha_max = 1.0);
/// C_b g(s) / (‖B‖ Σₙ [‖B‖ ‖σ∙(W xₙ + b)‖ + |c| + |yₙ|])
double cap_b(const Params& snapshot, const Dataset& data, const Activation& act, double C_b,
             double g_s, double alpha_max = 1.0);
/// C_c g(s) / Σₙ [‖B‖ ‖σ∙(W xₙ + b)‖ + |c| + |yₙ|]
double cap_c(const Params& snapshot, const Dataset& data, const Activation& act, double C_c,
             double g_s, double alpha_max = 1.0);

/// Cap for `blk` with the matching free parameter from `config`.
double block_cap(Block blk, const Params& snapshot, const Dataset& data, const Activation& act,
                 const SchedulerConfig& config, double g_s);

/// Step size for one block given its cap.
double effective_alpha(double cap, const SchedulerConfig& config);
/// Applies effective_alpha to every block of `caps`.
LRVector effective_lr(const LRVector& caps, const SchedulerConfig& config);

}  // namespace lipgd
