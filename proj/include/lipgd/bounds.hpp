#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lipgd {

struct TrainLog;

/// Symbols of the high-probability Lipschitz bound after T iterations.
struct BoundInputs {
  double L_sigma = 1.0;
  double p = 1.0;
  double d = 1.0;
  double kappa = 1.0;
  double eta = 1.0;
  double C_W = 1.0;
  double C_B = 1.0;
  double N = 1.0;
  double G_T = 0.0;
  double g_1 = 0.0;
};

/// L_σ (√p + κ(√max{p,d} + η) + 2 max{C_W, C_B}(G(T) + g(1)) / N)²
double lipschitz_bound_rhs(const BoundInputs& in);

/// Seed-wise bound L_σ [‖W₀‖ + 2C_W/N (G(t)+g(1))] [‖B₀‖ + 2C_B/N (G(t)+g(1))].
double per_omega_lip_bound(double norm_W0_op, double norm_B0, double C_W, double C_B, double N,
                           double G_t, double g_1, double L_sigma);

/// norm0 + (2C/N)(G(t) + g(1))
double norm_growth_rhs(double norm0, double C, double N, double G_t, double g_1);

/// Inputs of the parameter-cube radius. Sup-norms are largest absolute
/// entries of W₀, B₀, b₀ and |c₀|, in that order; C likewise (C_W, C_B, C_b, C_c).
struct CubeInputs {
  std::array<double, 4> sup_norms0{};
  std::array<double, 4> C{1.0, 1.0, 1.0, 1.0};
  double N = 1.0;
  double d = 1.0;
  double G_star = 0.0;
  double g_1 = 0.0;
};

/// M = max over blocks of √d ‖·₀‖_∞ + (2C/N)(G* + g(1)).
double param_cube_M(const CubeInputs& in);

/// C_k = 2 ((k/2 - 1) / (2(1 - 2^{1-k/2})))^{2/k} (1 + 1/(2(k/2 - 1))) √k, k = d + D.
/// Throws std::domain_error for k <= 2.
double dimensional_constant(double k);

struct GenBoundInputs {
  double diam_Q = 1.0;
  double delta = 0.05;
  double d = 1.0;
  double D = 1.0;
  double N = 1.0;
  double Lambda = 1.0;
};

/// Λ C_Q (C_{d+D} / N^{1/d} + √ln(8/δ) / √(2N)). Throws for δ outside (0, 1].
double generalization_bound(const GenBoundInputs& in);

/// η used inside Λ for the generalization bound: diam(supp Q) / √(2N).
inline double generalization_eta(double diam_Q, double N) { return diam_Q / std::sqrt(2.0 * N); }

/// One audited inequality family.
struct CheckResult {
  std::string name;
  bool pass = true;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  /// min over t of (rhs - lhs); +inf when nothing was evaluated.
  double worst_slack = 0.0;
  std::optional<std::size_t> worst_t;
  std::optional<std::size_t> first_violation_t;
};

struct BoundReport {
  static constexpr double kSlackTolerance = -1e-9;

  std::vector<CheckResult> checks;
  double cube_M = 0.0;

  bool all_pass() const;
  const CheckResult& check(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Checks every logged iteration against the norm-growth bounds for W, B, b
/// and c, the seed-wise Lipschitz bound, parameter-cube containment, and
/// α <= cap per block. Pass means slack >= -1e-9.
BoundReport audit_trajectory(const TrainLog& log);

/// min_{t <= T} of a gradient-norm series for one budget T.
struct BudgetSeries {
  std::size_t T = 0;
  std::vector<double> grad_norms;
};

struct ConvergencePair {
  std::size_t T1 = 0;
  std::size_t T2 = 0;
  double m1 = 0.0;
  double m2 = 0.0;
  /// m(T1) / m(T2); NaN when skipped.
  double ratio = 0.0;
  /// √((T2 + 1)/(T1 + 1)): the ratio a 1/√(T+1) decay would produce.
  double predicted = 0.0;
  bool skipped = false;
};

struct ConvergenceReport {
  std::vector<std::size_t> budgets;
  std::vector<double> min_grad_norm;
  std::vector<ConvergencePair> pairs;
  /// Some m(T) fell below the convergence threshold.
  bool converged = false;
};

/// Needs at least two distinct budgets; pairs consecutive budgets in
/// ascending order. Ratios are skipped once m hits `zero_tol`.
ConvergenceReport convergence_rate_check(std::vector<BudgetSeries> series, double zero_tol = 1e-12);

}  // namespace lipgd
