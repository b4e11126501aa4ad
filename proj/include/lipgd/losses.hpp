#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include "lipgd/linalg.hpp"
#include "lipgd/network.hpp"

namespace lipgd {

/// N samples: inputs as rows of `xs` (N×d), targets in `ys`.
struct Dataset {
  Matrix xs;
  Vector ys;

  std::size_t size() const { return ys.size(); }
  std::size_t dim() const { return xs.cols(); }
  std::span<const double> x(std::size_t n) const { return xs.row(n); }
  double y(std::size_t n) const { return ys[n]; }

  void validate() const;

  /// Header `x_0,...,x_{d-1},y`, one row per sample.
  void write_csv(std::ostream& out) const;
  static Dataset read_csv(std::istream& in);
};

struct LossConfig {
  double huber_delta = 1.0;
};

/// ½r² for |r| <= δ, δ(|r| - δ/2) otherwise, with r = ŷ - y.
double huber(double yhat, double y, double delta = 1.0);

/// (1/N) Σ (f(xₙ) - yₙ)², no ½ factor.
double mse_risk(const Params& theta, const Activation& act, const Dataset& data);
/// (1/N) Σ huber(f(xₙ), yₙ)
double huber_risk(const Params& theta, const Activation& act, const Dataset& data,
                  double delta = 1.0);

struct Sample {
  Vector x;
  double y = 0.0;
};
/// Draws one (X, Y) from the data-generating law.
using Sampler = std::function<Sample(Rng&)>;

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of E[huber(f(X), Y)] from `m_samples` fresh draws.
MonteCarloEstimate true_risk_mc(const Params& theta, const Activation& act,
                                const Sampler& sampler, std::size_t m_samples, Rng& rng,
                                double delta = 1.0);

}  // namespace lipgd
