#include "lipgd/harness/datagen.hpp"

#include <cmath>

namespace lipgd::harness {

TargetFunction TargetFunction::builtin(TargetKind kind) {
  if (kind == TargetKind::custom) throw std::invalid_argument("custom targets need an expression");
  TargetFunction t;
  t.kind_ = kind;
  return t;
}

TargetFunction TargetFunction::custom(const std::string& expression) {
  TargetFunction t;
  t.kind_ = TargetKind::custom;
  t.expr_ = Expression::parse(expression);
  return t;
}

std::string TargetFunction::name() const {
  switch (kind_) {
    case TargetKind::cubic_sqrt: return "cubic_sqrt";
    case TargetKind::sine: return "sine";
    case TargetKind::reciprocal: return "reciprocal";
    case TargetKind::custom: return expr_->text();
  }
  return "unknown";
}

double TargetFunction::operator()(double x) const {
  switch (kind_) {
    case TargetKind::cubic_sqrt: return x * x * x + std::sqrt(std::abs(x));
    case TargetKind::sine: return std::sin(x);
    case TargetKind::reciprocal: return 1.0 / x;
    case TargetKind::custom: return (*expr_)(x);
  }
  return 0.0;
}

bool TargetFunction::excluded(double x) const {
  return kind_ == TargetKind::reciprocal && std::abs(x) < 1e-3;
}

nlohmann::json TargetFunction::to_json() const {
  if (kind_ == TargetKind::custom) return {{"expr", expr_->text()}};
  return name();
}

TargetFunction TargetFunction::from_json(const nlohmann::json& j) {
  if (j.is_object()) return custom(j.at("expr").get<std::string>());
  const auto name = j.get<std::string>();
  if (name == "cubic_sqrt") return builtin(TargetKind::cubic_sqrt);
  if (name == "sine") return builtin(TargetKind::sine);
  if (name == "reciprocal") return builtin(TargetKind::reciprocal);
  throw std::invalid_argument("unknown target '" + name + "'");
}

namespace {

double draw_input(const TargetFunction& target, const DataOptions& opts, Rng& rng) {
  for (;;) {
    const double x = rng.normal();
    if (opts.truncate && std::abs(x) > *opts.truncate) continue;
    if (target.excluded(x)) continue;
    return x;
  }
}

void check_options(const NoiseModel& noise, const DataOptions& opts) {
  if (!(noise.beta >= 0) || !std::isfinite(noise.beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (opts.truncate && !(*opts.truncate > 0)) throw std::invalid_argument("truncate must be > 0");
}

}  // namespace

Dataset generate_dataset(const TargetFunction& target, const NoiseModel& noise, std::size_t N,
                         Rng& rng, const DataOptions& opts) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  check_options(noise, opts);
  std::vector<double> xs(N);
  Vector ys(N);
  for (std::size_t n = 0; n < N; ++n) {
    xs[n] = draw_input(target, opts, rng);
    ys[n] = target(xs[n]) + noise.beta * rng.normal();
  }
  return Dataset{Matrix(N, 1, std::move(xs)), std::move(ys)};
}

Sampler make_sampler(const TargetFunction& target, const NoiseModel& noise, const DataOptions& opts) {
  check_options(noise, opts);
  return [target, noise, opts](Rng& rng) {
    const double x = draw_input(target, opts, rng);
    return Sample{Vector{x}, target(x) + noise.beta * rng.normal()};
  };
}

}  // namespace lipgd::harness
