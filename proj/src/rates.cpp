#include "lipgd/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lipgd {

std::string to_string(RateKind kind) {
  switch (kind) {
    case RateKind::exponential: return "exponential";
    case RateKind::polynomial: return "polynomial";
    case RateKind::hybrid: return "hybrid";
    case RateKind::constant: return "constant";
  }
  return "unknown";
}

RateKind rate_kind_from_string(std::string_view name) {
  if (name == "exponential") return RateKind::exponential;
  if (name == "polynomial") return RateKind::polynomial;
  if (name == "hybrid") return RateKind::hybrid;
  if (name == "constant") return RateKind::constant;
  throw std::invalid_argument("unknown rate kind '" + std::string(name) + "'");
}

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

RateFunction RateFunction::exponential(double lambda, double r) {
  require(lambda > 0 && std::isfinite(lambda), "exponential rate: lambda must be > 0");
  require(r > 0 && std::isfinite(r), "exponential rate: r must be > 0");
  return {RateKind::exponential, lambda, r, 0.0};
}

RateFunction RateFunction::polynomial(double lambda, double r) {
  require(lambda > 0 && std::isfinite(lambda), "polynomial rate: lambda must be > 0");
  require(r > 1 && std::isfinite(r), "polynomial rate: r must be > 1 (G unbounded otherwise)");
  return {RateKind::polynomial, lambda, r, 0.0};
}

RateFunction RateFunction::hybrid(double lambda, double r, double tau) {
  require(lambda > 0 && std::isfinite(lambda), "hybrid rate: lambda must be > 0");
  require(r > 0 && std::isfinite(r), "hybrid rate: r must be > 0");
  require(tau >= 0 && std::isfinite(tau), "hybrid rate: tau must be >= 0");
  return {RateKind::hybrid, lambda, r, tau};
}

RateFunction RateFunction::constant(double lambda) {
  require(lambda > 0 && std::isfinite(lambda), "constant rate: lambda must be > 0");
  return {RateKind::constant, lambda, 0.0, 0.0};
}

double RateFunction::g(double t) const {
  if (!(t >= 0) || !std::isfinite(t)) throw std::invalid_argument("rate g: t must be finite and >= 0");
  switch (kind_) {
    case RateKind::exponential: return lambda_ * r_ * std::exp(-r_ * t);
    case RateKind::polynomial:
      if (t == 0) return std::numeric_limits<double>::infinity();
      return lambda_ * std::pow(t, -r_);
    case RateKind::hybrid: return t <= tau_ ? lambda_ : lambda_ * std::exp(-r_ * (t - tau_));
    case RateKind::constant: return lambda_;
  }
  return 0.0;
}

double RateFunction::G(double t) const {
  if (!(t >= 0) || std::isnan(t)) throw std::invalid_argument("rate G: t must be >= 0");
  switch (kind_) {
    case RateKind::exponential:
      return lambda_ * (1.0 - std::exp(-r_ * t));
    case RateKind::polynomial:
      if (t < 1) throw std::invalid_argument("polynomial rate G: t must be >= 1");
      return lambda_ * (1.0 - std::pow(t, 1.0 - r_) / (1.0 - r_));
    case RateKind::hybrid: {
      double out = lambda_ + lambda_ * std::min(t, tau_);
      if (t > tau_) out += (lambda_ / r_) * (1.0 - std::exp(-r_ * (t - tau_)));
      return out;
    }
    case RateKind::constant: return lambda_ * t;
  }
  return 0.0;
}

double RateFunction::sup() const {
  switch (kind_) {
    case RateKind::exponential: return lambda_;
    case RateKind::polynomial: return std::max(G(1.0), lambda_);
    case RateKind::hybrid: return lambda_ + lambda_ * tau_ + lambda_ / r_;
    case RateKind::constant: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

nlohmann::json RateFunction::to_json() const {
  nlohmann::json j{{"kind", to_string(kind_)}, {"lambda", lambda_}};
  if (kind_ != RateKind::constant) j["r"] = r_;
  if (kind_ == RateKind::hybrid) j["tau"] = tau_;
  return j;
}

RateFunction RateFunction::from_json(const nlohmann::json& j) {
  const auto kind = rate_kind_from_string(j.at("kind").get<std::string>());
  const double lambda = j.value("lambda", 1.0);
  const double r = j.value("r", 1.0);
  switch (kind) {
    case RateKind::exponential: return exponential(lambda, r);
    case RateKind::polynomial: return polynomial(lambda, r);
    case RateKind::hybrid: return hybrid(lambda, r, j.value("tau", 0.0));
    case RateKind::constant: return constant(lambda);
  }
  throw std::invalid_argument("unreachable rate kind");
}

}  // namespace lipgd
