#include "lipgd/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lipgd {

void NetworkShape::validate() const {
  if (d < 1 || p < 1) throw std::invalid_argument("network shape needs d >= 1 and p >= 1");
}

Params Params::zeros(const NetworkShape& shape) {
  shape.validate();
  return Params{Matrix(shape.p, shape.d), Vector(shape.p), Vector(shape.p), 0.0};
}

void Params::validate() const {
  if (W.rows() == 0 || W.cols() == 0) throw DimensionError("W must be non-empty");
  if (B.size() != W.rows() || b.size() != W.rows())
    throw DimensionError("B and b must have one entry per hidden unit");
  if (!finite()) throw std::invalid_argument("parameters must be finite");
}

bool Params::finite() const {
  return all_finite(W.span()) && all_finite(B.span()) && all_finite(b.span()) &&
         std::isfinite(c);
}

double Params::max_abs_entry() const {
  return std::max({max_abs(W.span()), max_abs(B.span()), max_abs(b.span()), std::abs(c)});
}

std::vector<double> Params::flatten() const {
  std::vector<double> flat;
  flat.reserve(W.size() + B.size() + b.size() + 1);
  flat.insert(flat.end(), W.span().begin(), W.span().end());
  flat.insert(flat.end(), B.begin(), B.end());
  flat.insert(flat.end(), b.begin(), b.end());
  flat.push_back(c);
  return flat;
}

Params Params::unflatten(const NetworkShape& shape, std::span<const double> flat) {
  shape.validate();
  if (flat.size() != shape.parameter_count())
    throw DimensionError("flat parameter vector has " + std::to_string(flat.size()) +
                         " entries, expected " + std::to_string(shape.parameter_count()));
  const std::size_t p = shape.p;
  const std::size_t nw = p * shape.d;
  Params theta;
  theta.W = Matrix(p, shape.d, std::vector<double>(flat.begin(), flat.begin() + nw));
  theta.B = Vector(std::vector<double>(flat.begin() + nw, flat.begin() + nw + p));
  theta.b = Vector(std::vector<double>(flat.begin() + nw + p, flat.begin() + nw + 2 * p));
  theta.c = flat.back();
  return theta;
}

nlohmann::json params_to_json(const Params& theta) { return theta.flatten(); }

Params params_from_json(const NetworkShape& shape, const nlohmann::json& flat) {
  if (!flat.is_array()) throw std::invalid_argument("parameters must be a JSON array");
  return Params::unflatten(shape, flat.get<std::vector<double>>());
}

namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// sup |swish'| is attained where swish'' = 0 on x > 0; bisect for the root.
double swish_lipschitz() {
  double lo = 1.0, hi = 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (swish_d2(mid) > 0 ? lo : hi) = mid;
  }
  return swish_d1(0.5 * (lo + hi));
}

}  // namespace

double swish(double x) { return x * logistic(x); }

double swish_d1(double x) {
  const double s = logistic(x);
  return s + x * s * (1.0 - s);
}

double swish_d2(double x) {
  const double s = logistic(x);
  const double ds = s * (1.0 - s);
  return 2.0 * ds + x * ds * (1.0 - 2.0 * s);
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::swish: return "swish";
    case ActivationKind::identity: return "identity";
    case ActivationKind::tanh: return "tanh";
  }
  return "unknown";
}

ActivationKind activation_from_string(std::string_view name) {
  if (name == "swish") return ActivationKind::swish;
  if (name == "identity") return ActivationKind::identity;
  if (name == "tanh") return ActivationKind::tanh;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Activation::Activation(ActivationKind kind) : kind_(kind) {
  static const double kSwishLipschitz = swish_lipschitz();
  lipschitz_ = kind == ActivationKind::swish ? kSwishLipschitz : 1.0;
}

double Activation::operator()(double x) const {
  switch (kind_) {
    case ActivationKind::swish: return swish(x);
    case ActivationKind::identity: return x;
    case ActivationKind::tanh: return std::tanh(x);
  }
  return 0.0;
}

void Activation::value_and_d1(double x, double& value, double& d1) const {
  switch (kind_) {
    case ActivationKind::swish: {
      const double s = logistic(x);
      value = x * s;
      d1 = s + x * s * (1.0 - s);
      return;
    }
    case ActivationKind::identity:
      value = x;
      d1 = 1.0;
      return;
    case ActivationKind::tanh: {
      const double t = std::tanh(x);
      value = t;
      d1 = 1.0 - t * t;
      return;
    }
  }
}

double Activation::d1(double x) const {
  switch (kind_) {
    case ActivationKind::swish: return swish_d1(x);
    case ActivationKind::identity: return 1.0;
    case ActivationKind::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 0.0;
}

double Activation::d2(double x) const {
  switch (kind_) {
    case ActivationKind::swish: return swish_d2(x);
    case ActivationKind::identity: return 0.0;
    case ActivationKind::tanh: {
      const double t = std::tanh(x);
      return -2.0 * t * (1.0 - t * t);
    }
  }
  return 0.0;
}

ActivationBounds Activation::bounds_on(double lo, double hi, std::size_t grid) const {
  if (!(lo <= hi)) throw std::invalid_argument("bounds_on: empty interval");
  grid = std::max<std::size_t>(grid, 2);
  ActivationBounds out;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    out.sigma_max = std::max(out.sigma_max, std::abs((*this)(x)));
    out.d1_max = std::max(out.d1_max, std::abs(d1(x)));
    out.d2_max = std::max(out.d2_max, std::abs(d2(x)));
  }
  return out;
}

Vector hidden_preactivation(const Params& theta, std::span<const double> x) {
  Vector z = matvec(theta.W, x);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += theta.b[i];
  return z;
}

double forward(const Params& theta, const Activation& act, std::span<const double> x) {
  const Vector z = hidden_preactivation(theta, x);
  double out = theta.c;
  for (std::size_t i = 0; i < z.size(); ++i) out += theta.B[i] * act(z[i]);
  return out;
}

Vector input_gradient(const Params& theta, const Activation& act, std::span<const double> x) {
  const Vector z = hidden_preactivation(theta, x);
  Vector grad(theta.W.cols());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double w = theta.B[i] * act.d1(z[i]);
    if (w == 0.0) continue;
    auto row = theta.W.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) grad[j] += w * row[j];
  }
  return grad;
}

Params init_params(const NetworkShape& shape, Rng& rng, const InitOptions& opts) {
  shape.validate();
  Params theta = Params::zeros(shape);
  theta.W = gaussian_matrix(shape.p, shape.d, rng);
  theta.B = gaussian_vector(shape.p, rng);
  if (opts.bias_std > 0.0) {
    for (double& v : theta.b) v = opts.bias_std * rng.normal();
    theta.c = opts.bias_std * rng.normal();
  }
  return theta;
}

double lipschitz_upper_bound(const Params& theta, const Activation& act) {
  const double nb = euclidean_norm(theta.B);
  if (nb == 0.0) return 0.0;
  return act.lipschitz() * nb * operator_norm(theta.W);
}

double empirical_lipschitz(const Params& theta, const Activation& act, const Box& box,
                           std::size_t n_samples, Rng& rng) {
  const std::size_t d = theta.W.cols();
  if (box.lo.size() != d || box.hi.size() != d) throw DimensionError("box dimension mismatch");
  for (std::size_t j = 0; j < d; ++j)
    if (!(box.lo[j] <= box.hi[j])) throw std::invalid_argument("empirical_lipschitz: empty box");
  if (n_samples < 2) throw std::invalid_argument("empirical_lipschitz: need at least 2 samples");
  double best = 0.0;
  Vector x(d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(box.lo[j], box.hi[j]);
    best = std::max(best, euclidean_norm(input_gradient(theta, act, x.span())));
  }
  return best;
}

}  // namespace lipgd
