#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lipgd/network.hpp"

using namespace lipgd;

namespace {

Params make(Matrix W, Vector B, Vector b, double c) { return Params{std::move(W), std::move(B), std::move(b), c}; }

Params random_params(const NetworkShape& shape, Rng& rng) {
  InitOptions opts;
  opts.bias_std = 0.5;
  return init_params(shape, rng, opts);
}

}  // namespace

TEST_CASE("forward pass") {
  const Activation id(ActivationKind::identity);
  const Activation sw(ActivationKind::swish);
  const double x2[] = {2.0};
  CHECK(forward(make(Matrix{{1}, {-1}}, Vector{1, 1}, Vector{0, 0}, 1.0), id, x2) == doctest::Approx(1.0));
  CHECK(forward(Params::zeros({3, 4}), sw, std::vector<double>{1.0, -2.0, 0.5}) == 0.0);
  const double x1[] = {1.0};
  CHECK(forward(make(Matrix{{1}}, Vector{1}, Vector{0}, 0.0), sw, x1) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-12));
  CHECK_THROWS_AS(forward(Params::zeros({2, 1}), sw, x1), DimensionError);
}

TEST_CASE("swish closed forms") {
  CHECK(swish(0.0) == 0.0);
  CHECK(swish_d1(0.0) == doctest::Approx(0.5));
  CHECK(std::abs(swish(10.0) - 10.0) < 1e-3);
  CHECK(std::isfinite(swish(-800.0)));
  CHECK(std::isfinite(swish_d1(800.0)));
}

TEST_CASE("activation derivatives match central differences") {
  for (auto kind : {ActivationKind::swish, ActivationKind::tanh, ActivationKind::identity}) {
    const Activation act(kind);
    for (double x = -6.0; x <= 6.0; x += 0.37) {
      const double h = 1e-5;
      CHECK(act.d1(x) == doctest::Approx((act(x + h) - act(x - h)) / (2 * h)).epsilon(1e-6));
      CHECK(act.d2(x) == doctest::Approx((act.d1(x + h) - act.d1(x - h)) / (2 * h)).epsilon(1e-6).scale(1.0));
      double v = 0, d = 0;
      act.value_and_d1(x, v, d);
      CHECK(v == act(x));
      CHECK(d == doctest::Approx(act.d1(x)).epsilon(1e-15));
    }
  }
}

TEST_CASE("activation Lipschitz constants") {
  const Activation sw(ActivationKind::swish);
  // sup |swish'| from a fine grid.
  double grid_max = 0;
  for (double x = -20; x <= 20; x += 1e-4) grid_max = std::max(grid_max, std::abs(swish_d1(x)));
  CHECK(sw.lipschitz() == doctest::Approx(grid_max).epsilon(1e-8));
  CHECK(sw.lipschitz() == doctest::Approx(1.0998).epsilon(1e-4));
  Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
    CHECK(std::abs(sw(a) - sw(b)) <= sw.lipschitz() * std::abs(a - b) + 1e-12);
  }
  CHECK(Activation(ActivationKind::tanh).lipschitz() == 1.0);
  CHECK(Activation(ActivationKind::identity).lipschitz() == 1.0);
}

TEST_CASE("activation bounds on an interval") {
  const Activation sw(ActivationKind::swish);
  const auto b = sw.bounds_on(-2.0, 3.0, 50001);
  CHECK(b.sigma_max == doctest::Approx(swish(3.0)).epsilon(1e-9));
  CHECK(b.d1_max == doctest::Approx(sw.lipschitz()).epsilon(1e-6));
  CHECK(b.d2_max == doctest::Approx(0.5).epsilon(1e-6));  // σ'' peaks at 0
  CHECK_THROWS(sw.bounds_on(1.0, 0.0));
}

TEST_CASE("initialization") {
  const NetworkShape shape{3, 7};
  Rng a(9), b(9);
  const Params p1 = init_params(shape, a), p2 = init_params(shape, b);
  CHECK(p1 == p2);
  CHECK(max_abs(p1.b.span()) == 0.0);
  CHECK(p1.c == 0.0);
  CHECK(p1.W.rows() == 7);
  CHECK(p1.W.cols() == 3);

  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Params th = init_params({1, 1000}, rng);
    if (operator_norm(th.W) <= std::sqrt(1000.0) + 1.0 + 3.0) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("parameter flattening round-trips") {
  Rng rng(4);
  const NetworkShape shape{2, 5};
  const Params th = random_params(shape, rng);
  const auto flat = th.flatten();
  CHECK(flat.size() == shape.parameter_count());
  CHECK(flat.size() == 2 * 5 + 5 + 5 + 1);
  CHECK(flat[0] == th.W(0, 0));
  CHECK(flat[1] == th.W(0, 1));
  CHECK(flat[10] == th.B[0]);
  CHECK(flat[15] == th.b[0]);
  CHECK(flat.back() == th.c);
  CHECK(Params::unflatten(shape, flat) == th);
  CHECK(params_from_json(shape, params_to_json(th)) == th);
  CHECK_THROWS_AS(Params::unflatten(shape, std::vector<double>(3)), DimensionError);
  CHECK(shape.nominal_parameter_count() == 3 * 6);
}

TEST_CASE("product Lipschitz bound") {
  const Activation id(ActivationKind::identity);
  CHECK(lipschitz_upper_bound(make(Matrix{{1}, {1}}, Vector{1, 1}, Vector{0, 0}, 0), id) ==
        doctest::Approx(2.0));
  CHECK(lipschitz_upper_bound(make(Matrix{{1}, {1}}, Vector{0, 0}, Vector{0, 0}, 0), id) == 0.0);
}

TEST_CASE("empirical Lipschitz estimate") {
  const Activation id(ActivationKind::identity);
  const Box box{Vector{-1}, Vector{1}};
  Rng rng(1);
  CHECK(empirical_lipschitz(make(Matrix{{2}}, Vector{1}, Vector{0}, 0), id, box, 16, rng) ==
        doctest::Approx(2.0));
  CHECK(empirical_lipschitz(Params::zeros({1, 3}), Activation(), box, 16, rng) == 0.0);
  CHECK_THROWS(empirical_lipschitz(Params::zeros({1, 3}), id, box, 1, rng));
  CHECK_THROWS(empirical_lipschitz(Params::zeros({1, 3}), id, Box{Vector{1}, Vector{-1}}, 8, rng));

  const Activation sw;
  for (int k = 0; k < 100; ++k) {
    const Params th = random_params({1 + std::size_t(k % 3), 1 + std::size_t(k % 6)}, rng);
    const std::size_t d = th.W.cols();
    const Box b{Vector(d, -3.0), Vector(d, 3.0)};
    CHECK(empirical_lipschitz(th, sw, b, 64, rng) <= lipschitz_upper_bound(th, sw) * (1 + 1e-12));
  }
}

TEST_CASE("input gradient and difference quotients") {
  const Activation sw;
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const NetworkShape shape{1 + std::size_t(k % 3), 1 + std::size_t(k % 5)};
    const Params th = random_params(shape, rng);
    std::vector<double> x(shape.d), x2(shape.d);
    for (auto& v : x) v = rng.normal();
    for (auto& v : x2) v = rng.normal();
    const Vector g = input_gradient(th, sw, x);
    for (std::size_t j = 0; j < shape.d; ++j) {
      auto xp = x, xm = x;
      const double h = 1e-5;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (forward(th, sw, xp) - forward(th, sw, xm)) / (2 * h);
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
    double dist = 0;
    for (std::size_t j = 0; j < shape.d; ++j) dist += (x[j] - x2[j]) * (x[j] - x2[j]);
    const double quotient = std::abs(forward(th, sw, x) - forward(th, sw, x2)) / std::sqrt(dist);
    CHECK(quotient <= lipschitz_upper_bound(th, sw) * (1 + 1e-12));
  }
}

TEST_CASE("forward is affine in B and c") {
  const Activation sw;
  Rng rng(6);
  const Params th = random_params({2, 4}, rng);
  Params th2 = th;
  for (auto& v : th2.B) v *= 3.0;
  th2.c = 3.0 * th.c;
  const double x[] = {0.3, -1.2};
  CHECK(forward(th2, sw, x) == doctest::Approx(3.0 * forward(th, sw, x)).epsilon(1e-12));
}

TEST_CASE("activation names") {
  CHECK(activation_from_string("swish") == ActivationKind::swish);
  CHECK(to_string(ActivationKind::tanh) == "tanh");
  CHECK_THROWS(activation_from_string("relu"));
}
