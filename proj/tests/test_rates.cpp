#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lipgd/rates.hpp"

using namespace lipgd;

namespace {

// Composite Simpson on [a, b]; splits at the hybrid kink when inside.
double integrate_g(const RateFunction& rf, double a, double b, int n = 20000) {
  auto simpson = [&](double lo, double hi) {
    const double h = (hi - lo) / n;
    double s = rf.g(lo) + rf.g(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * rf.g(lo + i * h);
    return s * h / 3.0;
  };
  if (rf.kind() == RateKind::hybrid && a < rf.tau() && rf.tau() < b)
    return simpson(a, rf.tau()) + simpson(rf.tau(), b);
  return simpson(a, b);
}

}  // namespace

TEST_CASE("g closed forms") {
  const auto hy = RateFunction::hybrid(1.0, 1.0, 5.0);
  CHECK(hy.g(3.0) == 1.0);
  CHECK(hy.g(6.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(RateFunction::exponential(2.0, 1.0).g(0.0) == doctest::Approx(2.0));
  CHECK(RateFunction::polynomial(3.0, 2.0).g(2.0) == doctest::Approx(0.75));
  CHECK_THROWS(hy.g(-0.5));
}

TEST_CASE("G closed forms") {
  const auto hy = RateFunction::hybrid(1.0, 1.0, 5.0);
  CHECK(hy.G(6.0) == doctest::Approx(1.0 + 5.0 + (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(hy.G(3.0) == doctest::Approx(4.0));
  CHECK(RateFunction::polynomial(1.0, 2.0).G(1.0) == doctest::Approx(2.0));
  CHECK(RateFunction::exponential(2.0, 1.0).G(1e3) == doctest::Approx(2.0));
  CHECK_THROWS(RateFunction::polynomial(1.0, 2.0).G(0.5));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(RateFunction::polynomial(1.0, 1.0));
  CHECK_THROWS(RateFunction::polynomial(1.0, 0.5));
  CHECK_THROWS(RateFunction::exponential(0.0, 1.0));
  CHECK_THROWS(RateFunction::exponential(1.0, -1.0));
  CHECK_THROWS(RateFunction::hybrid(1.0, 1.0, -1.0));
}

TEST_CASE("supremum and g(1)") {
  const auto ex = RateFunction::exponential(1.0, 1.0).summary();
  CHECK(ex.G_star == doctest::Approx(1.0));
  CHECK(ex.g_1 == doctest::Approx(std::exp(-1.0)));
  CHECK(RateFunction::hybrid(1.0, 1.0, 5.0).sup() == doctest::Approx(7.0));
  // The displayed polynomial G decreases on [1, ∞), so its supremum is G(1).
  const auto poly = RateFunction::polynomial(1.0, 2.0);
  CHECK(poly.sup() == doctest::Approx(2.0));
  for (double t : {1.0, 2.0, 10.0, 1e9}) CHECK(poly.G(t) <= poly.sup() + 1e-12);
  CHECK(std::isinf(RateFunction::constant(0.01).sup()));
}

TEST_CASE("G differences integrate g") {
  for (const auto& rf : {RateFunction::exponential(2.0, 0.3), RateFunction::hybrid(1.5, 0.2, 7.0),
                         RateFunction::hybrid(0.01, 0.1, 50.0)}) {
    for (auto [a, b] : {std::pair{1.0, 3.0}, {2.5, 9.0}, {1.0, 80.0}, {6.0, 7.5}}) {
      const double lhs = rf.G(b) - rf.G(a);
      CHECK(lhs == doctest::Approx(integrate_g(rf, a, b)).epsilon(1e-6));
    }
  }
}

TEST_CASE("G is non-decreasing and bounded by its supremum") {
  for (const auto& rf : {RateFunction::exponential(2.0, 0.3), RateFunction::hybrid(1.0, 1.0, 5.0)}) {
    double prev = rf.G(1.0);
    for (double t = 1.0; t <= 200.0; t += 0.05) {
      const double cur = rf.G(t);
      CHECK(cur >= prev - 1e-15);
      CHECK(cur <= rf.sup() + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("hybrid g is continuous at tau") {
  const auto hy = RateFunction::hybrid(2.0, 0.7, 4.0);
  CHECK(hy.g(4.0) == 2.0);
  CHECK(hy.g(4.0 + 1e-12) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(hy.g(4.0 - 1e-12) == 2.0);
}

TEST_CASE("json round trip") {
  for (const auto& rf : {RateFunction::exponential(2.0, 0.3), RateFunction::polynomial(1.0, 3.0),
                         RateFunction::hybrid(1.0, 1.0, 50.0), RateFunction::constant(0.5)}) {
    CHECK(RateFunction::from_json(rf.to_json()) == rf);
  }
  const auto j = nlohmann::json::parse(R"({"kind": "hybrid", "lambda": 1.0, "r": 1.0, "tau": 50})");
  CHECK(RateFunction::from_json(j) == RateFunction::hybrid(1.0, 1.0, 50.0));
  CHECK_THROWS(RateFunction::from_json(nlohmann::json::parse(R"({"kind": "cosine"})")));
}
