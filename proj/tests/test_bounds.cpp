#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lipgd/bounds.hpp"
#include "lipgd/trainer.hpp"

using namespace lipgd;

namespace {

// Second transcription of the dimensional constant, written from the
// exponent form 2^{1-k/2}.
double dimensional_constant_oracle(double k) {
  const double a = k / 2 - 1;
  const double inner = a / (2 * (1 - std::pow(2.0, 1 - k / 2)));
  return 2 * std::pow(inner, 2 / k) * (1 + 1 / (2 * a)) * std::sqrt(k);
}

TrainLog decay_run(std::uint64_t seed, std::size_t T = 40) {
  TrainConfig cfg;
  cfg.shape = {1, 10};
  cfg.T = T;
  cfg.seed = seed;
  cfg.lip_samples = 0;
  cfg.scheduler.rate = RateFunction::hybrid(0.01, 0.1, 20.0);
  Rng rng = Rng(seed).derive(stream::data);
  Matrix xs(30, 1);
  Vector ys(30);
  for (std::size_t n = 0; n < 30; ++n) {
    xs(n, 0) = rng.uniform(-2, 2);
    ys[n] = std::sin(xs(n, 0)) + 0.05 * rng.normal();
  }
  return train(cfg, Dataset{xs, ys});
}

}  // namespace

TEST_CASE("Lipschitz bound right-hand side") {
  BoundInputs in;
  in.N = 4;
  in.G_T = 1;
  in.g_1 = 1;
  CHECK(lipschitz_bound_rhs(in) == doctest::Approx(16.0).epsilon(1e-12));

  BoundInputs collapse;
  collapse.L_sigma = 1.0998;
  collapse.p = 200;
  collapse.kappa = 0;
  collapse.eta = 0;
  CHECK(lipschitz_bound_rhs(collapse) == doctest::Approx(1.0998 * 200).epsilon(1e-12));

  const double base = lipschitz_bound_rhs(in);
  BoundInputs more = in;
  more.eta = 2;
  CHECK(lipschitz_bound_rhs(more) > base);
  more = in;
  more.G_T = 2;
  CHECK(lipschitz_bound_rhs(more) > base);
  more = in;
  more.N = 8;
  CHECK(lipschitz_bound_rhs(more) < base);
  more.N = 0;
  CHECK_THROWS(lipschitz_bound_rhs(more));
}

TEST_CASE("per-seed Lipschitz bound") {
  CHECK(per_omega_lip_bound(3, 2, 1, 1, 5, 0, 0, 1.1) == doctest::Approx(1.1 * 3 * 2));
  CHECK(per_omega_lip_bound(1, 1, 1, 1, 2, 3, 1, 1.0998) == doctest::Approx(25 * 1.0998).epsilon(1e-12));
}

TEST_CASE("norm growth right-hand side") {
  CHECK(norm_growth_rhs(1, 1, 2, 3, 1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(norm_growth_rhs(1.7, 0, 2, 3, 1) == 1.7);
  const double a = norm_growth_rhs(1, 2, 3, 1, 0.5), b = norm_growth_rhs(1, 2, 3, 2, 0.5),
               c = norm_growth_rhs(1, 2, 3, 3, 0.5);
  CHECK(c - b == doctest::Approx(b - a).epsilon(1e-12));
}

TEST_CASE("parameter cube radius") {
  CubeInputs zero;
  zero.C = {1, 3, 2, 1};
  zero.N = 4;
  zero.G_star = 5;
  zero.g_1 = 1;
  CHECK(param_cube_M(zero) == doctest::Approx(2.0 / 4 * 6 * 3).epsilon(1e-12));

  CubeInputs w;
  w.sup_norms0 = {1, 0, 0, 0};
  w.C = {1, 1e-9, 1e-9, 1e-9};
  w.N = 2;
  w.d = 4;
  w.G_star = 3;
  w.g_1 = 1;
  CHECK(param_cube_M(w) == doctest::Approx(6.0).epsilon(1e-12));

  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    CubeInputs a;
    a.sup_norms0 = {rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)};
    a.C = {rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.1, 2)};
    a.N = rng.uniform(1, 10);
    a.d = 1 + k % 4;
    a.G_star = rng.uniform(0, 5);
    a.g_1 = rng.uniform(0, 1);
    const double M = param_cube_M(a);
    CubeInputs b = a;
    b.sup_norms0[k % 4] += 0.1;
    CHECK(param_cube_M(b) >= M);
    b = a;
    b.C[k % 4] += 0.1;
    CHECK(param_cube_M(b) >= M);
    b = a;
    b.G_star += 0.1;
    CHECK(param_cube_M(b) >= M);
    b = a;
    b.d += 1;
    CHECK(param_cube_M(b) >= M);
  }
}

TEST_CASE("dimensional constant") {
  CHECK(dimensional_constant(4) == doctest::Approx(6.0).epsilon(1e-12));
  for (double k = 3; k <= 100; k += 1) {
    CHECK(dimensional_constant(k) == doctest::Approx(dimensional_constant_oracle(k)).epsilon(1e-12));
  }
  CHECK(std::isfinite(dimensional_constant(3)));
  CHECK(dimensional_constant(3) > 0);
  // C_k / √k settles as k grows.
  const double r50 = dimensional_constant(50) / std::sqrt(50.0), r100 = dimensional_constant(100) / std::sqrt(100.0);
  CHECK(std::abs(r100 - r50) < 0.05 * r50);
  CHECK(r100 < 3.0);
  CHECK_THROWS_AS(dimensional_constant(2), std::domain_error);
  CHECK_THROWS_AS(dimensional_constant(1.5), std::domain_error);
}

TEST_CASE("generalization bound") {
  GenBoundInputs in;
  in.d = 1;
  in.D = 2;
  in.N = 100;
  in.delta = 8 * std::exp(-4.0);  // ln(8/δ) = 4
  const double expected = dimensional_constant_oracle(3) / 100 + 2.0 / std::sqrt(200.0);
  CHECK(generalization_bound(in) == doctest::Approx(expected).epsilon(1e-12));

  GenBoundInputs more = in;
  more.N = 1000;
  CHECK(generalization_bound(more) < generalization_bound(in));
  more = in;
  more.delta = 0.01;
  CHECK(generalization_bound(more) > generalization_bound(in));
  more.delta = 0;
  CHECK_THROWS(generalization_bound(more));
  more.delta = 1.5;
  CHECK_THROWS(generalization_bound(more));
  more = in;
  more.D = 1;
  CHECK_THROWS_AS(generalization_bound(more), std::domain_error);
  CHECK(generalization_eta(2.0, 8.0) == doctest::Approx(0.5));
}

TEST_CASE("compliant decay runs pass every audit") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TrainLog log = decay_run(seed);
    const BoundReport report = audit_trajectory(log);
    CHECK(report.all_pass());
    REQUIRE(report.checks.size() == 7);
    for (const auto& c : report.checks) CHECK(c.evaluated > 0);
    CHECK(report.check("alpha_le_cap").evaluated == 4 * 40);
    // The per-seed bound also dominates the product bound at every step.
    CHECK(report.check("lip_per_omega").worst_slack >= 0);
  }
}

TEST_CASE("an injected step-size violation is caught at that step") {
  TrainLog log = decay_run(1);
  log.records[17].alpha_B = 10 * log.records[17].cap_B;
  const BoundReport report = audit_trajectory(log);
  const auto& alpha = report.check("alpha_le_cap");
  CHECK_FALSE(alpha.pass);
  CHECK(alpha.violations == 1);
  CHECK(alpha.first_violation_t == log.records[17].t);
  CHECK(alpha.worst_t == log.records[17].t);
  CHECK_FALSE(report.all_pass());
  CHECK(report.check("norm_W").pass);

  TrainLog blown = decay_run(1);
  blown.records[30].norm_W_op *= 100;
  const auto& w = audit_trajectory(blown).check("norm_W");
  CHECK_FALSE(w.pass);
  CHECK(w.first_violation_t == 30);

  TrainLog nan = decay_run(1);
  nan.records[3].norm_B = std::nan("");
  CHECK_FALSE(audit_trajectory(nan).check("norm_B").pass);
  CHECK_THROWS(audit_trajectory(TrainLog{}));
}

TEST_CASE("report JSON") {
  const auto j = audit_trajectory(decay_run(2, 5)).to_json();
  CHECK(j.at("all_pass").get<bool>());
  CHECK(j.at("checks").size() == 7);
  CHECK(j.at("checks")[0].at("name") == "norm_W");
  CHECK_THROWS(audit_trajectory(decay_run(2, 5)).check("missing"));
}

TEST_CASE("convergence rate check") {
  SUBCASE("interpolation skips the ratio") {
    const auto r = convergence_rate_check({{10, {1.0, 0.5, 0.0}}, {40, {1.0, 0.5, 0.0, 0.0}}});
    CHECK(r.converged);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].skipped);
    CHECK(std::isnan(r.pairs[0].ratio));
  }
  SUBCASE("longer budgets never increase the running minimum") {
    std::vector<double> g;
    for (int t = 0; t <= 400; ++t) g.push_back(1.0 / std::sqrt(t + 1.0) + 0.01 * std::sin(t));
    const auto r = convergence_rate_check({{400, g}, {100, g}});
    CHECK(r.budgets == std::vector<std::size_t>{100, 400});
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].ratio >= 1.0);
    CHECK(r.pairs[0].predicted == doctest::Approx(std::sqrt(401.0 / 101.0)));
    CHECK_FALSE(r.converged);
  }
  SUBCASE("the budget bounds the window") {
    const auto r = convergence_rate_check({{1, {3.0, 2.0, 1.0}}, {2, {3.0, 2.0, 1.0}}});
    CHECK(r.min_grad_norm == std::vector<double>{2.0, 1.0});
  }
  CHECK_THROWS(convergence_rate_check({{10, {1.0}}}));
  CHECK_THROWS(convergence_rate_check({{10, {1.0}}, {10, {1.0}}}));
  CHECK_THROWS(convergence_rate_check({{10, {}}, {20, {1.0}}}));
}
