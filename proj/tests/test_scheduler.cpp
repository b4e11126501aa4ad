#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lipgd/scheduler.hpp"

using namespace lipgd;

namespace {

const Activation kId(ActivationKind::identity);

Dataset single(double x, double y) { return Dataset{Matrix{{x}}, Vector{y}}; }

Params unit() { return Params{Matrix{{1}}, Vector{1}, Vector{0}, 0.0}; }

// Straight transcription of the four cap displays, used as an oracle.
double oracle_cap(Block blk, const Params& th, const Dataset& data, const Activation& act, double C,
                  double g) {
  const double nB = euclidean_norm(th.B);
  double s = 0, sx = 0, sh = 0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    Vector h(th.W.rows());
    double xn = 0;
    for (std::size_t j = 0; j < th.W.cols(); ++j) xn += data.x(n)[j] * data.x(n)[j];
    for (std::size_t i = 0; i < th.W.rows(); ++i) {
      double z = th.b[i];
      for (std::size_t j = 0; j < th.W.cols(); ++j) z += th.W(i, j) * data.x(n)[j];
      h[i] = act(z);
    }
    double hn = 0;
    for (double v : h) hn += v * v;
    hn = std::sqrt(hn);
    const double beta = nB * hn + std::abs(th.c) + std::abs(data.y(n));
    s += beta;
    sx += beta * std::sqrt(xn);
    sh += beta * hn;
  }
  switch (blk) {
    case Block::W: return C * g / (act.lipschitz() * nB * sx);
    case Block::b: return C * g / (nB * s);
    case Block::B: return C * g / sh;
    case Block::c: return C * g / s;
  }
  return 0;
}

}  // namespace

TEST_CASE("cap_W examples") {
  CHECK(cap_W(unit(), single(1, 0), kId, 1, 1) == doctest::Approx(1.0));
  CHECK(cap_W(unit(), single(1, 1), kId, 1, 1) == doctest::Approx(0.5));
  Params zeroB = unit();
  zeroB.B[0] = 0;
  CHECK(cap_W(zeroB, single(1, 1), kId, 1, 1, 7.0) == 7.0);
}

TEST_CASE("cap_B examples") {
  CHECK(cap_B(unit(), single(1, 0), kId, 1, 1) == doctest::Approx(1.0));
  Params dead = unit();
  dead.W(0, 0) = 0;
  CHECK(cap_B(dead, single(1, 3), kId, 1, 1, 5.0) == 5.0);
  CHECK(cap_B(unit(), single(1, 0.3), kId, 1, 2) == doctest::Approx(2 * cap_B(unit(), single(1, 0.3), kId, 1, 1)));
}

TEST_CASE("cap_b and cap_c examples") {
  CHECK(cap_b(unit(), single(1, 0), kId, 1, 1) == doctest::Approx(1.0));
  CHECK(cap_c(unit(), single(1, 0), kId, 1, 1) == doctest::Approx(1.0));
  Params zeroB = unit();
  zeroB.B[0] = 0;
  CHECK(cap_b(zeroB, single(1, 2), kId, 1, 1, 3.0) == 3.0);
  CHECK(cap_c(zeroB, single(1, 2), kId, 1, 1, 3.0) == doctest::Approx(0.5));
  CHECK(cap_c(zeroB, single(1, 0), kId, 1, 1, 3.0) == 3.0);
}

TEST_CASE("caps match a direct transcription on random snapshots") {
  const Activation sw;
  Rng rng(12);
  for (int k = 0; k < 200; ++k) {
    const std::size_t d = 1 + k % 3, p = 1 + k % 7, N = 1 + k % 5;
    Params th{gaussian_matrix(p, d, rng), gaussian_vector(p, rng), gaussian_vector(p, rng), rng.normal()};
    Dataset data{gaussian_matrix(N, d, rng), gaussian_vector(N, rng)};
    const double C = rng.uniform(0.1, 10), g = rng.uniform(0.01, 2);
    for (Block blk : {Block::W, Block::b, Block::B, Block::c}) {
      const double got = cap_from_terms(blk, cap_terms(th, data, sw), sw.lipschitz(), C, g, 1.0);
      CHECK(got == doctest::Approx(oracle_cap(blk, th, data, sw, C, g)).epsilon(1e-12));
      CHECK(got > 0);
    }
  }
}

TEST_CASE("caps are linear in C and g") {
  const Activation sw;
  Rng rng(1);
  Params th{gaussian_matrix(4, 2, rng), gaussian_vector(4, rng), gaussian_vector(4, rng), 0.3};
  Dataset data{gaussian_matrix(6, 2, rng), gaussian_vector(6, rng)};
  SchedulerConfig cfg;
  for (Block blk : {Block::W, Block::b, Block::B, Block::c}) {
    const double base = block_cap(blk, th, data, sw, cfg, 0.5);
    CHECK(block_cap(blk, th, data, sw, cfg, 1.5) == doctest::Approx(3 * base).epsilon(1e-12));
  }
  cfg.C_W = 4;
  CHECK(block_cap(Block::W, th, data, sw, cfg, 0.5) ==
        doctest::Approx(4 * cap_W(th, data, sw, 1, 0.5)).epsilon(1e-12));
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(cap_terms(Params::zeros({2, 3}), single(1, 0), kId), DimensionError);
}

TEST_CASE("effective learning rates") {
  SchedulerConfig cfg;
  CHECK(effective_alpha(0.3, cfg) == 0.3);
  cfg.mode = LrMode::hybrid_min;
  CHECK_THROWS(effective_alpha(1.0, cfg));
  cfg.lip_RS = 4.0;
  CHECK(effective_alpha(1.0, cfg) == 0.25);
  cfg.lip_RS = 0.5;
  CHECK(effective_alpha(1.0, cfg) == 1.0);
  cfg.mode = LrMode::constant;
  cfg.alpha_const = 0.01;
  CHECK(effective_alpha(1e-4, cfg) == 0.01);
  CHECK_FALSE(cfg.caps_enforced());
  cfg.enforce_caps = true;
  CHECK(effective_alpha(1e-4, cfg) == 1e-4);
  CHECK(cfg.caps_enforced());

  LRVector caps;
  caps.set(Block::W, 0, 0.3);
  caps.set(Block::b, 0, 0.1);
  caps.set(Block::B, 0, 0.2);
  caps.set(Block::c, 0, 0.4);
  const LRVector lr = effective_lr(caps, SchedulerConfig{});
  CHECK(lr.alpha_W == 0.3);
  CHECK(lr.alpha_b == 0.1);
  CHECK(lr.alpha_B == 0.2);
  CHECK(lr.alpha_c == 0.4);
  CHECK(lr.cap_c == 0.4);
}

TEST_CASE("every mode respects the caps except plain constant") {
  Rng rng(2);
  for (LrMode mode : {LrMode::decay_cap, LrMode::hybrid_min}) {
    SchedulerConfig cfg;
    cfg.mode = mode;
    cfg.lip_RS = 3.0;
    for (int k = 0; k < 100; ++k) {
      const double cap = std::exp(rng.uniform(-10, 2));
      CHECK(effective_alpha(cap, cfg) <= cap);
    }
  }
}

TEST_CASE("scheduler config validation and JSON") {
  SchedulerConfig cfg;
  cfg.C_b = 0;
  CHECK_THROWS(cfg.validate());
  cfg.C_b = 1;
  cfg.alpha_max = 0;
  CHECK_THROWS(cfg.validate());
  cfg.alpha_max = 1;
  cfg.lip_RS = -1.0;
  CHECK_THROWS(cfg.validate());

  SchedulerConfig a;
  a.C_W = 300;
  a.mode = LrMode::hybrid_min;
  a.lip_RS = 2.5;
  a.rate = RateFunction::exponential(2, 0.5);
  const SchedulerConfig b = SchedulerConfig::from_json(a.to_json());
  CHECK(b.C_W == 300);
  CHECK(b.mode == LrMode::hybrid_min);
  CHECK(b.lip_RS == 2.5);
  CHECK(b.rate == a.rate);
  CHECK_THROWS(lr_mode_from_string("cosine"));
  CHECK(lr_mode_from_string(to_string(LrMode::constant)) == LrMode::constant);
}
