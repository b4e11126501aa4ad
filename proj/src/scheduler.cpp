#include "lipgd/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lipgd {

std::string to_string(LrMode mode) {
  switch (mode) {
    case LrMode::decay_cap: return "decay_cap";
    case LrMode::constant: return "constant";
    case LrMode::hybrid_min: return "hybrid_min";
  }
  return "unknown";
}

LrMode lr_mode_from_string(std::string_view name) {
  if (name == "decay_cap") return LrMode::decay_cap;
  if (name == "constant") return LrMode::constant;
  if (name == "hybrid_min") return LrMode::hybrid_min;
  throw std::invalid_argument("unknown scheduler mode '" + std::string(name) + "'");
}

void SchedulerConfig::validate() const {
  if (!(C_W > 0 && C_B > 0 && C_b > 0 && C_c > 0))
    throw std::invalid_argument("scheduler: C_W, C_B, C_b, C_c must all be > 0");
  if (!(alpha_max > 0)) throw std::invalid_argument("scheduler: alpha_max must be > 0");
  if (mode == LrMode::constant && !(alpha_const >= 0))
    throw std::invalid_argument("scheduler: constant alpha must be >= 0");
  if (lip_RS && !(*lip_RS > 0)) throw std::invalid_argument("scheduler: lip_RS must be > 0");
}

nlohmann::json SchedulerConfig::to_json() const {
  nlohmann::json j{{"C_W", C_W},     {"C_B", C_B},
                   {"C_b", C_b},     {"C_c", C_c},
                   {"mode", to_string(mode)},
                   {"alpha_max", alpha_max},
                   {"alpha", alpha_const},
                   {"enforce_caps", enforce_caps},
                   {"rate", rate.to_json()}};
  if (lip_RS) j["lip_RS"] = *lip_RS;
  return j;
}

SchedulerConfig SchedulerConfig::from_json(const nlohmann::json& j) {
  SchedulerConfig cfg;
  cfg.C_W = j.value("C_W", cfg.C_W);
  cfg.C_B = j.value("C_B", cfg.C_B);
  cfg.C_b = j.value("C_b", cfg.C_b);
  cfg.C_c = j.value("C_c", cfg.C_c);
  cfg.mode = lr_mode_from_string(j.value("mode", std::string("decay_cap")));
  cfg.alpha_max = j.value("alpha_max", cfg.alpha_max);
  cfg.alpha_const = j.value("alpha", cfg.alpha_const);
  cfg.enforce_caps = j.value("enforce_caps", cfg.enforce_caps);
  if (j.contains("rate")) cfg.rate = RateFunction::from_json(j.at("rate"));
  if (j.contains("lip_RS") && !j.at("lip_RS").is_null()) cfg.lip_RS = j.at("lip_RS").get<double>();
  cfg.validate();
  return cfg;
}

double LRVector::alpha(Block blk) const {
  switch (blk) {
    case Block::W: return alpha_W;
    case Block::b: return alpha_b;
    case Block::B: return alpha_B;
    case Block::c: return alpha_c;
  }
  return 0.0;
}

double LRVector::cap(Block blk) const {
  switch (blk) {
    case Block::W: return cap_W;
    case Block::b: return cap_b;
    case Block::B: return cap_B;
    case Block::c: return cap_c;
  }
  return 0.0;
}

void LRVector::set(Block blk, double alpha, double cap) {
  switch (blk) {
    case Block::W: alpha_W = alpha; cap_W = cap; break;
    case Block::b: alpha_b = alpha; cap_b = cap; break;
    case Block::B: alpha_B = alpha; cap_B = cap; break;
    case Block::c: alpha_c = alpha; cap_c = cap; break;
  }
}

namespace {

constexpr double kDegenerate = 1e-300;

double ratio(double numerator, double denominator, double alpha_max) {
  if (!(denominator >= kDegenerate)) return alpha_max;
  return numerator / denominator;
}

}  // namespace

CapTerms cap_terms(const Params& theta, const Dataset& data, const Activation& act) {
  if (data.dim() != theta.W.cols()) throw DimensionError("cap: data dimension does not match W");
  if (theta.B.size() != theta.W.rows() || theta.b.size() != theta.W.rows())
    throw DimensionError("cap: inconsistent parameter blocks");
  CapTerms t;
  t.norm_B = euclidean_norm(theta.B);
  const double abs_c = std::abs(theta.c);
  for (std::size_t n = 0; n < data.size(); ++n) {
    Vector h = hidden_preactivation(theta, data.x(n));
    for (double& v : h) v = act(v);
    const double hn = euclidean_norm(h);
    const double bracket = t.norm_B * hn + abs_c + std::abs(data.y(n));
    t.sum_bracket += bracket;
    t.sum_bracket_x += bracket * euclidean_norm(data.x(n));
    t.sum_bracket_h += bracket * hn;
  }
  return t;
}

double cap_from_terms(Block blk, const CapTerms& t, double L_sigma, double C, double g_s,
                      double alpha_max) {
  const double numerator = C * g_s;
  switch (blk) {
    case Block::W: return ratio(numerator, L_sigma * t.norm_B * t.sum_bracket_x, alpha_max);
    case Block::b: return ratio(numerator, t.norm_B * t.sum_bracket, alpha_max);
    case Block::B: return ratio(numerator, t.sum_bracket_h, alpha_max);
    case Block::c: return ratio(numerator, t.sum_bracket, alpha_max);
  }
  return alpha_max;
}

double cap_W(const Params& s, const Dataset& data, const Activation& act, double C_W, double g_s,
             double alpha_max) {
  return cap_from_terms(Block::W, cap_terms(s, data, act), act.lipschitz(), C_W, g_s, alpha_max);
}

double cap_B(const Params& s, const Dataset& data, const Activation& act, double C_B, double g_s,
             double alpha_max) {
  return cap_from_terms(Block::B, cap_terms(s, data, act), act.lipschitz(), C_B, g_s, alpha_max);
}

double cap_b(const Params& s, const Dataset& data, const Activation& act, double C_b, double g_s,
             double alpha_max) {
  return cap_from_terms(Block::b, cap_terms(s, data, act), act.lipschitz(), C_b, g_s, alpha_max);
}

double cap_c(const Params& s, const Dataset& data, const Activation& act, double C_c, double g_s,
             double alpha_max) {
  return cap_from_terms(Block::c, cap_terms(s, data, act), act.lipschitz(), C_c, g_s, alpha_max);
}

double block_cap(Block blk, const Params& snapshot, const Dataset& data, const Activation& act,
                 const SchedulerConfig& cfg, double g_s) {
  switch (blk) {
    case Block::W: return cap_W(snapshot, data, act, cfg.C_W, g_s, cfg.alpha_max);
    case Block::b: return cap_b(snapshot, data, act, cfg.C_b, g_s, cfg.alpha_max);
    case Block::B: return cap_B(snapshot, data, act, cfg.C_B, g_s, cfg.alpha_max);
    case Block::c: return cap_c(snapshot, data, act, cfg.C_c, g_s, cfg.alpha_max);
  }
  return 0.0;
}

double effective_alpha(double cap, const SchedulerConfig& cfg) {
  switch (cfg.mode) {
    case LrMode::decay_cap: return cap;
    case LrMode::constant: return cfg.enforce_caps ? std::min(cfg.alpha_const, cap) : cfg.alpha_const;
    case LrMode::hybrid_min:
      if (!cfg.lip_RS) throw std::invalid_argument("hybrid_min mode needs a Lip(R_S) estimate");
      return std::min(1.0 / *cfg.lip_RS, cap);
  }
  return 0.0;
}

LRVector effective_lr(const LRVector& caps, const SchedulerConfig& cfg) {
  LRVector out;
  for (Block blk : {Block::W, Block::b, Block::B, Block::c})
    out.set(blk, effective_alpha(caps.cap(blk), cfg), caps.cap(blk));
  return out;
}

}  // namespace lipgd
