#include "lipgd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lipgd/bounds.hpp"

namespace lipgd {

double Gradient::norm() const {
  const double nw = euclidean_norm(W.span());
  const double nB = euclidean_norm(B);
  const double nb = euclidean_norm(b);
  return std::sqrt(nw * nw + nB * nB + nb * nb + c * c);
}

namespace {

// Gradient of R_S and the cap sums at one snapshot, from a single data pass.
struct SnapshotEval {
  Gradient grad;
  CapTerms terms;
  double mse = 0.0;
};

SnapshotEval evaluate_snapshot(const Params& theta, const Dataset& data, const Activation& act) {
  const std::size_t p = theta.W.rows();
  const std::size_t d = theta.W.cols();
  if (data.dim() != d) throw DimensionError("data dimension does not match W");
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  if (theta.B.size() != p || theta.b.size() != p) throw DimensionError("inconsistent parameter blocks");

  SnapshotEval out;
  out.grad = Gradient{Matrix(p, d), Vector(p), Vector(p), 0.0};
  out.terms.norm_B = euclidean_norm(theta.B);
  const double abs_c = std::abs(theta.c);
  const double scale = 2.0 / static_cast<double>(data.size());

  Vector h(p), dh(p);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto x = data.x(n);
    double f = theta.c;
    for (std::size_t i = 0; i < p; ++i) {
      const auto w = theta.W.row(i);
      double z = theta.b[i];
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
      act.value_and_d1(z, h[i], dh[i]);
      f += theta.B[i] * h[i];
    }
    const double r = f - data.y(n);
    out.mse += r * r;

    const double hn = euclidean_norm(h);
    const double bracket = out.terms.norm_B * hn + abs_c + std::abs(data.y(n));
    out.terms.sum_bracket += bracket;
    out.terms.sum_bracket_x += bracket * euclidean_norm(x);
    out.terms.sum_bracket_h += bracket * hn;

    const double sr = scale * r;
    out.grad.c += sr;
    for (std::size_t i = 0; i < p; ++i) {
      out.grad.B[i] += sr * h[i];
      const double gi = sr * theta.B[i] * dh[i];
      out.grad.b[i] += gi;
      auto row = out.grad.W.row(i);
      for (std::size_t j = 0; j < d; ++j) row[j] += gi * x[j];
    }
  }
  out.mse /= static_cast<double>(data.size());
  return out;
}

const char* block_name(Block blk) {
  switch (blk) {
    case Block::W: return "W";
    case Block::b: return "b";
    case Block::B: return "B";
    case Block::c: return "c";
  }
  return "?";
}

// theta.blk -= alpha * grad.blk
void apply_block(Params& theta, const Gradient& grad, Block blk, double alpha) {
  switch (blk) {
    case Block::W:
      for (std::size_t k = 0; k < theta.W.size(); ++k) theta.W.span()[k] -= alpha * grad.W.span()[k];
      break;
    case Block::b:
      for (std::size_t i = 0; i < theta.b.size(); ++i) theta.b[i] -= alpha * grad.b[i];
      break;
    case Block::B:
      for (std::size_t i = 0; i < theta.B.size(); ++i) theta.B[i] -= alpha * grad.B[i];
      break;
    case Block::c: theta.c -= alpha * grad.c; break;
  }
}

bool block_finite(const Params& theta, Block blk) {
  switch (blk) {
    case Block::W: return all_finite(theta.W.span());
    case Block::b: return all_finite(theta.b.span());
    case Block::B: return all_finite(theta.B.span());
    case Block::c: return std::isfinite(theta.c);
  }
  return false;
}

constexpr std::array<Block, 4> kOrder{Block::W, Block::b, Block::B, Block::c};

}  // namespace

Gradient risk_gradient(const Params& theta, const Dataset& data, const Activation& act) {
  return evaluate_snapshot(theta, data, act).grad;
}

double grad_norm(const Params& theta, const Dataset& data, const Activation& act) {
  return risk_gradient(theta, data, act).norm();
}

RateProvider fixed_rates(const LRVector& lr) {
  return [lr](Block blk, const Params&, const CapTerms&) { return BlockRate{lr.alpha(blk), lr.cap(blk)}; };
}

RateProvider scheduled_rates(const SchedulerConfig& config, const Activation& act, std::size_t s) {
  const double g_s = config.rate.g(static_cast<double>(s));
  const double L = act.lipschitz();
  return [config, g_s, L](Block blk, const Params&, const CapTerms& terms) {
    double C = config.C_W;
    switch (blk) {
      case Block::W: C = config.C_W; break;
      case Block::b: C = config.C_b; break;
      case Block::B: C = config.C_B; break;
      case Block::c: C = config.C_c; break;
    }
    const double cap = cap_from_terms(blk, terms, L, C, g_s, config.alpha_max);
    return BlockRate{effective_alpha(cap, config), cap};
  };
}

StepResult gd_step(const Params& prev, const Dataset& data, const Activation& act,
                   const RateProvider& rates, StepOrder order) {
  StepResult out{prev, {}};
  std::optional<SnapshotEval> frozen;
  if (order == StepOrder::simultaneous) frozen = evaluate_snapshot(prev, data, act);
  for (Block blk : kOrder) {
    const Params& snapshot = order == StepOrder::sequential ? out.theta : prev;
    const SnapshotEval eval = frozen ? *frozen : evaluate_snapshot(snapshot, data, act);
    const BlockRate rate = rates(blk, snapshot, eval.terms);
    out.lr.set(blk, rate.alpha, rate.cap);
    apply_block(out.theta, eval.grad, blk, rate.alpha);
    if (!block_finite(out.theta, blk)) {
      throw TrainingError(std::string("non-finite update in block ") + block_name(blk) +
                          " (alpha = " + std::to_string(rate.alpha) + ")");
    }
  }
  return out;
}

BacktrackResult backtracking_step(const Params& theta, const Dataset& data,
                                  const Activation& act, double alpha0, double shrink,
                                  double armijo_c) {
  if (!(alpha0 > 0)) throw std::invalid_argument("backtracking: alpha0 must be > 0");
  if (!(shrink > 0 && shrink < 1)) throw std::invalid_argument("backtracking: shrink must be in (0, 1)");
  if (!(armijo_c > 0 && armijo_c < 1)) throw std::invalid_argument("backtracking: armijo_c must be in (0, 1)");

  const SnapshotEval eval = evaluate_snapshot(theta, data, act);
  const double gn = eval.grad.norm();
  BacktrackResult out{theta, 0.0, true, 0};
  if (gn == 0.0) return out;

  double alpha = alpha0;
  for (std::size_t k = 0; k <= 60; ++k) {
    Params trial = theta;
    for (Block blk : kOrder) apply_block(trial, eval.grad, blk, alpha);
    if (trial.finite()) {
      const double risk = mse_risk(trial, act, data);
      if (risk <= eval.mse - armijo_c * alpha * gn * gn) {
        out.theta = std::move(trial);
        out.alpha = alpha;
        out.shrinks = k;
        return out;
      }
    }
    if (k == 60) break;
    alpha *= shrink;
  }
  out.accepted = false;
  out.shrinks = 60;
  return out;
}

double estimate_lip_RS(const Dataset& data, const Activation& act, const NetworkShape& shape,
                       double cube_M, std::size_t n_probe, Rng& rng) {
  if (!(cube_M > 0)) throw std::invalid_argument("estimate_lip_RS: cube_M must be > 0");
  shape.validate();
  std::vector<double> flat(shape.parameter_count());
  double best = 0.0;
  for (std::size_t k = 0; k < n_probe; ++k) {
    for (double& v : flat) v = rng.uniform(-cube_M, cube_M);
    const Params theta = Params::unflatten(shape, flat);
    best = std::max(best, grad_norm(theta, data, act));
  }
  return 1.5 * best;
}

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
  shape.validate();
  scheduler.validate();
  if (log_every < 1) throw std::invalid_argument("log_every must be >= 1");
  if (lip_samples == 1) throw std::invalid_argument("lip_samples must be 0 or >= 2");
  if (!(loss.huber_delta > 0)) throw std::invalid_argument("huber delta must be > 0");
  if (lip_domain) {
    if (lip_domain->lo.size() != shape.d || lip_domain->hi.size() != shape.d)
      throw DimensionError("lip_domain dimension does not match d");
  }
  if (backtracking) {
    const auto& bt = *backtracking;
    if (!(bt.alpha0 > 0) || !(bt.shrink > 0 && bt.shrink < 1) || !(bt.armijo_c > 0 && bt.armijo_c < 1))
      throw std::invalid_argument("invalid backtracking options");
  }
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j{{"d", shape.d},
                   {"p", shape.p},
                   {"activation", to_string(activation)},
                   {"scheduler", scheduler.to_json()},
                   {"T", T},
                   {"seed", seed},
                   {"huber_delta", loss.huber_delta},
                   {"log_every", log_every},
                   {"lip_samples", lip_samples},
                   {"bias_init_std", init.bias_std},
                   {"simultaneous", order == StepOrder::simultaneous},
                   {"lip_RS_probes", lip_RS_probes}};
  if (lip_domain) j["lip_domain"] = {{"lo", lip_domain->lo.values()}, {"hi", lip_domain->hi.values()}};
  if (backtracking)
    j["backtracking"] = {{"alpha0", backtracking->alpha0},
                         {"shrink", backtracking->shrink},
                         {"armijo_c", backtracking->armijo_c}};
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.shape.d = j.value("d", std::size_t{1});
  cfg.shape.p = j.value("p", std::size_t{1});
  cfg.activation = activation_from_string(j.value("activation", std::string("swish")));
  if (j.contains("scheduler")) cfg.scheduler = SchedulerConfig::from_json(j.at("scheduler"));
  cfg.T = j.value("T", cfg.T);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.loss.huber_delta = j.value("huber_delta", cfg.loss.huber_delta);
  cfg.log_every = j.value("log_every", cfg.log_every);
  cfg.lip_samples = j.value("lip_samples", cfg.lip_samples);
  cfg.init.bias_std = j.value("bias_init_std", cfg.init.bias_std);
  cfg.order = j.value("simultaneous", false) ? StepOrder::simultaneous : StepOrder::sequential;
  cfg.lip_RS_probes = j.value("lip_RS_probes", cfg.lip_RS_probes);
  if (j.contains("lip_domain")) {
    const auto& b = j.at("lip_domain");
    cfg.lip_domain = Box{Vector(b.at("lo").get<std::vector<double>>()),
                         Vector(b.at("hi").get<std::vector<double>>())};
  }
  if (j.contains("backtracking")) {
    const auto& b = j.at("backtracking");
    BacktrackingOptions bt;
    bt.alpha0 = b.value("alpha0", bt.alpha0);
    bt.shrink = b.value("shrink", bt.shrink);
    bt.armijo_c = b.value("armijo_c", bt.armijo_c);
    cfg.backtracking = bt;
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Records and log IO

const std::vector<std::string>& iteration_columns() {
  static const std::vector<std::string> cols{
      "t",         "alpha_W",   "alpha_B",   "alpha_b",       "alpha_c",  "cap_W",
      "cap_B",     "cap_b",     "cap_c",     "norm_W_op",     "norm_B",   "norm_b",
      "abs_c",     "lip_bound", "lip_empirical", "mse_risk",  "huber_risk", "grad_norm",
      "wallclock_ns", "sup_W",  "sup_B",     "sup_b"};
  return cols;
}

namespace {

template <class Fn>
void for_each_field(IterationRecord& r, Fn&& fn) {
  fn("alpha_W", r.alpha_W);
  fn("alpha_B", r.alpha_B);
  fn("alpha_b", r.alpha_b);
  fn("alpha_c", r.alpha_c);
  fn("cap_W", r.cap_W);
  fn("cap_B", r.cap_B);
  fn("cap_b", r.cap_b);
  fn("cap_c", r.cap_c);
  fn("norm_W_op", r.norm_W_op);
  fn("norm_B", r.norm_B);
  fn("norm_b", r.norm_b);
  fn("abs_c", r.abs_c);
  fn("lip_bound", r.lip_bound);
  fn("lip_empirical", r.lip_empirical);
  fn("mse_risk", r.mse_risk);
  fn("huber_risk", r.huber_risk);
  fn("grad_norm", r.grad_norm);
  fn("sup_W", r.sup_W);
  fn("sup_B", r.sup_B);
  fn("sup_b", r.sup_b);
}

}  // namespace

double record_value(const IterationRecord& rec, std::string_view column) {
  if (column == "t") return static_cast<double>(rec.t);
  if (column == "wallclock_ns") return static_cast<double>(rec.wallclock_ns);
  auto copy = rec;
  double out = std::numeric_limits<double>::quiet_NaN();
  bool found = false;
  for_each_field(copy, [&](std::string_view name, double& v) {
    if (name == column) {
      out = v;
      found = true;
    }
  });
  if (!found) throw std::invalid_argument("unknown record column '" + std::string(column) + "'");
  return out;
}

void write_log_csv(const TrainLog& log, std::ostream& out) {
  const auto& cols = iteration_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  out.precision(17);
  for (const auto& rec : log.records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      if (cols[i] == "t") out << rec.t;
      else if (cols[i] == "wallclock_ns") out << rec.wallclock_ns;
      else out << record_value(rec, cols[i]);
    }
    out << '\n';
  }
}

std::vector<IterationRecord> read_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("log CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  for (const auto& required : iteration_columns()) {
    if (std::find(header.begin(), header.end(), required) == header.end())
      throw std::invalid_argument("log CSV is missing column '" + required + "'");
  }
  std::vector<IterationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw std::invalid_argument("log CSV row has the wrong number of cells");
    IterationRecord rec;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& name = header[i];
      if (name == "t") {
        rec.t = std::stoull(cells[i]);
      } else if (name == "wallclock_ns") {
        rec.wallclock_ns = std::stoll(cells[i]);
      } else {
        const double v = cells[i] == "nan" || cells[i] == "-nan" ? std::numeric_limits<double>::quiet_NaN()
                                                                 : std::stod(cells[i]);
        for_each_field(rec, [&](std::string_view field, double& dst) {
          if (field == name) dst = v;
        });
      }
    }
    records.push_back(rec);
  }
  return records;
}

nlohmann::json TrainLog::sidecar() const {
  return {{"config", config.to_json()},
          {"N", N},
          {"L_sigma", L_sigma},
          {"initial_params", params_to_json(initial)},
          {"final_params", params_to_json(final_params)}};
}

TrainLog load_log(std::istream& csv, const nlohmann::json& sidecar) {
  TrainLog log;
  log.config = TrainConfig::from_json(sidecar.at("config"));
  log.N = sidecar.at("N").get<std::size_t>();
  log.L_sigma = sidecar.value("L_sigma", Activation(log.config.activation).lipschitz());
  if (sidecar.contains("initial_params"))
    log.initial = params_from_json(log.config.shape, sidecar.at("initial_params"));
  if (sidecar.contains("final_params"))
    log.final_params = params_from_json(log.config.shape, sidecar.at("final_params"));
  log.records = read_log_csv(csv);
  return log;
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

Box default_lip_domain(const Dataset& data) {
  const std::size_t d = data.dim();
  Box box{Vector(d, std::numeric_limits<double>::infinity()),
          Vector(d, -std::numeric_limits<double>::infinity())};
  for (std::size_t n = 0; n < data.size(); ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      box.lo[j] = std::min(box.lo[j], data.x(n)[j]);
      box.hi[j] = std::max(box.hi[j], data.x(n)[j]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double half = 0.5 * (box.hi[j] - box.lo[j]);
    const double pad = half > 0 ? 0.2 * half : 1.0;
    box.lo[j] -= pad;
    box.hi[j] += pad;
  }
  return box;
}

}  // namespace

TrainLog train(const TrainConfig& config_in, const Dataset& data) {
  config_in.validate();
  data.validate();
  if (data.dim() != config_in.shape.d) throw DimensionError("dataset dimension does not match d");

  const auto start = std::chrono::steady_clock::now();
  TrainConfig config = config_in;
  const Activation act(config.activation);
  const Rng root(config.seed);
  Rng init_rng = root.derive(stream::init);
  Rng lip_rng = root.derive(stream::lipschitz);
  const Box lip_box = config.lip_domain ? *config.lip_domain : default_lip_domain(data);
  const double N = static_cast<double>(data.size());

  TrainLog log;
  log.N = data.size();
  log.L_sigma = act.lipschitz();
  log.initial = init_params(config.shape, init_rng, config.init);

  if (config.scheduler.mode == LrMode::hybrid_min && !config.scheduler.lip_RS) {
    const auto& th = log.initial;
    const auto& s = config.scheduler;
    const auto summary = s.rate.summary();
    CubeInputs cube{{max_abs(th.W.span()), max_abs(th.B.span()), max_abs(th.b.span()), std::abs(th.c)},
                    {s.C_W, s.C_B, s.C_b, s.C_c},
                    N,
                    static_cast<double>(config.shape.d),
                    summary.G_star,
                    summary.g_1};
    const double M = param_cube_M(cube);
    if (!std::isfinite(M)) throw std::invalid_argument("hybrid_min needs a bounded rate function");
    Rng probe = root.derive(stream::probe);
    config.scheduler.lip_RS = estimate_lip_RS(data, act, config.shape, M, config.lip_RS_probes, probe);
    if (!(*config.scheduler.lip_RS > 0)) config.scheduler.lip_RS = std::numeric_limits<double>::min();
  }
  log.config = config;

  auto make_record = [&](std::size_t t, const Params& theta, const LRVector& lr) {
    IterationRecord rec;
    rec.t = t;
    rec.alpha_W = lr.alpha_W;
    rec.alpha_B = lr.alpha_B;
    rec.alpha_b = lr.alpha_b;
    rec.alpha_c = lr.alpha_c;
    rec.cap_W = lr.cap_W;
    rec.cap_B = lr.cap_B;
    rec.cap_b = lr.cap_b;
    rec.cap_c = lr.cap_c;
    rec.norm_W_op = operator_norm(theta.W);
    rec.norm_B = euclidean_norm(theta.B);
    rec.norm_b = euclidean_norm(theta.b);
    rec.abs_c = std::abs(theta.c);
    rec.sup_W = max_abs(theta.W.span());
    rec.sup_B = max_abs(theta.B.span());
    rec.sup_b = max_abs(theta.b.span());
    rec.lip_bound = act.lipschitz() * rec.norm_B * rec.norm_W_op;
    rec.lip_empirical = config.lip_samples >= 2
                            ? empirical_lipschitz(theta, act, lip_box, config.lip_samples, lip_rng)
                            : std::numeric_limits<double>::quiet_NaN();
    const SnapshotEval eval = evaluate_snapshot(theta, data, act);
    rec.mse_risk = eval.mse;
    rec.huber_risk = huber_risk(theta, act, data, config.loss.huber_delta);
    rec.grad_norm = eval.grad.norm();
    rec.wallclock_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    return rec;
  };

  Params theta = log.initial;
  log.records.reserve(config.T / config.log_every + 1);
  log.records.push_back(make_record(0, theta, LRVector{}));

  for (std::size_t t = 1; t <= config.T; ++t) {
    LRVector lr;
    if (config.backtracking) {
      const auto& bt = *config.backtracking;
      const auto step = backtracking_step(theta, data, act, bt.alpha0, bt.shrink, bt.armijo_c);
      const SnapshotEval eval = evaluate_snapshot(theta, data, act);
      const auto provider = scheduled_rates(config.scheduler, act, t);
      Params next = theta;
      for (Block blk : kOrder) {
        const double cap = provider(blk, theta, eval.terms).cap;
        const double alpha = config.scheduler.caps_enforced() ? std::min(step.alpha, cap) : step.alpha;
        lr.set(blk, alpha, cap);
        apply_block(next, eval.grad, blk, alpha);
      }
      if (!next.finite()) throw TrainingError("non-finite update at t = " + std::to_string(t));
      theta = std::move(next);
    } else {
      try {
        auto step = gd_step(theta, data, act, scheduled_rates(config.scheduler, act, t), config.order);
        theta = std::move(step.theta);
        lr = step.lr;
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " at t = " + std::to_string(t));
      }
    }
    if (t % config.log_every == 0) log.records.push_back(make_record(t, theta, lr));
  }
  log.final_params = theta;
  return log;
}

}  // namespace lipgd
