#include "lipgd/bounds.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "lipgd/trainer.hpp"

namespace lipgd {

namespace {

double growth(double C, double N, double G_t, double g_1) { return 2.0 * C / N * (G_t + g_1); }

}  // namespace

double lipschitz_bound_rhs(const BoundInputs& in) {
  if (!(in.N >= 1)) throw std::invalid_argument("N must be >= 1");
  const double inner = std::sqrt(in.p) + in.kappa * (std::sqrt(std::max(in.p, in.d)) + in.eta) +
                       growth(std::max(in.C_W, in.C_B), in.N, in.G_T, in.g_1);
  return in.L_sigma * inner * inner;
}

double per_omega_lip_bound(double norm_W0_op, double norm_B0, double C_W, double C_B, double N,
                           double G_t, double g_1, double L_sigma) {
  return L_sigma * (norm_W0_op + growth(C_W, N, G_t, g_1)) * (norm_B0 + growth(C_B, N, G_t, g_1));
}

double norm_growth_rhs(double norm0, double C, double N, double G_t, double g_1) {
  return norm0 + growth(C, N, G_t, g_1);
}

double param_cube_M(const CubeInputs& in) {
  double M = 0.0;
  const double root_d = std::sqrt(in.d);
  for (std::size_t k = 0; k < 4; ++k)
    M = std::max(M, root_d * in.sup_norms0[k] + growth(in.C[k], in.N, in.G_star, in.g_1));
  return M;
}

double dimensional_constant(double k) {
  if (!(k > 2)) throw std::domain_error("dimensional constant needs k = d + D > 2");
  const double h = k / 2.0 - 1.0;
  const double base = h / (2.0 * (1.0 - std::pow(2.0, -h)));
  return 2.0 * std::pow(base, 2.0 / k) * (1.0 + 1.0 / (2.0 * h)) * std::sqrt(k);
}

double generalization_bound(const GenBoundInputs& in) {
  if (!(in.delta > 0 && in.delta <= 1)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(in.diam_Q > 0)) throw std::invalid_argument("diam_Q must be > 0");
  if (!(in.N >= 1)) throw std::invalid_argument("N must be >= 1");
  if (!(in.d >= 1)) throw std::invalid_argument("d must be >= 1");
  const double C_k = dimensional_constant(in.d + in.D);
  return in.Lambda * in.diam_Q *
         (C_k / std::pow(in.N, 1.0 / in.d) + std::sqrt(std::log(8.0 / in.delta)) / std::sqrt(2.0 * in.N));
}

// ---------------------------------------------------------------------------

bool BoundReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& BoundReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named '" + name + "'");
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"name", c.name},
                     {"pass", c.pass},
                     {"evaluated", c.evaluated},
                     {"violations", c.violations},
                     {"worst_slack", std::isfinite(c.worst_slack) ? nlohmann::json(c.worst_slack) : nlohmann::json()}};
    j["worst_t"] = c.worst_t ? nlohmann::json(*c.worst_t) : nlohmann::json();
    j["first_violation_t"] = c.first_violation_t ? nlohmann::json(*c.first_violation_t) : nlohmann::json();
    arr.push_back(std::move(j));
  }
  return {{"all_pass", all_pass()}, {"cube_M", cube_M}, {"checks", std::move(arr)}};
}

namespace {

class Tally {
public:
  explicit Tally(std::string name) { result_.name = std::move(name); result_.worst_slack = kInf; }

  void add(std::size_t t, double rhs, double lhs) {
    const double slack = rhs - lhs;
    ++result_.evaluated;
    // NaN slack counts as a violation.
    if (std::isnan(slack) || slack < result_.worst_slack) {
      result_.worst_slack = std::isnan(slack) ? -kInf : slack;
      result_.worst_t = t;
    }
    if (!(slack >= BoundReport::kSlackTolerance)) {
      ++result_.violations;
      if (!result_.first_violation_t) result_.first_violation_t = t;
    }
  }

  CheckResult finish() {
    result_.pass = result_.violations == 0;
    return result_;
  }

private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  CheckResult result_;
};

}  // namespace

BoundReport audit_trajectory(const TrainLog& log) {
  const auto& cfg = log.config;
  const auto& s = cfg.scheduler;
  const Params& init = log.initial;
  if (init.W.rows() != cfg.shape.p || init.W.cols() != cfg.shape.d)
    throw std::invalid_argument("audit: log carries no initial parameters matching its shape");
  if (log.N == 0) throw std::invalid_argument("audit: N must be >= 1");

  const double N = static_cast<double>(log.N);
  const double W0 = operator_norm(init.W);
  const double B0 = euclidean_norm(init.B);
  const double b0 = euclidean_norm(init.b);
  const double c0 = std::abs(init.c);
  const RateSummary summary = s.rate.summary();
  const double g1 = summary.g_1;

  BoundReport report;
  report.cube_M = param_cube_M(CubeInputs{
      {max_abs(init.W.span()), max_abs(init.B.span()), max_abs(init.b.span()), c0},
      {s.C_W, s.C_B, s.C_b, s.C_c},
      N,
      static_cast<double>(cfg.shape.d),
      summary.G_star,
      g1});

  Tally norm_W("norm_W"), norm_B("norm_B"), norm_b("norm_b"), abs_c("abs_c");
  Tally lip("lip_per_omega"), cube("param_cube"), alpha("alpha_le_cap");

  for (const auto& rec : log.records) {
    const std::size_t t = rec.t;
    const double G_t = s.rate.G(static_cast<double>(std::max<std::size_t>(t, 1)));
    norm_W.add(t, norm_growth_rhs(W0, s.C_W, N, G_t, g1), rec.norm_W_op);
    norm_B.add(t, norm_growth_rhs(B0, s.C_B, N, G_t, g1), rec.norm_B);
    norm_b.add(t, norm_growth_rhs(b0, s.C_b, N, G_t, g1), rec.norm_b);
    abs_c.add(t, norm_growth_rhs(c0, s.C_c, N, G_t, g1), rec.abs_c);
    lip.add(t, per_omega_lip_bound(W0, B0, s.C_W, s.C_B, N, G_t, g1, log.L_sigma), rec.lip_bound);
    cube.add(t, report.cube_M, std::max({rec.sup_W, rec.sup_B, rec.sup_b, rec.abs_c}));
    if (t > 0) {
      alpha.add(t, rec.cap_W, rec.alpha_W);
      alpha.add(t, rec.cap_B, rec.alpha_B);
      alpha.add(t, rec.cap_b, rec.alpha_b);
      alpha.add(t, rec.cap_c, rec.alpha_c);
    }
  }
  for (Tally* tally : {&norm_W, &norm_B, &norm_b, &abs_c, &lip, &cube, &alpha})
    report.checks.push_back(tally->finish());
  return report;
}

ConvergenceReport convergence_rate_check(std::vector<BudgetSeries> series, double zero_tol) {
  std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.T < b.T; });
  series.erase(std::unique(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.T == b.T; }),
               series.end());
  if (series.size() < 2) throw std::invalid_argument("convergence check needs at least two distinct budgets");

  ConvergenceReport report;
  for (const auto& s : series) {
    if (s.grad_norms.empty()) throw std::invalid_argument("empty gradient-norm series");
    const std::size_t end = std::min(s.grad_norms.size(), s.T + 1);
    const double m = *std::min_element(s.grad_norms.begin(), s.grad_norms.begin() + end);
    report.budgets.push_back(s.T);
    report.min_grad_norm.push_back(m);
    if (m <= zero_tol) report.converged = true;
  }
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    ConvergencePair pair;
    pair.T1 = report.budgets[i];
    pair.T2 = report.budgets[i + 1];
    pair.m1 = report.min_grad_norm[i];
    pair.m2 = report.min_grad_norm[i + 1];
    pair.predicted = std::sqrt((pair.T2 + 1.0) / (pair.T1 + 1.0));
    pair.skipped = pair.m1 <= zero_tol || pair.m2 <= zero_tol;
    pair.ratio = pair.skipped ? std::numeric_limits<double>::quiet_NaN() : pair.m1 / pair.m2;
    report.pairs.push_back(pair);
  }
  return report;
}

}  // namespace lipgd
