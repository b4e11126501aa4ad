#include "lipgd/harness/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "lipgd/bounds.hpp"
#include "lipgd/harness/config.hpp"
#include "lipgd/harness/plot.hpp"
#include "lipgd/harness/sweep.hpp"

namespace lipgd::harness {

namespace fs = std::filesystem;

namespace {

int cmd_train(const fs::path& config_path, const fs::path& out_dir, std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  fs::create_directories(out_dir);
  int status = kExitOk;
  for (std::size_t k = 0; k < cfg.n_seeds; ++k) {
    RunOutcome run = run_one(cfg, "decay", static_cast<double>(cfg.N), k);
    if (!run.log) {
      out << "seed " << run.seed << ": FAILED " << run.error << '\n';
      status = kExitRuntime;
      continue;
    }
    const auto path = out_dir / ("log_seed" + std::to_string(k) + ".csv");
    write_run_log(*run.log, path);
    const auto& last = run.log->records.back();
    out << "seed " << run.seed << ": T=" << last.t << " mse=" << last.mse_risk << " lip_bound=" << last.lip_bound
        << " test_huber=" << run.test_huber << " -> " << path.string() << '\n';
  }
  return status;
}

int cmd_sweep(const fs::path& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_config(config_path);
  const SweepResult result = run_sweep(cfg);
  write_sweep_outputs(result, out_dir);
  const PlotReport plots = emit_plots(result.aggregate, out_dir);
  for (const auto& w : plots.warnings) err << "warning: " << w << '\n';
  out << "sweep '" << cfg.name << "': " << result.runs.size() << " runs, " << result.failures() << " failed, "
      << plots.written.size() << " plots -> " << out_dir.string() << '\n';
  return result.failures() ? kExitRuntime : kExitOk;
}

std::vector<fs::path> find_logs(const fs::path& target) {
  std::vector<fs::path> logs;
  if (fs::is_regular_file(target)) {
    logs.push_back(target);
  } else if (fs::is_directory(target)) {
    for (const auto& entry : fs::recursive_directory_iterator(target)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("log_", 0) == 0 && entry.path().extension() == ".csv")
        logs.push_back(entry.path());
    }
    std::sort(logs.begin(), logs.end());
  } else {
    throw std::runtime_error("no such log file or directory '" + target.string() + "'");
  }
  return logs;
}

int cmd_verify(const fs::path& target, std::ostream& out) {
  const auto logs = find_logs(target);
  if (logs.empty()) throw std::runtime_error("no log_*.csv files under '" + target.string() + "'");

  std::vector<std::string> order;
  std::map<std::string, CheckResult> families;
  nlohmann::json per_log = nlohmann::json::array();
  std::size_t audited = 0;
  for (const auto& csv_path : logs) {
    auto sidecar_path = csv_path;
    sidecar_path.replace_extension(".json");
    std::ifstream sidecar_in(sidecar_path);
    if (!sidecar_in) throw std::runtime_error("missing sidecar '" + sidecar_path.string() + "'");
    std::ifstream csv_in(csv_path);
    const TrainLog log = load_log(csv_in, nlohmann::json::parse(sidecar_in));
    // Uncapped constant-step runs carry no bound guarantees.
    if (!log.config.scheduler.caps_enforced()) {
      out << "SKIP " << csv_path.string() << " (constant step size without caps)\n";
      per_log.push_back({{"log", csv_path.string()}, {"skipped", "uncapped schedule"}});
      continue;
    }
    ++audited;
    const BoundReport report = audit_trajectory(log);
    per_log.push_back({{"log", csv_path.string()}, {"report", report.to_json()}});
    for (const auto& c : report.checks) {
      auto [it, fresh] = families.try_emplace(c.name, c);
      if (fresh) {
        order.push_back(c.name);
        continue;
      }
      CheckResult& agg = it->second;
      agg.pass = agg.pass && c.pass;
      agg.evaluated += c.evaluated;
      agg.violations += c.violations;
      if (c.worst_slack < agg.worst_slack) {
        agg.worst_slack = c.worst_slack;
        agg.worst_t = c.worst_t;
      }
    }
  }

  bool all_pass = true;
  for (const auto& name : order) {
    const CheckResult& c = families.at(name);
    all_pass = all_pass && c.pass;
    out << (c.pass ? "PASS " : "FAIL ") << name << " (" << c.evaluated << " checks, " << c.violations
        << " violations, worst slack " << c.worst_slack << ")\n";
  }
  const fs::path report_dir = fs::is_directory(target) ? target : target.parent_path();
  std::ofstream report_out(report_dir / "bound_report.json");
  report_out << nlohmann::json{{"all_pass", all_pass}, {"logs", per_log}}.dump(2) << '\n';
  out << (all_pass ? "PASS" : "FAIL") << " all (" << audited << " logs audited, " << logs.size() - audited
      << " skipped)\n";
  return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_plot(const fs::path& in_dir, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const fs::path csv = fs::is_directory(in_dir) ? in_dir / "aggregate.csv" : in_dir;
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open '" + csv.string() + "'");
  const AggregateTable table = read_aggregate_csv(in);
  const PlotReport report = emit_plots(table, out_dir);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  out << report.written.size() << " plots -> " << out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient descent with Lipschitz-controlling learning-rate caps", "lipgd"};
  app.require_subcommand(1);

  std::string config, out_dir, log_path, in_dir, plot_out;
  auto* train = app.add_subcommand("train", "train one configuration over its seeds");
  train->add_option("--config", config, "experiment JSON")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  auto* sweep = app.add_subcommand("sweep", "run every arm, axis value and seed; aggregate and plot");
  sweep->add_option("--config", config, "experiment JSON")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  auto* verify = app.add_subcommand("verify", "audit logged trajectories against the bounds");
  verify->add_option("--log", log_path, "log CSV or directory")->required();
  auto* plot = app.add_subcommand("plot", "render SVG plots from aggregate.csv");
  plot->add_option("--in", in_dir, "directory holding aggregate.csv")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*train) return cmd_train(config, out_dir, out);
    if (*sweep) return cmd_sweep(config, out_dir, out, err);
    if (*verify) return cmd_verify(log_path, out);
    if (*plot) return cmd_plot(in_dir, plot_out, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace lipgd::harness
