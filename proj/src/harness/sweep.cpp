#include "lipgd/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace lipgd::harness {

std::vector<const RunOutcome*> SweepResult::cell(const std::string& arm, double value) const {
  std::vector<const RunOutcome*> out;
  for (const auto& r : runs)
    if (r.arm == arm && r.value == value) out.push_back(&r);
  return out;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.log; }));
}

ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig out = cfg;
  switch (axis) {
    case SweepAxis::N: out.N = static_cast<std::size_t>(value); break;
    case SweepAxis::p: out.train.shape.p = static_cast<std::size_t>(value); break;
    case SweepAxis::beta: out.noise.beta = value; break;
  }
  out.sweep.reset();
  return out;
}

Dataset seed_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng = Rng(seed).derive(stream::data);
  return generate_dataset(cfg.target, cfg.noise, cfg.N, rng, cfg.data);
}

RunOutcome run_one(const ExperimentConfig& cfg, const std::string& arm, double value,
                   std::size_t seed_index) {
  RunOutcome out;
  out.arm = arm;
  out.value = value;
  out.seed_index = seed_index;
  out.seed = cfg.first_seed + seed_index;
  try {
    TrainConfig tc = arm_config(cfg, arm);
    tc.seed = out.seed;
    const Dataset data = seed_dataset(cfg, out.seed);
    TrainLog log = train(tc, data);
    if (cfg.test_samples > 0) {
      Rng test_rng = Rng(out.seed).derive(stream::test);
      out.test_huber = true_risk_mc(log.final_params, Activation(tc.activation),
                                    make_sampler(cfg.target, cfg.noise, cfg.data), cfg.test_samples,
                                    test_rng, tc.loss.huber_delta)
                           .mean;
    } else {
      out.test_huber = std::numeric_limits<double>::quiet_NaN();
    }
    out.log = std::move(log);
  } catch (const std::exception& e) {
    out.error = e.what();
    out.log.reset();
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.config = cfg;
  if (cfg.sweep) {
    result.axis = cfg.sweep->axis;
    result.values = cfg.sweep->values;
  } else {
    result.axis = SweepAxis::N;
    result.values = {static_cast<double>(cfg.N)};
  }

  struct Task {
    std::string arm;
    double value;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (const auto& arm : cfg.arms)
    for (double v : result.values)
      for (std::size_t k = 0; k < cfg.n_seeds; ++k) tasks.push_back({arm, v, k});

  result.runs.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      result.runs[i] = run_one(apply_axis(cfg, result.axis, task.value), task.arm, task.value, task.seed_index);
    }
  };
  std::size_t n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, tasks.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  result.aggregate.metrics = aggregate_metrics();
  for (const auto& arm : cfg.arms) {
    for (double v : result.values) {
      const ExperimentConfig cell_cfg = apply_axis(cfg, result.axis, v);
      std::vector<const TrainLog*> logs;
      for (const RunOutcome* r : result.cell(arm, v))
        if (r->log) logs.push_back(&*r->log);
      const auto& shape = cell_cfg.train.shape;
      aggregate_cell({arm, to_string(result.axis), v, cell_cfg.N, shape.p, shape.parameter_count(),
                      cell_cfg.noise.beta},
                     logs, result.aggregate);
    }
  }
  return result;
}

void write_run_log(const TrainLog& log, const std::filesystem::path& csv_path) {
  std::filesystem::create_directories(csv_path.parent_path());
  {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write '" + csv_path.string() + "'");
    write_log_csv(log, out);
  }
  auto sidecar_path = csv_path;
  sidecar_path.replace_extension(".json");
  std::ofstream out(sidecar_path);
  if (!out) throw std::runtime_error("cannot write '" + sidecar_path.string() + "'");
  out << log.sidecar().dump(2) << '\n';
}

namespace {

std::string value_label(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.precision(17);
  return out;
}

}  // namespace

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string axis = to_string(result.axis);
  const bool flat = result.values.size() == 1 && result.config.arms.size() == 1;
  for (const auto& r : result.runs) {
    if (!r.log) continue;
    const std::string file = "log_seed" + std::to_string(r.seed_index) + ".csv";
    write_run_log(*r.log, flat ? dir / file : dir / r.arm / (axis + "_" + value_label(r.value)) / file);
  }

  {
    auto out = open_out(dir / "aggregate.csv");
    write_aggregate_csv(result.aggregate, out);
  }

  auto summary = open_out(dir / "summary.csv");
  summary << "arm,axis,value,n_ok,n_failed,final_lip_bound_mean,final_lip_bound_std,final_lip_bound_median,"
             "final_lip_empirical_mean,final_mse_risk_mean,final_huber_risk_mean,test_huber_mean,"
             "test_huber_std,test_huber_median\n";
  for (const auto& arm : result.config.arms) {
    for (double v : result.values) {
      std::vector<double> lip, lip_emp, mse, huber, test;
      std::size_t failed = 0;
      for (const RunOutcome* r : result.cell(arm, v)) {
        if (!r->log) {
          ++failed;
          continue;
        }
        const auto& last = r->log->records.back();
        lip.push_back(last.lip_bound);
        lip_emp.push_back(last.lip_empirical);
        mse.push_back(last.mse_risk);
        huber.push_back(last.huber_risk);
        test.push_back(r->test_huber);
      }
      const MeanStd l = mean_std(lip), te = mean_std(test);
      summary << arm << ',' << axis << ',' << v << ',' << lip.size() << ',' << failed << ',' << l.mean << ','
              << l.std << ',' << median(lip) << ',' << mean_std(lip_emp).mean << ',' << mean_std(mse).mean << ','
              << mean_std(huber).mean << ',' << te.mean << ',' << te.std << ',' << median(test) << '\n';
    }
  }

  auto failures = open_out(dir / "failures.csv");
  failures << "arm,axis,value,seed,error\n";
  for (const auto& r : result.runs) {
    if (r.log) continue;
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    failures << r.arm << ',' << axis << ',' << r.value << ',' << r.seed << ',' << msg << '\n';
  }
}

}  // namespace lipgd::harness
