// Copyright 2026 The psro-girl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "girl/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "girl/config.h"
#include "girl/errors.h"
#include "girl/io.h"
#include "girl/parallel.h"
#include "girl/psro.h"
#include "girl/version.h"

namespace girl::cli {

namespace fs = std::filesystem;

namespace {

// Raised for bad paths and flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string join_fixed(std::span<const double> v, int digits) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += fixed(v[i], digits);
  }
  return out;
}

RunConfig read_config(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("config file not found: " + path);
  return load_config(path);
}

std::vector<int> ids_of(const TaskSet& tasks) {
  std::vector<int> ids;
  for (const auto& c : tasks.contexts) ids.push_back(c.id);
  return ids;
}

void print_diagnostics(std::ostream& out, std::span<const LoopDiagnostics> diags) {
  out << "loop  restricted_value  exploitability  solver_iters  post_adapt_return  seconds\n";
  for (const auto& d : diags) {
    char line[160];
    std::snprintf(line, sizeof(line), "%4d  %16.6f  %14.6f  %12d  %17.6f  %7.2f\n", d.loop,
                  d.restricted_value, d.exploitability, d.solver_iterations,
                  d.mean_post_adaptation_return, d.wall_seconds);
    out << line;
  }
}

int cmd_train(const std::string& config_path, const std::string& run_dir, bool resume_run,
              int stop_after, std::ostream& out) {
  const RunConfig config = read_config(config_path);
  const fs::path dir(run_dir);
  const bool has_run = fs::exists(dir / "manifest.json");
  RunArtifacts artifacts;
  if (has_run && !resume_run) {
    throw UsageError(run_dir + " already holds a run; pass --resume to continue it");
  }
  const auto stop = stop_after > 0 ? std::optional<int>(stop_after) : std::nullopt;
  if (has_run) {
    auto loaded = load_run(dir);
    out << "resuming after loop " << loaded.artifacts.loops_completed() << "\n";
    artifacts = run_psro(loaded.setup, dir, std::move(loaded.artifacts), stop);
  } else {
    artifacts = run_psro(config.setup(), dir, {}, stop);
    write_text_atomic(dir / "config.txt", format_config(config));
  }
  print_diagnostics(out, artifacts.diagnostics);
  out << "pi: " << join_fixed(artifacts.strategies.back().pi, 6) << "\n";
  out << "p1: " << join_fixed(artifacts.strategies.back().p1, 6) << "\n";
  return kOk;
}

int cmd_eval(const std::string& run_dir, const std::string& config_path,
             const std::string& out_dir, std::ostream& out) {
  if (!fs::is_directory(run_dir)) throw DataError("run directory not found: " + run_dir);
  const RunConfig config = read_config(config_path);
  const LoadedRun run = load_run(run_dir);
  if (!run.complete) {
    throw DataError("run in " + run_dir + " is incomplete (" +
                    std::to_string(run.artifacts.loops_completed()) + " of " +
                    std::to_string(run.setup.psro.max_loops) + " loops); resume it first");
  }
  const auto& tasks = run.setup.tasks;
  const EvalConfig& ec = config.eval;
  try {
    ec.validate(tasks.size());
  } catch (const InvalidArgument& e) {
    throw ConfigError({e.what()});
  }
  const auto& pi = run.artifacts.strategies.back().pi;
  const EvalReport report =
      evaluate(run.artifacts.policies, pi, tasks, ec, run.setup.maml, run.setup.env);

  const fs::path dest = out_dir.empty() ? fs::path(run_dir) / "eval" : fs::path(out_dir);
  const auto ids = ids_of(tasks);
  write_text_atomic(dest / "eval_matrix.csv", payoff_to_csv(report.eval_matrix, ids));
  std::string adv = "task,r,p1\n";
  for (std::size_t j = 0; j < tasks.size(); ++j) {
    adv += std::to_string(ids[j]) + "," + format_real(report.r[j]) + "," +
           format_real(report.p1[j]) + "\n";
  }
  write_text_atomic(dest / "adversary.csv", adv);
  std::string seeds = "seed,value\n";
  for (std::size_t s = 0; s < ec.seeds.size(); ++s) {
    seeds += std::to_string(ec.seeds[s]) + "," + format_real(report.seed_values[s]) + "\n";
  }
  write_text_atomic(dest / "seed_values.csv", seeds);
  std::string summary =
      "shots,test_min,test_max,beta,policies,value,seed_mean,seed_std\n" +
      std::to_string(ec.shots) + "," + format_real(ec.test_min) + "," +
      format_real(ec.test_max) + "," + format_real(ec.beta) + "," +
      std::to_string(run.artifacts.policies.size()) + "," + format_real(report.value) + "," +
      format_real(report.seed_mean) + "," + format_real(report.seed_std) + "\n";
  write_text_atomic(dest / "eval_summary.csv", summary);

  out << "shots=" << ec.shots << " test_box=[" << fixed(ec.test_min, 3) << ", "
      << fixed(ec.test_max, 3) << "] beta=" << fixed(ec.beta, 3)
      << " value=" << fixed(report.value, 6) << " seeds=" << ec.seeds.size()
      << " mean=" << fixed(report.seed_mean, 6) << " std=" << fixed(report.seed_std, 6)
      << "\n";
  out << "p1: " << join_fixed(report.p1, 6) << "\n";
  return kOk;
}

int cmd_solve(const std::string& payoff_path, double lower, double upper,
              const SolverConfig& solver, std::ostream& out) {
  if (!fs::is_regular_file(payoff_path)) {
    throw UsageError("payoff file not found: " + payoff_path);
  }
  const PayoffTable table = payoff_from_csv(read_text(payoff_path));
  if (table.rows() == 0) throw DataError(payoff_path + ": payoff table has no rows");
  const auto problems = solver.problems();
  if (!problems.empty()) throw ConfigError(problems);
  const RestrictedSimplex box{table.cols(), lower, upper};
  if (!box.feasible()) {
    throw ConfigError({"task box [" + format_real(lower) + ", " + format_real(upper) +
                       "] is infeasible for " + std::to_string(table.cols()) + " tasks"});
  }
  const RprdResult result = rprd_solve_detailed(table, box, solver);
  const auto& pair = result.average;
  double pi_sum = 0.0;
  for (double v : pair.pi) pi_sum += v;
  if (!box.contains(pair.p1) || std::abs(pi_sum - 1.0) > 1e-9) {
    throw InternalError("solver output is not feasible");
  }
  out << "pi: " << join_fixed(pair.pi, 9) << "\n";
  out << "p1: " << join_fixed(pair.p1, 9) << "\n";
  out << "value: " << fixed(restricted_value(pair.pi, table, box), 9) << "\n";
  out << "exploitability: " << fixed(restricted_exploitability(pair, table, box), 9) << "\n";
  out << "iterations: " << result.iterations << (result.converged ? " (converged)" : "")
      << "\n";
  return kOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                std::ostream& out) {
  const RunConfig config = read_config(config_path);
  const fs::path dest(out_dir);
  const ComparisonTable table =
      compare_methods(config.setup(), config.eval, config.compare, dest);
  write_text_atomic(dest / "config.txt", format_config(config));
  write_text_atomic(dest / "comparison.csv", comparison_to_csv(table));
  write_text_atomic(dest / "comparison_long.csv", comparison_to_long_csv(table));
  const std::string text = comparison_to_text(table);
  write_text_atomic(dest / "comparison.txt", text);
  out << text;
  return kOk;
}

int cmd_inspect(const std::string& run_dir, std::ostream& out) {
  if (!fs::is_directory(run_dir)) throw DataError("run directory not found: " + run_dir);
  const LoadedRun run = load_run(run_dir);
  const auto& a = run.artifacts;
  out << "tasks: " << run.setup.tasks.size() << " ("
      << env_kind_name(run.setup.tasks.kind) << ")\n";
  out << "mode: " << psro_mode_name(run.setup.psro.mode) << "  seed: " << run.setup.psro.seed
      << "\n";
  out << "loops: " << a.loops_completed() << " of " << run.setup.psro.max_loops
      << (run.complete ? " (complete)" : " (incomplete)") << "\n";
  out << "train box: [" << fixed(run.setup.psro.train_min, 3) << ", "
      << fixed(run.setup.psro.train_max, 3) << "]\n";
  if (a.loops_completed() > 0) {
    out << "payoff range: [" << fixed(a.payoff.min_value(), 4) << ", "
        << fixed(a.payoff.max_value(), 4) << "]\n";
    print_diagnostics(out, a.diagnostics);
    out << "pi: " << join_fixed(a.strategies.back().pi, 6) << "\n";
    out << "p1: " << join_fixed(a.strategies.back().p1, 6) << "\n";
  }
  return kOk;
}

}  // namespace

std::string comparison_to_csv(const ComparisonTable& table) {
  std::string out = "shots,test_max,train_max,method,mean,std,seeds\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.shots) + "," + format_real(r.test_max) + "," +
           format_real(r.train_max) + "," + std::string(method_name(r.method)) + "," +
           format_real(r.mean) + "," + format_real(r.stddev) + "," +
           std::to_string(r.seed_values.size()) + "\n";
  }
  return out;
}

std::string comparison_to_long_csv(const ComparisonTable& table) {
  std::string out = "shots,test_max,train_max,method,seed_index,value\n";
  for (const auto& r : table.rows) {
    for (std::size_t s = 0; s < r.seed_values.size(); ++s) {
      out += std::to_string(r.shots) + "," + format_real(r.test_max) + "," +
             format_real(r.train_max) + "," + std::string(method_name(r.method)) + "," +
             std::to_string(s) + "," + format_real(r.seed_values[s]) + "\n";
    }
  }
  return out;
}

std::string comparison_to_text(const ComparisonTable& table) {
  // One line per (shots, test_max); column groups per train_max.
  std::vector<double> train_values;
  std::vector<std::pair<int, double>> line_keys;
  for (const auto& r : table.rows) {
    if (std::find(train_values.begin(), train_values.end(), r.train_max) ==
        train_values.end()) {
      train_values.push_back(r.train_max);
    }
    const std::pair<int, double> key{r.shots, r.test_max};
    if (std::find(line_keys.begin(), line_keys.end(), key) == line_keys.end()) {
      line_keys.push_back(key);
    }
  }
  const Method methods[] = {Method::kMaml, Method::kStarGirl, Method::kGirl};
  auto cell = [](const std::string& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %21s", s.c_str());
    return std::string(buf);
  };

  std::string out;
  std::string head = "shots  test_max";
  std::string sub = "               ";
  for (double t : train_values) {
    for (Method m : methods) {
      head += cell("train_max=" + fixed(t, 2));
      sub += cell(std::string(method_name(m)));
    }
  }
  out += head + "\n" + sub + "\n";
  for (const auto& [k, test_max] : line_keys) {
    char lead[32];
    std::snprintf(lead, sizeof(lead), "%5d  %8.2f", k, test_max);
    out += lead;
    for (double t : train_values) {
      for (Method m : methods) {
        const auto& r = table.find(k, test_max, t, m);
        out += cell(fixed(r.mean, 3) + " +- " + fixed(r.stddev, 3));
      }
    }
    out += "\n";
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Game-theoretic meta-RL: PSRO with a MAML best-response oracle", "girl"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads for rollouts (default: all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path, run_dir, out_dir, payoff_path;
  bool resume_run = false;
  int stop_after = 0;
  auto* train = app.add_subcommand("train", "Run the PSRO loop and persist artifacts");
  train->add_option("--config", config_path, "Run configuration file")->required();
  train->add_option("--run-dir", run_dir, "Output run directory")->required();
  train->add_flag("--resume", resume_run, "Continue an interrupted run in --run-dir");
  train->add_option("--stop-after", stop_after, "Stop after N loops of this invocation")
      ->check(CLI::NonNegativeNumber);

  auto* eval = app.add_subcommand("eval", "Adversarial K-shot evaluation of a finished run");
  eval->add_option("--run-dir", run_dir, "Completed run directory")->required();
  eval->add_option("--config", config_path, "Configuration supplying eval.* keys")
      ->required();
  eval->add_option("--out", out_dir, "Report directory (default: RUN_DIR/eval)");

  double lower = 0.0, upper = 1.0;
  SolverConfig solver;
  auto* solve = app.add_subcommand("solve", "Solve a payoff table with restricted PRD");
  solve->add_option("--payoff", payoff_path, "Payoff CSV (policy,task_<id>,...)")
      ->required();
  solve->add_option("--lower", lower, "Task probability lower bound");
  solve->add_option("--upper", upper, "Task probability upper bound");
  solve->add_option("--eta", solver.eta, "Step size");
  solve->add_option("--explore-eps", solver.explore_eps, "Exploration floor");
  solve->add_option("--max-iters", solver.max_iters, "Iteration budget");
  solve->add_option("--tol", solver.tol, "Early-stop tolerance");
  solve->add_option("--average-window", solver.average_window,
                    "Fraction of final iterations averaged");
  solve->add_option("--normalize-payoffs", solver.normalize_payoffs,
                    "Scale eta by 1 / payoff range (true/false)");

  auto* compare = app.add_subcommand("compare", "MAML vs *GiRL vs GiRL over the grid");
  compare->add_option("--config", config_path, "Run configuration file")->required();
  compare->add_option("--out", out_dir, "Output directory")->required();

  auto* inspect = app.add_subcommand("inspect", "Summarize a run directory");
  inspect->add_option("--run-dir", run_dir, "Run directory")->required();

  std::vector<std::string> argv_store{"girl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (jobs > 0) set_default_jobs(jobs);
  try {
    if (*train) return cmd_train(config_path, run_dir, resume_run, stop_after, out);
    if (*eval) return cmd_eval(run_dir, config_path, out_dir, out);
    if (*solve) return cmd_solve(payoff_path, lower, upper, solver, out);
    if (*compare) return cmd_compare(config_path, out_dir, out);
    if (*inspect) return cmd_inspect(run_dir, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace girl::cli
