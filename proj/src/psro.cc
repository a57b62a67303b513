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

#include "girl/psro.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "girl/errors.h"
#include "girl/io.h"
#include "girl/version.h"
#include "json.hpp"

namespace girl {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view psro_mode_name(PsroMode mode) {
  return mode == PsroMode::kGirl ? "girl" : "star_girl";
}

PsroMode parse_psro_mode(std::string_view name) {
  if (name == "girl") return PsroMode::kGirl;
  if (name == "star_girl" || name == "stargirl") return PsroMode::kStarGirl;
  throw InvalidArgument("unknown psro mode '" + std::string(name) +
                        "' (expected girl or star_girl)");
}

std::vector<std::string> PsroConfig::problems() const {
  std::vector<std::string> out;
  if (max_loops < 1) out.push_back("psro.max_loops must be >= 1");
  if (max_policies < 1) out.push_back("psro.max_policies must be >= 1");
  if (!(train_min >= 0.0 && train_max <= 1.0 && train_min <= train_max)) {
    out.push_back("psro.train_min/train_max must satisfy 0 <= train_min <= train_max <= 1");
  }
  if (payoff_episodes < 1) out.push_back("psro.payoff_episodes must be >= 1");
  return out;
}

namespace {

void validate_setup(const PsroSetup& s) {
  s.tasks.validate();
  if (s.tasks.size() == 0) throw InvalidArgument("task set is empty");
  s.env.validate();
  s.maml.validate();
  s.solver.validate();
  const auto problems = s.psro.problems();
  if (!problems.empty()) throw InvalidArgument(problems.front());
  s.psro.train_simplex(s.tasks.size()).require_feasible("train_simplex");
}

std::string policy_file(std::size_t loop) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "policy_%03zu.txt", loop);
  return buf;
}

std::string diagnostics_to_csv(std::span<const LoopDiagnostics> diags) {
  std::string out =
      "loop,restricted_value,exploitability,solver_iterations,"
      "mean_post_adaptation_return,wall_seconds\n";
  for (const auto& d : diags) {
    out += std::to_string(d.loop) + "," + format_real(d.restricted_value) + "," +
           format_real(d.exploitability) + "," + std::to_string(d.solver_iterations) + "," +
           format_real(d.mean_post_adaptation_return) + "," + format_real(d.wall_seconds) +
           "\n";
  }
  return out;
}

std::vector<LoopDiagnostics> diagnostics_from_csv(std::string_view text) {
  std::vector<LoopDiagnostics> out;
  const auto lines = split(text, '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split(lines[i], ',');
    const std::string where = "diagnostics.csv line " + std::to_string(i + 1);
    if (f.size() != 6) throw DataError(where + ": expected 6 fields");
    LoopDiagnostics d;
    d.loop = static_cast<int>(parse_real(f[0], where));
    d.restricted_value = parse_real(f[1], where);
    d.exploitability = parse_real(f[2], where);
    d.solver_iterations = static_cast<int>(parse_real(f[3], where));
    d.mean_post_adaptation_return = parse_real(f[4], where);
    d.wall_seconds = parse_real(f[5], where);
    out.push_back(d);
  }
  return out;
}

json setup_to_json(const PsroSetup& s) {
  return {
      {"psro",
       {{"max_loops", s.psro.max_loops},
        {"max_policies", s.psro.max_policies},
        {"train_min", s.psro.train_min},
        {"train_max", s.psro.train_max},
        {"mode", psro_mode_name(s.psro.mode)},
        {"seed", s.psro.seed},
        {"payoff_episodes", s.psro.payoff_episodes}}},
      {"maml",
       {{"inner_lr", s.maml.inner_lr},
        {"outer_lr", s.maml.outer_lr},
        {"traj_per_task", s.maml.traj_per_task},
        {"tasks_per_batch", s.maml.tasks_per_batch},
        {"meta_iterations", s.maml.meta_iterations},
        {"first_order", s.maml.first_order},
        {"hidden_size", s.maml.hidden_size},
        {"baseline", baseline_name(s.maml.baseline)},
        {"entropy_bonus", s.maml.entropy_bonus},
        {"normalize_advantages", s.maml.normalize_advantages},
        {"max_grad_norm", s.maml.max_grad_norm}}},
      {"env",
       {{"gamma", s.env.gamma},
        {"horizon", s.env.horizon},
        {"action_clip", s.env.action_clip},
        {"dt", s.env.dt}}},
      {"solver",
       {{"eta", s.solver.eta},
        {"explore_eps", s.solver.explore_eps},
        {"max_iters", s.solver.max_iters},
        {"tol", s.solver.tol},
        {"average_window", s.solver.average_window},
        {"normalize_payoffs", s.solver.normalize_payoffs}}},
  };
}

PsroSetup setup_from_json(const json& j) {
  PsroSetup s;
  const auto& p = j.at("psro");
  s.psro.max_loops = p.at("max_loops").get<int>();
  s.psro.max_policies = p.at("max_policies").get<int>();
  s.psro.train_min = p.at("train_min").get<double>();
  s.psro.train_max = p.at("train_max").get<double>();
  s.psro.mode = parse_psro_mode(p.at("mode").get<std::string>());
  s.psro.seed = p.at("seed").get<std::uint64_t>();
  s.psro.payoff_episodes = p.at("payoff_episodes").get<int>();
  const auto& m = j.at("maml");
  s.maml.inner_lr = m.at("inner_lr").get<double>();
  s.maml.outer_lr = m.at("outer_lr").get<double>();
  s.maml.traj_per_task = m.at("traj_per_task").get<int>();
  s.maml.tasks_per_batch = m.at("tasks_per_batch").get<int>();
  s.maml.meta_iterations = m.at("meta_iterations").get<int>();
  s.maml.first_order = m.at("first_order").get<bool>();
  s.maml.hidden_size = m.at("hidden_size").get<int>();
  s.maml.baseline = parse_baseline(m.at("baseline").get<std::string>());
  s.maml.entropy_bonus = m.at("entropy_bonus").get<double>();
  s.maml.normalize_advantages = m.at("normalize_advantages").get<bool>();
  s.maml.max_grad_norm = m.at("max_grad_norm").get<double>();
  const auto& e = j.at("env");
  s.env.gamma = e.at("gamma").get<double>();
  s.env.horizon = e.at("horizon").get<int>();
  s.env.action_clip = e.at("action_clip").get<double>();
  s.env.dt = e.at("dt").get<double>();
  const auto& v = j.at("solver");
  s.solver.eta = v.at("eta").get<double>();
  s.solver.explore_eps = v.at("explore_eps").get<double>();
  s.solver.max_iters = v.at("max_iters").get<int>();
  s.solver.tol = v.at("tol").get<double>();
  s.solver.average_window = v.at("average_window").get<double>();
  s.solver.normalize_payoffs = v.at("normalize_payoffs").get<bool>();
  return s;
}

std::vector<int> task_ids(const TaskSet& tasks) {
  std::vector<int> ids;
  for (const auto& c : tasks.contexts) ids.push_back(c.id);
  return ids;
}

bool finished(const PsroSetup& s, const RunArtifacts& a) {
  const auto n = a.loops_completed();
  return n >= static_cast<std::size_t>(s.psro.max_loops) ||
         n >= static_cast<std::size_t>(s.psro.max_policies);
}

void check_artifacts(const PsroSetup& setup, const RunArtifacts& a) {
  const auto loops = a.loops_completed();
  const auto simplex = setup.psro.train_simplex(setup.tasks.size());
  if (a.payoff.rows() != loops || a.strategies.size() != loops ||
      a.diagnostics.size() != loops) {
    throw DataError("inconsistent artifacts: " + std::to_string(loops) + " policies, " +
                    std::to_string(a.payoff.rows()) + " payoff rows, " +
                    std::to_string(a.strategies.size()) + " strategy pairs, " +
                    std::to_string(a.diagnostics.size()) + " diagnostics rows");
  }
  if (loops > 0 && a.payoff.cols() != setup.tasks.size()) {
    throw DataError("payoff table has " + std::to_string(a.payoff.cols()) +
                    " columns for " + std::to_string(setup.tasks.size()) + " tasks");
  }
  for (std::size_t k = 0; k < loops; ++k) {
    const auto& s = a.strategies[k];
    const std::string where = "loop " + std::to_string(k) + ": ";
    if (s.pi.size() != k + 1) throw DataError(where + "pi has wrong length");
    if (!simplex.contains(s.p1)) throw DataError(where + "p1 outside train_simplex");
    if (!a.policies[k].all_finite()) throw DataError(where + "policy has non-finite weights");
  }
}

double mean_tail(const std::vector<double>& v, std::size_t tail) {
  if (v.empty()) return 0.0;
  const auto n = std::min(tail, v.size());
  return std::accumulate(v.end() - static_cast<std::ptrdiff_t>(n), v.end(), 0.0) /
         static_cast<double>(n);
}

}  // namespace

RunArtifacts run_psro(const PsroSetup& setup, const std::optional<fs::path>& run_dir,
                      RunArtifacts artifacts, std::optional<int> stop_after) {
  validate_setup(setup);
  const auto n = setup.tasks.size();
  const auto simplex = setup.psro.train_simplex(n);
  if (artifacts.loops_completed() == 0) {
    artifacts = RunArtifacts{};
    artifacts.payoff = PayoffTable(n);
  }
  check_artifacts(setup, artifacts);

  int executed = 0;
  while (!finished(setup, artifacts) && (!stop_after || executed < *stop_after)) {
    const auto loop = artifacts.loops_completed();
    const auto start = std::chrono::steady_clock::now();
    Rng rng(mix_seed(setup.psro.seed, loop));

    std::vector<double> p1 = artifacts.strategies.empty()
                                 ? std::vector<double>(n, 1.0 / static_cast<double>(n))
                                 : artifacts.strategies.back().p1;
    std::optional<MlpParams> init;
    if (setup.psro.mode == PsroMode::kGirl && !artifacts.policies.empty()) {
      init = artifacts.policies.back();
    }
    Rng br_rng = rng.fork(0);
    MetaTrace trace;
    auto policy = best_response(p1, setup.tasks, setup.maml, setup.env, init, br_rng, &trace);

    Rng payoff_rng = rng.fork(1);
    auto payoff = augment_payoff(artifacts.payoff, policy, setup.tasks, setup.env,
                                 setup.psro.payoff_episodes, payoff_rng);
    const auto solved = rprd_solve_detailed(payoff, simplex, setup.solver);
    if (!simplex.contains(solved.average.p1)) {
      throw InternalError("solver returned p1 outside train_simplex at loop " +
                          std::to_string(loop));
    }

    LoopDiagnostics d;
    d.loop = static_cast<int>(loop);
    d.restricted_value = restricted_value(solved.average.pi, payoff, simplex);
    d.exploitability = restricted_exploitability(solved.average, payoff, simplex);
    d.solver_iterations = solved.iterations;
    d.mean_post_adaptation_return = mean_tail(trace.post_adaptation_return, 10);
    d.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    artifacts.policies.push_back(std::move(policy));
    artifacts.payoff = std::move(payoff);
    artifacts.strategies.push_back(solved.average);
    artifacts.diagnostics.push_back(d);
    ++executed;
    if (run_dir) save_run(*run_dir, setup, artifacts);
  }
  if (run_dir && executed == 0) save_run(*run_dir, setup, artifacts);
  return artifacts;
}

void save_run(const fs::path& run_dir, const PsroSetup& setup, const RunArtifacts& a) {
  fs::create_directories(run_dir / "policies");
  // Data files first, manifest last: a crash between the two leaves the
  // previous manifest pointing at a consistent prefix.
  std::vector<std::string> files;
  for (std::size_t k = 0; k < a.policies.size(); ++k) {
    const auto rel = fs::path("policies") / policy_file(k);
    const auto full = run_dir / rel;
    write_text_atomic(full, policy_to_text(a.policies[k]));
    files.push_back(rel.generic_string());
  }
  const auto ids = task_ids(setup.tasks);
  write_text_atomic(run_dir / "payoff.csv", payoff_to_csv(a.payoff, ids));
  write_text_atomic(run_dir / "strategies.csv", strategies_to_csv(a.strategies));
  write_text_atomic(run_dir / "diagnostics.csv", diagnostics_to_csv(a.diagnostics));
  write_text_atomic(run_dir / "tasks.json", task_set_to_json(setup.tasks));

  json manifest = {
      {"format", "girl-run"},
      {"format_version", 1},
      {"tool_version", kToolVersion},
      {"seed", setup.psro.seed},
      {"config", setup_to_json(setup)},
      {"loops_completed", a.loops_completed()},
      {"complete", finished(setup, a)},
      {"policies", files},
      {"payoff", "payoff.csv"},
      {"strategies", "strategies.csv"},
      {"diagnostics", "diagnostics.csv"},
      {"tasks", "tasks.json"},
  };
  write_text_atomic(run_dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedRun load_run(const fs::path& run_dir) {
  const auto manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw DataError("no run manifest in " + run_dir.string());
  }
  json manifest;
  LoadedRun out;
  std::size_t loops = 0;
  try {
    manifest = json::parse(read_text(manifest_path));
    if (manifest.at("format").get<std::string>() != "girl-run") {
      throw DataError("not a girl run manifest");
    }
    out.setup = setup_from_json(manifest.at("config"));
    loops = manifest.at("loops_completed").get<std::size_t>();
    out.complete = manifest.at("complete").get<bool>();
  } catch (const json::exception& e) {
    throw DataError("corrupt manifest " + manifest_path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError("corrupt manifest " + manifest_path.string() + ": " + e.what());
  }
  out.setup.tasks = task_set_from_json(read_text(run_dir / "tasks.json"));

  auto& a = out.artifacts;
  const auto files = manifest.value("policies", std::vector<std::string>{});
  if (files.size() != loops) {
    throw DataError("manifest lists " + std::to_string(files.size()) +
                    " policies but loops_completed = " + std::to_string(loops) +
                    " (first missing loop " + std::to_string(std::min(files.size(), loops)) +
                    ")");
  }
  for (std::size_t k = 0; k < loops; ++k) {
    try {
      a.policies.push_back(policy_from_text(read_text(run_dir / files[k])));
    } catch (const DataError& e) {
      throw DataError("loop " + std::to_string(k) + ": " + e.what());
    }
  }
  a.payoff = payoff_from_csv(read_text(run_dir / "payoff.csv"));
  if (a.payoff.rows() == 0) a.payoff = PayoffTable(out.setup.tasks.size());
  a.strategies = strategies_from_csv(read_text(run_dir / "strategies.csv"));
  a.diagnostics = diagnostics_from_csv(read_text(run_dir / "diagnostics.csv"));

  // Truncate files written after the manifest's last completed loop.
  if (a.payoff.rows() > loops) {
    std::vector<double> kept(a.payoff.values().begin(),
                             a.payoff.values().begin() +
                                 static_cast<std::ptrdiff_t>(loops * a.payoff.cols()));
    a.payoff = loops ? PayoffTable(loops, a.payoff.cols(), std::move(kept))
                     : PayoffTable(a.payoff.cols());
  }
  if (a.strategies.size() > loops) a.strategies.resize(loops);
  if (a.diagnostics.size() > loops) a.diagnostics.resize(loops);

  for (std::size_t k = 0; k < loops; ++k) {
    if (k >= a.payoff.rows() || k >= a.strategies.size() || k >= a.diagnostics.size()) {
      throw DataError("loop " + std::to_string(k) + ": missing payoff, strategy or diagnostics");
    }
  }
  try {
    check_artifacts(out.setup, a);
  } catch (const DataError& e) {
    throw DataError(std::string("inconsistent run directory: ") + e.what());
  }
  return out;
}

RunArtifacts resume(const fs::path& run_dir) {
  auto loaded = load_run(run_dir);
  if (finished(loaded.setup, loaded.artifacts)) return loaded.artifacts;
  return run_psro(loaded.setup, run_dir, std::move(loaded.artifacts));
}

}  // namespace girl
