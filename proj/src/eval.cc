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

#include "girl/eval.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <tuple>

#include "girl/errors.h"
#include "girl/parallel.h"

namespace girl {

std::vector<double> EvalConfig::resolved_shot_weights() const {
  if (!shot_weights.empty()) return shot_weights;
  std::vector<double> w(static_cast<std::size_t>(shots) + 1, 0.0);
  w.back() = 1.0;
  return w;
}

std::vector<std::string> EvalConfig::problems() const {
  std::vector<std::string> out;
  if (shots < 0) out.push_back("eval.shots must be >= 0");
  if (!shot_weights.empty()) {
    if (shots >= 0 && shot_weights.size() != static_cast<std::size_t>(shots) + 1) {
      out.push_back("eval.shot_weights must have shots + 1 entries");
    }
    double sum = 0.0;
    bool negative = false;
    for (double w : shot_weights) {
      negative |= !(w >= 0.0);
      sum += w;
    }
    if (negative || std::abs(sum - 1.0) > 1e-9) {
      out.push_back("eval.shot_weights must be nonnegative and sum to 1");
    }
  }
  if (!(beta >= 0.0 && beta <= 1.0)) out.push_back("eval.beta must lie in [0, 1]");
  if (!(finetune_lr > 0.0)) out.push_back("eval.finetune_lr must be > 0");
  if (episodes < 1) out.push_back("eval.episodes must be >= 1");
  if (seeds.empty()) out.push_back("eval.seeds must list at least one seed");
  if (!(test_min >= 0.0 && test_max <= 1.0 && test_min <= test_max)) {
    out.push_back("eval.test_simplex bounds must satisfy 0 <= test_min <= test_max <= 1");
  }
  return out;
}

void EvalConfig::validate(std::size_t num_tasks) const {
  auto p = problems();
  if (!test_simplex(num_tasks).feasible()) {
    p.push_back("eval.test_simplex is infeasible for " + std::to_string(num_tasks) +
                " tasks");
  }
  if (!p.empty()) throw InvalidArgument(p.front());
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kMaml:
      return "maml";
    case Method::kStarGirl:
      return "star_girl";
    case Method::kGirl:
      return "girl";
  }
  return "unknown";
}

std::vector<std::string> CompareConfig::problems() const {
  std::vector<std::string> out;
  if (train_max.empty()) out.push_back("compare.train_max must not be empty");
  if (test_max.empty()) out.push_back("compare.test_max must not be empty");
  if (shots.empty()) out.push_back("compare.shots must not be empty");
  if (seeds.empty()) out.push_back("compare.seeds must list at least one seed");
  for (int k : shots) {
    if (k < 0) out.push_back("compare.shots entries must be >= 0");
  }
  if (maml_iterations < 0) out.push_back("compare.maml_iterations must be >= 0");
  return out;
}

const ComparisonRow& ComparisonTable::find(int shots, double test_max, double train_max,
                                           Method method) const {
  for (const auto& row : rows) {
    if (row.shots == shots && row.test_max == test_max && row.train_max == train_max &&
        row.method == method) {
      return row;
    }
  }
  throw InvalidArgument("ComparisonTable: no such cell");
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / (n - 1.0))};
}

MlpParams kshot_finetune(const MlpParams& params, const TaskContext& context, int shots,
                         double finetune_lr, const MamlConfig& pg_source,
                         const EnvConfig& env_cfg, Rng& rng) {
  if (shots < 0) throw InvalidArgument("kshot_finetune: shots must be >= 0");
  MamlConfig cfg = pg_source;
  cfg.inner_lr = finetune_lr;
  MlpParams out = params;
  for (int k = 0; k < shots; ++k) out = inner_adapt(out, context, cfg, env_cfg, rng);
  return out;
}

EvalMatrix build_eval_matrix(std::span<const MlpParams> policies,
                             std::span<const double> pi, const TaskSet& tasks,
                             const EvalConfig& eval_cfg, const MamlConfig& pg_source,
                             const EnvConfig& env_cfg, Rng& rng) {
  check_distribution(pi, policies.size(), "build_eval_matrix");
  eval_cfg.validate(tasks.size());
  const std::size_t m = policies.size();
  const std::size_t n = tasks.size();
  const auto weights = eval_cfg.resolved_shot_weights();
  MamlConfig cfg = pg_source;
  cfg.inner_lr = eval_cfg.finetune_lr;

  const Rng base = rng.fork(rng.next_u64());
  std::vector<double> values(m * n, 0.0);
  parallel_for(m * n, [&](std::size_t cell) {
    const std::size_t i = cell / n;
    const std::size_t j = cell % n;
    Rng cell_rng = base.fork(cell);
    MlpParams theta = policies[i];
    double acc = 0.0;
    for (int k = 0; k <= eval_cfg.shots; ++k) {
      const double w = weights[static_cast<std::size_t>(k)];
      if (w > 0.0) {
        acc += w * estimate_return(theta, tasks.contexts[j], env_cfg, eval_cfg.episodes,
                                   cell_rng)
                       .mean;
      }
      if (k < eval_cfg.shots) {
        theta = inner_adapt(theta, tasks.contexts[j], cfg, env_cfg, cell_rng);
      }
    }
    values[cell] = acc;
  });

  EvalMatrix out{PayoffTable(m, n, std::move(values)), std::vector<double>(n, 0.0)};
  kernels::gemv_t(out.matrix.matrix(), pi, out.r);
  return out;
}

AdversaryChoice adversarial_value(std::span<const double> r, std::span<const double> p0,
                                  const RestrictedSimplex& test_simplex, double beta) {
  test_simplex.require_feasible("adversarial_value");
  if (p0.size() != r.size()) throw InvalidArgument("adversarial_value: |p0| != |R|");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("adversarial_value: beta");
  AdversaryChoice out;
  out.p1 = adversary_best_response(r, test_simplex);
  if (beta > 0.0) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      out.p1[j] = beta * p0[j] + (1.0 - beta) * out.p1[j];
    }
    if (!test_simplex.contains(out.p1)) out.p1 = clip_normalize(out.p1, test_simplex);
  }
  out.value = kernels::dot(out.p1, r);
  return out;
}

EvalReport evaluate(std::span<const MlpParams> policies, std::span<const double> pi,
                    const TaskSet& tasks, const EvalConfig& eval_cfg,
                    const MamlConfig& pg_source, const EnvConfig& env_cfg) {
  eval_cfg.validate(tasks.size());
  const std::size_t m = policies.size();
  const std::size_t n = tasks.size();
  const RestrictedSimplex box = eval_cfg.test_simplex(n);

  std::vector<double> sum(m * n, 0.0);
  EvalReport report;
  for (std::uint64_t seed : eval_cfg.seeds) {
    Rng rng(seed);
    const EvalMatrix em =
        build_eval_matrix(policies, pi, tasks, eval_cfg, pg_source, env_cfg, rng);
    kernels::axpy(1.0, em.matrix.values(), sum);
    report.seed_values.push_back(adversarial_value(em.r, tasks.p0, box, eval_cfg.beta).value);
  }
  for (double& v : sum) v /= static_cast<double>(eval_cfg.seeds.size());
  report.eval_matrix = PayoffTable(m, n, std::move(sum));
  report.r.assign(n, 0.0);
  kernels::gemv_t(report.eval_matrix.matrix(), pi, report.r);
  const AdversaryChoice choice = adversarial_value(report.r, tasks.p0, box, eval_cfg.beta);
  report.p1 = choice.p1;
  report.value = choice.value;
  std::tie(report.seed_mean, report.seed_std) = mean_std(report.seed_values);
  return report;
}

ComparisonTable compare_methods(const PsroSetup& setup, const EvalConfig& eval_cfg,
                                const CompareConfig& grid,
                                const std::optional<std::filesystem::path>& out_dir) {
  auto problems = grid.problems();
  if (!problems.empty()) throw InvalidArgument(problems.front());
  const std::size_t n = setup.tasks.size();
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));

  // Trained agents: policies + meta-strategy, per (seed, method, train_max).
  struct Agent {
    std::vector<MlpParams> policies;
    std::vector<double> pi;
  };
  const Method kMethods[] = {Method::kMaml, Method::kStarGirl, Method::kGirl};

  std::vector<ComparisonRow> rows;
  for (int k : grid.shots) {
    for (double test_max : grid.test_max) {
      for (double train_max : grid.train_max) {
        for (Method method : kMethods) {
          rows.push_back({k, test_max, train_max, method, {}, 0.0, 0.0});
        }
      }
    }
  }
  auto row_for = [&](int k, double test_max, double train_max, Method method) -> ComparisonRow& {
    for (auto& row : rows) {
      if (row.shots == k && row.test_max == test_max && row.train_max == train_max &&
          row.method == method) {
        return row;
      }
    }
    throw InternalError("compare_methods: missing row");
  };

  for (std::uint64_t seed : grid.seeds) {
    // MAML baseline: one policy trained against the fixed uniform task
    // distribution with the same oracle.
    MamlConfig baseline_cfg = setup.maml;
    baseline_cfg.meta_iterations = grid.maml_iterations > 0
                                       ? grid.maml_iterations
                                       : setup.psro.max_loops * setup.maml.meta_iterations;
    Rng maml_rng(mix_seed(seed, 0x6d616d6cULL));
    Agent maml{{best_response(uniform, setup.tasks, baseline_cfg, setup.env, std::nullopt,
                              maml_rng)},
               {1.0}};

    std::vector<std::pair<double, std::pair<Agent, Agent>>> psro_agents;
    for (double train_max : grid.train_max) {
      std::pair<Agent, Agent> agents;
      for (PsroMode mode : {PsroMode::kStarGirl, PsroMode::kGirl}) {
        PsroSetup run = setup;
        run.psro.train_max = train_max;
        run.psro.mode = mode;
        run.psro.seed = seed;
        std::optional<std::filesystem::path> run_dir;
        if (out_dir) {
          char name[128];
          std::snprintf(name, sizeof(name), "%s_train%.3g_seed%llu",
                        std::string(psro_mode_name(mode)).c_str(), train_max,
                        static_cast<unsigned long long>(seed));
          run_dir = *out_dir / "runs" / name;
        }
        RunArtifacts art = run_psro(run, run_dir);
        Agent agent{art.policies, art.strategies.back().pi};
        (mode == PsroMode::kGirl ? agents.second : agents.first) = std::move(agent);
      }
      psro_agents.push_back({train_max, std::move(agents)});
    }

    for (int k : grid.shots) {
      EvalConfig cell_cfg = eval_cfg;
      cell_cfg.shots = k;
      if (cell_cfg.shot_weights.size() != static_cast<std::size_t>(k) + 1) {
        cell_cfg.shot_weights.clear();
      }
      // The eval matrix does not depend on the test box; evaluate once per
      // agent and let the adversary re-choose for each test_max.
      auto score = [&](const Agent& agent) {
        std::vector<double> sum(n, 0.0);
        for (std::uint64_t eval_seed : cell_cfg.seeds) {
          Rng rng(mix_seed(eval_seed, seed));
          const EvalMatrix em = build_eval_matrix(agent.policies, agent.pi, setup.tasks,
                                                  cell_cfg, setup.maml, setup.env, rng);
          kernels::axpy(1.0, em.r, sum);
        }
        for (double& v : sum) v /= static_cast<double>(cell_cfg.seeds.size());
        return sum;
      };
      const auto r_maml = score(maml);
      for (const auto& [train_max, agents] : psro_agents) {
        const auto r_star = score(agents.first);
        const auto r_girl = score(agents.second);
        for (double test_max : grid.test_max) {
          EvalConfig box_cfg = cell_cfg;
          box_cfg.test_max = test_max;
          const RestrictedSimplex box = box_cfg.test_simplex(n);
          box.require_feasible("compare_methods");
          auto value = [&](const std::vector<double>& r) {
            return adversarial_value(r, setup.tasks.p0, box, cell_cfg.beta).value;
          };
          row_for(k, test_max, train_max, Method::kMaml).seed_values.push_back(value(r_maml));
          row_for(k, test_max, train_max, Method::kStarGirl)
              .seed_values.push_back(value(r_star));
          row_for(k, test_max, train_max, Method::kGirl).seed_values.push_back(value(r_girl));
        }
      }
    }
  }
  for (auto& row : rows) std::tie(row.mean, row.stddev) = mean_std(row.seed_values);
  return ComparisonTable{std::move(rows)};
}

}  // namespace girl
