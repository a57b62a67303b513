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

#ifndef GIRL_EVAL_H_
#define GIRL_EVAL_H_

// Adversarial K-shot evaluation. Every policy is fine-tuned K gradient steps
// on each task, the per-task returns are mixed with the agent's training
// meta-strategy pi (never recomputed here), and the adversary then picks the
// worst task distribution inside the test box.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "girl/env.h"
#include "girl/maml.h"
#include "girl/metagame.h"
#include "girl/policy.h"
#include "girl/psro.h"

namespace girl {

struct EvalConfig {
  int shots = 0;
  // Weights over the K + 1 evaluation points (after 0..K fine-tuning steps).
  // Empty means all weight on the last shot.
  std::vector<double> shot_weights;
  double test_min = 0.0;
  double test_max = 1.0;
  // 0 = fully adversarial, 1 = base distribution.
  double beta = 0.0;
  double finetune_lr = 0.1;
  int episodes = 10;
  std::vector<std::uint64_t> seeds = {0};

  RestrictedSimplex test_simplex(std::size_t n) const { return {n, test_min, test_max}; }
  std::vector<double> resolved_shot_weights() const;
  std::vector<std::string> problems() const;
  void validate(std::size_t num_tasks) const;
};

struct EvalMatrix {
  PayoffTable matrix;     // M x N
  std::vector<double> r;  // pi^T matrix
};

struct AdversaryChoice {
  std::vector<double> p1;
  double value = 0.0;
};

struct EvalReport {
  PayoffTable eval_matrix;  // averaged over evaluation seeds
  std::vector<double> r;
  std::vector<double> p1;
  double value = 0.0;
  std::vector<double> seed_values;
  double seed_mean = 0.0;
  double seed_std = 0.0;
};

// K sequential policy-gradient steps on a single task (finetune_traj
// rollouts per step, PG settings from `pg_source`).
MlpParams kshot_finetune(const MlpParams& params, const TaskContext& context, int shots,
                         double finetune_lr, const MamlConfig& pg_source,
                         const EnvConfig& env_cfg, Rng& rng);

EvalMatrix build_eval_matrix(std::span<const MlpParams> policies,
                             std::span<const double> pi, const TaskSet& tasks,
                             const EvalConfig& eval_cfg, const MamlConfig& pg_source,
                             const EnvConfig& env_cfg, Rng& rng);

// p1 = beta * p0 + (1 - beta) * argmin_{p in box} p . r, pulled back into the
// box by clip_normalize when needed.
AdversaryChoice adversarial_value(std::span<const double> r, std::span<const double> p0,
                                  const RestrictedSimplex& test_simplex, double beta);

// Evaluates once per entry of eval_cfg.seeds.
EvalReport evaluate(std::span<const MlpParams> policies, std::span<const double> pi,
                    const TaskSet& tasks, const EvalConfig& eval_cfg,
                    const MamlConfig& pg_source, const EnvConfig& env_cfg);

enum class Method { kMaml, kStarGirl, kGirl };
std::string_view method_name(Method m);

struct CompareConfig {
  std::vector<double> train_max = {0.3, 0.5};
  std::vector<double> test_max = {0.3, 0.5};
  std::vector<int> shots = {0, 3};
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  // Meta-iterations for the single-policy MAML baseline; 0 means
  // psro.max_loops * maml.meta_iterations (equal training budget).
  int maml_iterations = 0;

  std::vector<std::string> problems() const;
};

struct ComparisonRow {
  int shots = 0;
  double test_max = 0.0;
  double train_max = 0.0;
  Method method = Method::kMaml;
  std::vector<double> seed_values;
  double mean = 0.0;
  double stddev = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  const ComparisonRow& find(int shots, double test_max, double train_max,
                            Method method) const;
};

// Trains the MAML baseline and both PSRO variants for every (seed,
// train_max) and evaluates every (shots, test_max) cell. `setup` supplies
// tasks, env, maml, solver and the PSRO settings other than train_max/mode/
// seed. When `out_dir` is set, each training run is persisted under
// out_dir/runs/.
ComparisonTable compare_methods(const PsroSetup& setup, const EvalConfig& eval_cfg,
                                const CompareConfig& grid,
                                const std::optional<std::filesystem::path>& out_dir =
                                    std::nullopt);

// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(std::span<const double> values);

}  // namespace girl

#endif  // GIRL_EVAL_H_
